"""postforge: deficient-post detection and answer drafting for community Q&A.

Pipeline: ingest question data, compute post-level features, train a
deficiency classifier, match deficient posts to a developer's coding context
and expertise, and draft a code-snippet answer from the developer's own code
via clone detection and slicing.
"""

__version__ = "0.1.0"
