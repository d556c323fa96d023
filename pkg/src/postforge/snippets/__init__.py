"""Clone detection, slicing and draft-answer composition."""

from .clones import CloneMatch, detect_clones
from .draft import DraftAnswer, NoRecommendation, compose_draft
from .lexer import Token, TokenStream, lex
from .slicing import StatementGraph, backward_slice, build_statement_graph, forward_slice

__all__ = [
    "CloneMatch",
    "detect_clones",
    "DraftAnswer",
    "NoRecommendation",
    "compose_draft",
    "Token",
    "TokenStream",
    "lex",
    "StatementGraph",
    "backward_slice",
    "build_statement_graph",
    "forward_slice",
]
