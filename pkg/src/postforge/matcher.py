"""Candidate ranking against a developer's coding context and expertise.

Three similarity components: token-shingle overlap against the question's
code blocks, overlap of referenced API type names, and TF-IDF cosine over
identifier-derived terms. The combined score drives a sequential
probabilistic assignment.
"""

from __future__ import annotations

import json
import logging
import math
import random
import re
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path
from typing import Iterable, Sequence

from .records import QuestionRecord, format_timestamp, parse_timestamp
from .snippets.lexer import TokenStream, lex

logger = logging.getLogger(__name__)

DEFAULT_SHINGLE_K = 5
STALENESS_DAYS = 90
ASSIGN_TRIAL_CAP = 10**6

_WORD = re.compile(r"[A-Z]+(?![a-z])|[A-Z][a-z0-9]*|[a-z0-9]+")
_TAG_STRIP = re.compile(r"<[^>]+>")


def split_identifier(name: str) -> list[str]:
    """camelCase / underscore / digit-boundary split, lowercased."""
    return [w.lower() for w in _WORD.findall(name)]


@dataclass(frozen=True)
class SimilarityWeights:
    code: float = 0.5
    api: float = 0.3
    text: float = 0.2

    def __post_init__(self):
        total = self.code + self.api + self.text
        if min(self.code, self.api, self.text) < 0:
            raise ValueError("weights must be non-negative")
        if not math.isclose(total, 1.0, abs_tol=1e-9):
            raise ValueError(f"weights must sum to 1, got {total}")

    def to_dict(self) -> dict:
        return {"code": self.code, "api": self.api, "text": self.text}


@dataclass(frozen=True)
class CodingContext:
    shingles: Counter
    api_types: frozenset[str]
    terms: Counter
    shingle_k: int = DEFAULT_SHINGLE_K


@dataclass(frozen=True)
class ScoredCandidate:
    question_id: int
    similarity: float
    component_scores: dict


def _shingles(texts: Sequence[str], k: int) -> Counter:
    counter: Counter = Counter()
    for i in range(len(texts) - k + 1):
        counter[tuple(texts[i : i + k])] += 1
    return counter


def _api_types(stream: TokenStream) -> set[str]:
    """Capitalized identifiers in declaration or instantiation position."""
    types: set[str] = set()
    tokens = stream.tokens
    for i, tok in enumerate(tokens):
        if tok.kind != "identifier" or not tok.text[:1].isupper():
            continue
        prev_text = tokens[i - 1].text if i > 0 else ""
        nxt = tokens[i + 1] if i + 1 < len(tokens) else None
        if prev_text == "new":
            types.add(tok.text)
        elif nxt is not None and (nxt.kind == "identifier" or nxt.text == "<"):
            types.add(tok.text)
    return types


def _identifier_terms(stream: TokenStream) -> Counter:
    terms: Counter = Counter()
    for tok in stream:
        if tok.kind == "identifier":
            terms.update(split_identifier(tok.text))
    return terms


def extract_context(
    source_files: Sequence[str],
    k: int = DEFAULT_SHINGLE_K,
    source_ids: Sequence[str] | None = None,
) -> CodingContext:
    """Build the coding context from raw source texts.

    Files whose lexing produces diagnostics are skipped with a warning; at
    least one usable non-empty file is required.
    """
    if not source_files or all(not s.strip() for s in source_files):
        raise ValueError("no non-empty source files")
    shingles: Counter = Counter()
    api_types: set[str] = set()
    terms: Counter = Counter()
    used = 0
    for idx, source in enumerate(source_files):
        sid = source_ids[idx] if source_ids else f"file{idx}"
        stream = lex(source, source_id=sid)
        if stream.diagnostics:
            logger.warning("skipping unlexable file %s: %s", sid, "; ".join(stream.diagnostics))
            continue
        if not stream.tokens:
            continue
        shingles.update(_shingles(stream.texts(), k))
        api_types.update(_api_types(stream))
        terms.update(_identifier_terms(stream))
        used += 1
    if used == 0:
        raise ValueError("no lexable source files")
    return CodingContext(shingles=shingles, api_types=frozenset(api_types), terms=terms, shingle_k=k)


def _multiset_jaccard(a: Counter, b: Counter) -> float:
    if not a and not b:
        return 0.0
    inter = sum((a & b).values())
    union = sum((a | b).values())
    return inter / union if union else 0.0


def _set_jaccard(a: frozenset, b: frozenset) -> float:
    if not a and not b:
        return 0.0
    union = a | b
    return len(a & b) / len(union) if union else 0.0


def question_code_view(q: QuestionRecord, k: int = DEFAULT_SHINGLE_K) -> tuple[Counter, frozenset[str], Counter]:
    """(shingles, api_types, terms) for a question: code blocks are lexed,
    text terms come from the title and body plus code identifiers."""
    shingles: Counter = Counter()
    api_types: set[str] = set()
    terms: Counter = Counter()
    for i, block in enumerate(q.code_blocks):
        stream = lex(block, source_id=f"q{q.question_id}#{i}")
        shingles.update(_shingles(stream.texts(), k))
        api_types.update(_api_types(stream))
        terms.update(_identifier_terms(stream))
    prose = _TAG_STRIP.sub(" ", f"{q.title} {q.body}")
    for word in re.findall(r"[A-Za-z_][A-Za-z0-9_]*", prose):
        terms.update(split_identifier(word))
    return shingles, frozenset(api_types), terms


class ContextMatcher:
    """Scores questions from a fixed candidate pool against a coding context.

    IDF is computed over the pool only, keeping scores local and reproducible.
    """

    def __init__(
        self,
        pool: Sequence[QuestionRecord],
        weights: SimilarityWeights = SimilarityWeights(),
        shingle_k: int = DEFAULT_SHINGLE_K,
    ):
        self.weights = weights
        self.shingle_k = shingle_k
        self._views = {q.question_id: question_code_view(q, shingle_k) for q in pool}
        n = len(pool)
        df: Counter = Counter()
        for _, _, terms in self._views.values():
            df.update(set(terms))
        self._idf = {t: math.log((1 + n) / (1 + d)) + 1.0 for t, d in df.items()}
        self._default_idf = math.log(1 + n) + 1.0  # unseen term: df = 0

    def _tfidf(self, terms: Counter) -> dict[str, float]:
        return {t: c * self._idf.get(t, self._default_idf) for t, c in terms.items()}

    def _cosine(self, a: Counter, b: Counter) -> float:
        va, vb = self._tfidf(a), self._tfidf(b)
        dot = sum(w * vb[t] for t, w in va.items() if t in vb)
        na = math.sqrt(sum(w * w for w in va.values()))
        nb = math.sqrt(sum(w * w for w in vb.values()))
        if na == 0 or nb == 0:
            return 0.0
        return dot / (na * nb)

    def score(self, ctx: CodingContext, q: QuestionRecord) -> ScoredCandidate:
        if q.question_id in self._views:
            shingles, api_types, terms = self._views[q.question_id]
        else:
            shingles, api_types, terms = question_code_view(q, self.shingle_k)
        code = _multiset_jaccard(ctx.shingles, shingles)
        api = _set_jaccard(ctx.api_types, api_types)
        text = self._cosine(ctx.terms, terms)
        combined = self.weights.code * code + self.weights.api * api + self.weights.text * text
        combined = min(1.0, max(0.0, combined))
        return ScoredCandidate(
            question_id=q.question_id,
            similarity=combined,
            component_scores={"code": code, "api": api, "text": text},
        )


def similarity(
    ctx: CodingContext,
    q: QuestionRecord,
    weights: SimilarityWeights = SimilarityWeights(),
    pool: Sequence[QuestionRecord] | None = None,
) -> ScoredCandidate:
    """One-off scoring; the IDF pool defaults to just the question itself."""
    return ContextMatcher(pool if pool is not None else [q], weights, ctx.shingle_k).score(ctx, q)


# -- developer profile and policy filters ------------------------------------


@dataclass
class ExpertiseProfile:
    top_tags: tuple[str, ...]
    max_suggestions_per_day: int = 1
    assignment_log: list[datetime] = field(default_factory=list)

    def __post_init__(self):
        if self.max_suggestions_per_day < 1:
            raise ValueError("max_suggestions_per_day must be at least 1")
        self.top_tags = tuple(t.lower() for t in self.top_tags)

    @property
    def last_assignment_time(self) -> datetime | None:
        return max(self.assignment_log) if self.assignment_log else None

    def record_assignment(self, now: datetime) -> None:
        self.assignment_log.append(now)

    def to_dict(self) -> dict:
        return {
            "top_tags": list(self.top_tags),
            "max_suggestions_per_day": self.max_suggestions_per_day,
            "assignment_log": [format_timestamp(t) for t in self.assignment_log],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExpertiseProfile":
        return cls(
            top_tags=tuple(data.get("top_tags", ())),
            max_suggestions_per_day=int(data.get("max_suggestions_per_day", 1)),
            assignment_log=[parse_timestamp(t) for t in data.get("assignment_log", ())],
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "ExpertiseProfile":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_file(self, path: str | Path) -> None:
        tmp = Path(path).with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
        tmp.replace(path)


def expertise_filter(q: QuestionRecord, profile: ExpertiseProfile) -> bool:
    """True iff every tag of the question is one of the profile's top tags."""
    if not q.tags:
        raise ValueError(f"question {q.question_id} has no tags")
    return set(q.tags) <= set(profile.top_tags)


def staleness_filter(q: QuestionRecord, now: datetime, days: int = STALENESS_DAYS) -> bool:
    """True iff the question has had no activity for at least ``days`` days
    (boundary inclusive)."""
    return now - q.last_activity_date >= timedelta(days=days)


def rate_limit_check(profile: ExpertiseProfile, now: datetime) -> bool:
    """True iff fewer assignments than the daily cap fall in the trailing 24h."""
    window_start = now - timedelta(hours=24)
    recent = sum(1 for t in profile.assignment_log if window_start < t <= now)
    return recent < profile.max_suggestions_per_day


class NoAssignableCandidateError(ValueError):
    pass


def sort_candidates(candidates: Iterable[ScoredCandidate]) -> list[ScoredCandidate]:
    # descending similarity, question_id breaks ties for determinism
    return sorted(candidates, key=lambda c: (-c.similarity, c.question_id))


def assign(
    candidates: Sequence[ScoredCandidate],
    rng: random.Random,
    trial_cap: int = ASSIGN_TRIAL_CAP,
) -> int:
    """Sequential probabilistic assignment.

    Walk the candidates in descending similarity, accepting candidate i with
    probability equal to its similarity; after an unlucky full pass, start
    over. Zero-similarity candidates are never assignable. The trial cap is a
    safety net (the loop terminates with probability 1 well before it) and
    falls back to the highest-similarity candidate.

    Note: scaling every similarity by a common factor in (0, 1] preserves the
    candidate ranking but changes each candidate's acceptance probability;
    the induced first-acceptance distribution is a property of the literal
    sequential process, not of the ranking alone.
    """
    if not candidates:
        raise NoAssignableCandidateError("no candidates")
    ordered = [c for c in sort_candidates(candidates) if c.similarity > 0.0]
    if not ordered:
        raise NoAssignableCandidateError("no assignable candidate: all similarities are 0")
    trials = 0
    while trials < trial_cap:
        for candidate in ordered:
            trials += 1
            if rng.random() < candidate.similarity:
                return candidate.question_id
            if trials >= trial_cap:
                break
    return ordered[0].question_id
