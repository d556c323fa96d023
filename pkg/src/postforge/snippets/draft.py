"""Draft answer composition from clone matches and slices."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Mapping, Sequence

from ..records import QuestionRecord
from .clones import CloneMatch
from .lexer import Token, lex
from .slicing import backward_slice, build_statement_graph, forward_slice


@dataclass(frozen=True)
class NoRecommendation:
    question_id: int
    reason: str  # "no_code" | "no_clone_match"


@dataclass
class DraftAnswer:
    question_id: int
    snippet: str
    provenance: dict
    status: str = "draft"  # draft | approved | submitted
    created_at: datetime = field(default_factory=lambda: datetime.now(tz=timezone.utc))

    def to_dict(self) -> dict:
        return {
            "question_id": self.question_id,
            "snippet": self.snippet,
            "provenance": self.provenance,
            "status": self.status,
            "created_at": self.created_at.isoformat(),
        }


def _enclosing_block(tokens: Sequence[Token], line_range: tuple[int, int]) -> list[Token]:
    """Content of the innermost braced block covering the line range, or the
    whole stream when no block encloses it (top-level statement sequences)."""
    start_line, end_line = line_range
    stack: list[int] = []
    best: tuple[int, int] | None = None  # token index span of block content
    for i, tok in enumerate(tokens):
        if tok.text == "{":
            stack.append(i)
        elif tok.text == "}" and stack:
            open_i = stack.pop()
            if tokens[open_i].line <= start_line and tok.line >= end_line:
                if best is None or open_i > best[0]:
                    best = (open_i, i)
    if best is None:
        return list(tokens)
    return list(tokens[best[0] + 1 : best[1]])


def _render(source: str, line_numbers: Sequence[int]) -> str:
    """Selected source lines in original order, left margin normalized."""
    lines = source.splitlines()
    selected = [lines[ln - 1] for ln in sorted(set(line_numbers)) if 0 < ln <= len(lines)]
    non_blank = [ln for ln in selected if ln.strip()]
    if not non_blank:
        return ""
    margin = min(len(ln) - len(ln.lstrip()) for ln in non_blank)
    return "\n".join(ln[margin:] if ln.strip() else "" for ln in selected)


def compose_draft(
    q: QuestionRecord,
    matches: Sequence[CloneMatch],
    corpus: Mapping[str, str],
    now: datetime | None = None,
) -> DraftAnswer | NoRecommendation:
    """Build a draft snippet for the question from the developer's own code.

    Takes the best clone match (longest, then lowest file path), seeds the
    statement graph with the matched statements, and renders the union of the
    backward and forward slices in original source order and formatting.
    Questions without code get no recommendation, as do questions whose code
    matches nothing in the corpus.
    """
    if not q.code_blocks:
        return NoRecommendation(question_id=q.question_id, reason="no_code")
    if not matches:
        return NoRecommendation(question_id=q.question_id, reason="no_clone_match")

    best = min(matches, key=lambda m: (-m.length_lines, m.corpus_file, m.corpus_range[0]))
    source = corpus[best.corpus_file]
    stream = lex(source, source_id=best.corpus_file)
    region = _enclosing_block(stream.tokens, best.corpus_range)
    graph = build_statement_graph(region)

    lo, hi = best.corpus_range
    seeds = {
        s.id
        for s in graph.statements
        if s.line_range[0] <= hi and s.line_range[1] >= lo
    }
    if not seeds:
        return NoRecommendation(question_id=q.question_id, reason="no_clone_match")
    slice_ids = sorted(backward_slice(graph, seeds) | forward_slice(graph, seeds))

    line_numbers: list[int] = []
    for s in graph.statements:
        if s.id in slice_ids:
            line_numbers.extend(range(s.line_range[0], s.line_range[1] + 1))
    snippet = _render(source, line_numbers)

    provenance = {
        "corpus_file": best.corpus_file,
        "match": {
            "question_range": list(best.question_range),
            "corpus_range": list(best.corpus_range),
            "length_lines": best.length_lines,
            "normalized": best.normalized,
        },
        "alternatives": [
            {
                "corpus_file": m.corpus_file,
                "corpus_range": list(m.corpus_range),
                "length_lines": m.length_lines,
            }
            for m in matches
            if m is not best
        ],
        "seed_statements": sorted(seeds),
        "slice_statements": slice_ids,
    }
    return DraftAnswer(
        question_id=q.question_id,
        snippet=snippet,
        provenance=provenance,
        created_at=now or datetime.now(tz=timezone.utc),
    )
