"""Token-based clone detection between a question's code and a corpus.

Lines are fingerprinted by their token texts; a clone is a maximal run of
consecutive matching line fingerprints spanning at least ``min_lines``
token-bearing lines. With ``normalize`` enabled, identifiers and literals
collapse to placeholder classes so consistently renamed (type-2) clones
still match.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .lexer import Token, TokenStream

_ID_CLASS = "\0id"
_LIT_CLASS = "\0lit"


@dataclass(frozen=True)
class CloneMatch:
    question_range: tuple[int, int]  # [start_line, end_line] in the needle
    corpus_file: str
    corpus_range: tuple[int, int]
    length_lines: int  # matched token-bearing lines
    normalized: bool


def _fingerprint(tokens: Sequence[Token], normalize: bool) -> tuple[str, ...]:
    if not normalize:
        return tuple(t.text for t in tokens)
    out = []
    for t in tokens:
        if t.kind == "identifier":
            out.append(_ID_CLASS)
        elif t.kind == "literal":
            out.append(_LIT_CLASS)
        else:
            out.append(t.text)
    return tuple(out)


def _line_fingerprints(stream: TokenStream, normalize: bool) -> list[tuple[int, tuple[str, ...]]]:
    grouped = stream.lines()
    return [(line, _fingerprint(grouped[line], normalize)) for line in sorted(grouped)]


def detect_clones(
    needle: TokenStream,
    corpus: Sequence[TokenStream],
    min_lines: int = 6,
    normalize: bool = False,
) -> list[CloneMatch]:
    """All maximal matching line runs of length >= min_lines, longest first."""
    if min_lines < 2:
        raise ValueError("min_lines must be at least 2")
    n_fps = _line_fingerprints(needle, normalize)
    matches: list[CloneMatch] = []
    for stream in corpus:
        c_fps = _line_fingerprints(stream, normalize)
        positions: dict[tuple[str, ...], list[int]] = {}
        for j, (_, fp) in enumerate(c_fps):
            positions.setdefault(fp, []).append(j)
        for i, (_, fp) in enumerate(n_fps):
            for j in positions.get(fp, ()):
                # only start at the beginning of a maximal run
                if i > 0 and j > 0 and n_fps[i - 1][1] == c_fps[j - 1][1]:
                    continue
                length = 0
                while (
                    i + length < len(n_fps)
                    and j + length < len(c_fps)
                    and n_fps[i + length][1] == c_fps[j + length][1]
                ):
                    length += 1
                if length >= min_lines:
                    matches.append(
                        CloneMatch(
                            question_range=(n_fps[i][0], n_fps[i + length - 1][0]),
                            corpus_file=stream.source_id,
                            corpus_range=(c_fps[j][0], c_fps[j + length - 1][0]),
                            length_lines=length,
                            normalized=normalize,
                        )
                    )
    matches.sort(
        key=lambda m: (-m.length_lines, m.corpus_file, m.corpus_range[0], m.question_range[0])
    )
    return matches
