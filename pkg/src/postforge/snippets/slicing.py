"""Statement-level data-dependence graphs and backward/forward slicing.

Scope is deliberately narrow: intraprocedural, statement-granular, data
dependences only. Compound statements (if/try/for/while blocks, including
their chained else/catch/finally parts) are treated as single units with
merged def/use sets. A statement that defies the def/use heuristics becomes
opaque: it uses every identifier it mentions and defines nothing, which
over-approximates dependences rather than dropping them.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .lexer import Token, TokenStream

_PRIMITIVES = frozenset(
    {"boolean", "byte", "char", "short", "int", "long", "float", "double", "var"}
)
_ASSIGN_OPS = frozenset(
    {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="}
)
_CHAIN_KEYWORDS = frozenset({"else", "catch", "finally"})


@dataclass
class Statement:
    id: int
    line_range: tuple[int, int]
    defs: frozenset[str]
    uses: frozenset[str]
    opaque: bool = False


@dataclass
class StatementGraph:
    statements: list[Statement]
    edges: frozenset[tuple[int, int]]  # (def statement, use statement)
    successors: dict[int, list[int]] = field(default_factory=dict)
    predecessors: dict[int, list[int]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.successors and not self.predecessors:
            for a, b in sorted(self.edges):
                self.successors.setdefault(a, []).append(b)
                self.predecessors.setdefault(b, []).append(a)

    def ids(self) -> set[int]:
        return {s.id for s in self.statements}

    def reversed(self) -> "StatementGraph":
        return StatementGraph(
            statements=self.statements,
            edges=frozenset((b, a) for a, b in self.edges),
        )


def split_statements(tokens: Sequence[Token]) -> list[list[Token]]:
    """Partition a token sequence into top-level statements.

    A statement ends at ';' outside any nesting, or spans a whole braced
    block (with its else/catch/finally chain, and the while tail of
    do-while).
    """
    statements: list[list[Token]] = []
    current: list[Token] = []
    paren = 0
    brace = 0
    i = 0
    n = len(tokens)
    while i < n:
        tok = tokens[i]
        current.append(tok)
        if tok.text == "(":
            paren += 1
        elif tok.text == ")":
            paren = max(0, paren - 1)
        elif tok.text == "{":
            brace += 1
        elif tok.text == "}":
            brace = max(0, brace - 1)
            if brace == 0 and paren == 0:
                nxt = tokens[i + 1] if i + 1 < n else None
                if nxt is not None and nxt.kind == "keyword" and nxt.text in _CHAIN_KEYWORDS:
                    i += 1
                    continue
                if (
                    nxt is not None
                    and nxt.text == "while"
                    and current
                    and current[0].text == "do"
                ):
                    i += 1
                    continue
                statements.append(current)
                current = []
        elif tok.text == ";" and paren == 0 and brace == 0:
            statements.append(current)
            current = []
        i += 1
    if current:
        statements.append(current)
    return statements


def _def_use(tokens: Sequence[Token]) -> tuple[set[str], set[str]]:
    defs: set[str] = set()
    uses: set[str] = set()
    n = len(tokens)
    for i, tok in enumerate(tokens):
        if tok.kind != "identifier":
            continue
        prev = tokens[i - 1] if i > 0 else None
        nxt = tokens[i + 1] if i + 1 < n else None
        prev_text = prev.text if prev else ""
        nxt_text = nxt.text if nxt else ""

        if prev_text == ".":
            continue  # member name
        if prev_text == "new":
            continue  # instantiated type
        if nxt_text == "(":
            continue  # bare call name
        if nxt is not None and nxt.kind == "identifier":
            continue  # type position: "Type name"
        if tok.text[:1].isupper() and nxt_text in ("<", ">"):
            continue  # generic type argument, heuristically

        declared = prev is not None and (
            (prev.kind == "keyword" and prev.text in _PRIMITIVES)
            or (prev.kind == "identifier")
            or prev_text == ">"
        )
        if nxt_text in _ASSIGN_OPS:
            defs.add(tok.text)
            if nxt_text != "=":
                uses.add(tok.text)  # compound assignment reads the old value
            continue
        if nxt_text in ("++", "--") or prev_text in ("++", "--"):
            defs.add(tok.text)
            uses.add(tok.text)
            continue
        if declared and nxt_text in (";", ",", ")", ":", "="):
            defs.add(tok.text)
            continue
        uses.add(tok.text)
    return defs, uses


def _opaque(tokens: Sequence[Token]) -> tuple[set[str], set[str]]:
    return set(), {t.text for t in tokens if t.kind == "identifier"}


def build_statement_graph(body: TokenStream | Sequence[Token]) -> StatementGraph:
    """Statements with def/use sets, plus def-to-use dependence edges.

    An edge (a, b) exists iff a defines a variable that b reads with no
    intervening redefinition in statement order; straight-line code therefore
    yields an acyclic graph.
    """
    tokens = list(body.tokens if isinstance(body, TokenStream) else body)
    statements: list[Statement] = []
    for sid, chunk in enumerate(split_statements(tokens)):
        opaque = False
        try:
            defs, uses = _def_use(chunk)
        except Exception:
            defs, uses = _opaque(chunk)
            opaque = True
        statements.append(
            Statement(
                id=sid,
                line_range=(chunk[0].line, chunk[-1].line),
                defs=frozenset(defs),
                uses=frozenset(uses),
                opaque=opaque,
            )
        )

    edges: set[tuple[int, int]] = set()
    last_def: dict[str, int] = {}
    for stmt in statements:
        for var in stmt.uses:
            if var in last_def and last_def[var] != stmt.id:
                edges.add((last_def[var], stmt.id))
        for var in stmt.defs:
            last_def[var] = stmt.id
    return StatementGraph(statements=statements, edges=frozenset(edges))


def _closure(graph: StatementGraph, seeds: Iterable[int], adjacency: dict[int, list[int]]) -> set[int]:
    seed_set = set(seeds)
    unknown = seed_set - graph.ids()
    if unknown:
        raise ValueError(f"unknown seed statement ids: {sorted(unknown)}")
    reached = set(seed_set)
    queue = deque(seed_set)
    while queue:
        node = queue.popleft()
        for neighbor in adjacency.get(node, ()):
            if neighbor not in reached:
                reached.add(neighbor)
                queue.append(neighbor)
    return reached


def backward_slice(graph: StatementGraph, seeds: Iterable[int]) -> set[int]:
    """Seeds plus everything they transitively depend on."""
    return _closure(graph, seeds, graph.predecessors)


def forward_slice(graph: StatementGraph, seeds: Iterable[int]) -> set[int]:
    """Seeds plus everything transitively influenced by them."""
    return _closure(graph, seeds, graph.successors)
