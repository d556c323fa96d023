"""Lexer for Java-like source.

Produces a flat token stream (identifiers, keywords, literals, operators,
punctuation) with line numbers preserved and whitespace/comments dropped.
Good enough for shingling, clone detection and statement segmentation; it is
not a parser and never validates syntax.
"""

from __future__ import annotations

from dataclasses import dataclass, field

KEYWORDS = frozenset(
    """
    abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package
    private protected public return short static strictfp super switch
    synchronized this throw throws transient try void volatile while
    """.split()
)

# true/false/null are value words, lexed as literals.
WORD_LITERALS = frozenset({"true", "false", "null"})

# Longest-first so ">>>=" wins over ">>" and ">".
OPERATORS = [
    ">>>=", "<<=", ">>=", ">>>", "->", "::", "==", "!=", "<=", ">=", "&&",
    "||", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<",
    ">>", "=", "+", "-", "*", "/", "%", "<", ">", "!", "&", "|", "^", "~",
    "?", ":",
]

PUNCT = ["...", "(", ")", "{", "}", "[", "]", ";", ",", ".", "@"]

_SYMBOLS = sorted(
    [(s, "operator") for s in OPERATORS] + [(s, "punct") for s in PUNCT],
    key=lambda pair: len(pair[0]),
    reverse=True,
)


@dataclass(frozen=True)
class Token:
    kind: str  # identifier | keyword | literal | operator | punct
    text: str
    line: int
    col: int


@dataclass
class TokenStream:
    tokens: list[Token]
    source_id: str = "<memory>"
    diagnostics: list[str] = field(default_factory=list)

    def __iter__(self):
        return iter(self.tokens)

    def __len__(self):
        return len(self.tokens)

    def texts(self) -> list[str]:
        return [t.text for t in self.tokens]

    def lines(self) -> dict[int, list[Token]]:
        """Tokens grouped by line, in stream order."""
        grouped: dict[int, list[Token]] = {}
        for tok in self.tokens:
            grouped.setdefault(tok.line, []).append(tok)
        return grouped


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch in "_$"


def _is_ident_part(ch: str) -> bool:
    return ch.isalnum() or ch in "_$"


def lex(source: str, source_id: str = "<memory>") -> TokenStream:
    """Tokenize ``source``.

    An unterminated string, char or block comment stops the scan at the error
    point; everything lexed so far is returned together with a diagnostic.
    """
    tokens: list[Token] = []
    diagnostics: list[str] = []
    pos, line, col = 0, 1, 1
    n = len(source)

    def advance(text: str) -> None:
        nonlocal pos, line, col
        for ch in text:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        pos += len(text)

    while pos < n:
        ch = source[pos]

        if ch in " \t\r\n\f":
            advance(ch)
            continue

        if source.startswith("//", pos):
            end = source.find("\n", pos)
            advance(source[pos:] if end < 0 else source[pos:end])
            continue

        if source.startswith("/*", pos):
            end = source.find("*/", pos + 2)
            if end < 0:
                diagnostics.append(f"{source_id}:{line}: unterminated block comment")
                break
            advance(source[pos : end + 2])
            continue

        if ch in "\"'":
            quote = ch
            j = pos + 1
            closed = False
            while j < n:
                cj = source[j]
                if cj == "\\" and j + 1 < n:
                    j += 2
                    continue
                if cj == quote:
                    closed = True
                    break
                if cj == "\n":
                    break
                j += 1
            if not closed:
                kind = "string" if quote == '"' else "char"
                diagnostics.append(f"{source_id}:{line}: unterminated {kind} literal")
                break
            text = source[pos : j + 1]
            tokens.append(Token("literal", text, line, col))
            advance(text)
            continue

        if ch.isdigit():
            j = pos + 1
            if ch == "0" and j < n and source[j] in "xXbB":
                j += 1
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            # fractional part / exponent, but not a member access like "1.toString()"
            if j < n and source[j] == "." and j + 1 < n and source[j + 1].isdigit():
                j += 1
                while j < n and (source[j].isalnum() or source[j] == "_"):
                    j += 1
            if j < n and source[j - 1] in "eE" and source[j] in "+-":
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            text = source[pos:j]
            tokens.append(Token("literal", text, line, col))
            advance(text)
            continue

        if _is_ident_start(ch):
            j = pos + 1
            while j < n and _is_ident_part(source[j]):
                j += 1
            text = source[pos:j]
            if text in KEYWORDS:
                kind = "keyword"
            elif text in WORD_LITERALS:
                kind = "literal"
            else:
                kind = "identifier"
            tokens.append(Token(kind, text, line, col))
            advance(text)
            continue

        for sym, kind in _SYMBOLS:
            if source.startswith(sym, pos):
                tokens.append(Token(kind, sym, line, col))
                advance(sym)
                break
        else:
            # Unknown byte: record once and move on, the stream stays usable.
            diagnostics.append(f"{source_id}:{line}: unexpected character {ch!r}")
            advance(ch)

    return TokenStream(tokens, source_id=source_id, diagnostics=diagnostics)
