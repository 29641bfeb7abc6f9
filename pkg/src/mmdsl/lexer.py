"""Small configurable lexer shared by every textual format in the toolkit.

Token kinds: ID, INT, STRING, KW (reserved word or symbol), EOF. The
vocabulary (reserved words + symbol literals) is supplied per format;
grammar-driven parsing builds one from the grammar's keyword set.
`//` and `/* */` comments and whitespace are skipped everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import DiagnosticError, SourceLocation, error

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "\\": "\\"}
_UNESCAPES = {"\n": "\\n", "\t": "\\t", "\r": "\\r", '"': '\\"', "\\": "\\\\"}


def escape_string(value: str) -> str:
    return '"' + "".join(_UNESCAPES.get(c, c) for c in value) + '"'


@dataclass(frozen=True)
class Token:
    kind: str  # ID | INT | STRING | KW | EOF
    text: str
    value: object
    location: SourceLocation

    def is_kw(self, text: str) -> bool:
        return self.kind == "KW" and self.text == text


def _is_word(s: str) -> bool:
    return bool(s) and (s[0].isalpha() or s[0] == "_") and s.replace("_", "").isalnum()


class Lexer:
    def __init__(self, reserved=(), symbols=(), phase: str = "parse"):
        self.reserved = frozenset(reserved)
        self.symbols = sorted(symbols, key=len, reverse=True)
        self.phase = phase

    @classmethod
    def for_keywords(cls, keywords, phase: str = "parse") -> "Lexer":
        """Build a lexer from a grammar's literal keywords: word-like ones
        become reserved words, the rest become symbols."""
        words = {k for k in keywords if _is_word(k)}
        syms = {k for k in keywords if not _is_word(k)}
        return cls(reserved=words, symbols=syms, phase=phase)

    def tokenize(self, text: str, file: str = "<input>") -> list[Token]:
        tokens = []
        line, col = 1, 1
        i, n = 0, len(text)

        def loc():
            return SourceLocation(file, line, col)

        def fail(code, message, at=None):
            raise DiagnosticError([error(self.phase, code, message, location=at or loc())])

        def advance(k):
            nonlocal i, line, col
            for _ in range(k):
                if text[i] == "\n":
                    line += 1
                    col = 1
                else:
                    col += 1
                i += 1

        while i < n:
            c = text[i]
            if c in " \t\r\n":
                advance(1)
                continue
            if text.startswith("//", i):
                while i < n and text[i] != "\n":
                    advance(1)
                continue
            if text.startswith("/*", i):
                start = loc()
                advance(2)
                while i < n and not text.startswith("*/", i):
                    advance(1)
                if i >= n:
                    fail("lexical", "unterminated block comment", at=start)
                advance(2)
                continue
            if c == '"':
                start = loc()
                advance(1)
                out = []
                while True:
                    if i >= n or text[i] == "\n":
                        fail("lexical", "unterminated string literal", at=start)
                    ch = text[i]
                    if ch == '"':
                        advance(1)
                        break
                    if ch == "\\":
                        if i + 1 >= n:
                            fail("lexical", "unterminated string literal", at=start)
                        esc = text[i + 1]
                        if esc not in _ESCAPES:
                            fail("lexical", f"unknown escape '\\{esc}'")
                        out.append(_ESCAPES[esc])
                        advance(2)
                        continue
                    out.append(ch)
                    advance(1)
                value = "".join(out)
                tokens.append(Token("STRING", escape_string(value), value, start))
                continue
            if c.isdigit():
                start = loc()
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                word = text[i:j]
                advance(j - i)
                tokens.append(Token("INT", word, int(word), start))
                continue
            if c.isalpha() or c == "_":
                start = loc()
                j = i
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                word = text[i:j]
                advance(j - i)
                kind = "KW" if word in self.reserved else "ID"
                tokens.append(Token(kind, word, word, start))
                continue
            matched = None
            for sym in self.symbols:
                if text.startswith(sym, i):
                    matched = sym
                    break
            if matched is None:
                fail("lexical", f"unexpected character {c!r}")
            start = loc()
            advance(len(matched))
            tokens.append(Token("KW", matched, matched, start))
        tokens.append(Token("EOF", "", None, loc()))
        return tokens


class TokenStream:
    """Cursor over a token list with the error helpers every hand-written
    parser in this package wants."""

    def __init__(self, tokens: list[Token], phase: str = "parse"):
        self.tokens = tokens
        self.pos = 0
        self.phase = phase

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, ahead: int = 1) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def at_kw(self, text: str) -> bool:
        return self.current.is_kw(text)

    def at(self, kind: str) -> bool:
        return self.current.kind == kind

    def next(self) -> Token:
        tok = self.current
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def accept_kw(self, text: str) -> bool:
        if self.at_kw(text):
            self.next()
            return True
        return False

    def fail(self, message: str, code: str = "syntax", token: Token | None = None):
        tok = token or self.current
        raise DiagnosticError([error(self.phase, code, message, location=tok.location)])

    def expect_kw(self, text: str) -> Token:
        if not self.at_kw(text):
            self.fail(f"expected '{text}', found {self.describe()}")
        return self.next()

    def expect(self, kind: str) -> Token:
        if self.current.kind != kind:
            self.fail(f"expected {kind}, found {self.describe()}")
        return self.next()

    def expect_eof(self):
        if self.current.kind != "EOF":
            self.fail(f"expected end of input, found {self.describe()}")

    def describe(self) -> str:
        tok = self.current
        if tok.kind == "EOF":
            return "end of input"
        return f"'{tok.text}'"
