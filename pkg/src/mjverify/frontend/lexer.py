"""Tokenizer for `.mjava` files.

Annotation comments (`//@ ...` and `/*@ ... @*/`) are tokenized like code but
with the `in_spec` flag set, so the parser knows where specification-only
syntax is legal.  Plain comments are skipped.  Inside block annotations a
leading `@` on a line is a continuation marker and is skipped; a trailing
`// ...` inside a line annotation is a comment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .ast import Span


class LexError(Exception):
    def __init__(self, span: Span, message: str):
        super().__init__(f"{span}: {message}")
        self.span = span
        self.message = message


@dataclass(frozen=True)
class Token:
    kind: str  # 'ident', 'int', 'string', 'op', 'script', 'eof'
    value: str
    span: Span
    in_spec: bool


_PUNCT = [
    "==>", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "..",
    "(", ")", "{", "}", "[", "]", ";", ",", ".", ":", "=", "<", ">",
    "!", "+", "-", "*", "/", "%",
]

_BACKSLASH_KWS = {
    "forall", "exists", "old", "result", "invariant_for",
    "nothing", "everything", "by",
}


class Lexer:
    def __init__(self, text: str, path: str):
        self.text = text
        self.path = path
        self.pos = 0
        self.line = 1
        self.col = 1
        # None = code, 'line' = inside //@, 'block' = inside /*@ @*/
        self.spec_mode: Optional[str] = None
        self.at_line_start = False

    def _peek(self, off: int = 0) -> str:
        p = self.pos + off
        return self.text[p] if p < len(self.text) else ""

    def _advance(self, n: int = 1):
        for _ in range(n):
            if self.pos >= len(self.text):
                return
            if self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _here(self) -> tuple[int, int]:
        return self.line, self.col

    def _span_from(self, start: tuple[int, int]) -> Span:
        return Span(self.path, start[0], start[1], self.line, self.col)

    def tokens(self) -> list[Token]:
        out = []
        while True:
            tok = self._next_token()
            out.append(tok)
            if tok.kind == "eof":
                return out

    def _skip_insignificant(self):
        """Whitespace, plain comments, and annotation mode transitions."""
        while self.pos < len(self.text):
            c = self._peek()
            if self.spec_mode == "line" and c == "\n":
                self.spec_mode = None
                self._advance()
                continue
            if self.spec_mode == "block" and self.at_line_start:
                # skip indentation and continuation '@'s, watching for '@*/'
                while self._peek() in " \t":
                    self._advance()
                while self._peek() == "@" and self._peek(1) != "*":
                    self._advance()
                self.at_line_start = False
                continue
            if c in " \t\r":
                self._advance()
            elif c == "\n":
                self._advance()
                if self.spec_mode == "block":
                    self.at_line_start = True
            elif self.spec_mode == "block" and c == "@" and self._peek(1) == "*" and self._peek(2) == "/":
                self._advance(3)
                self.spec_mode = None
            elif self.spec_mode == "block" and c == "*" and self._peek(1) == "/":
                self._advance(2)
                self.spec_mode = None
            elif c == "/" and self._peek(1) == "/":
                if self._peek(2) == "@" and self.spec_mode is None:
                    self._advance(3)
                    self.spec_mode = "line"
                else:
                    # plain line comment, or trailing comment inside //@
                    while self.pos < len(self.text) and self._peek() != "\n":
                        self._advance()
                    if self.spec_mode == "line":
                        self.spec_mode = None
            elif c == "/" and self._peek(1) == "*" and self.spec_mode is None:
                if self._peek(2) == "@":
                    self._advance(3)
                    self.spec_mode = "block"
                    self.at_line_start = False
                else:
                    start = self._here()
                    self._advance(2)
                    while self.pos < len(self.text) and not (self._peek() == "*" and self._peek(1) == "/"):
                        self._advance()
                    if self.pos >= len(self.text):
                        raise LexError(self._span_from(start), "unterminated comment")
                    self._advance(2)
            else:
                return

    def _next_token(self) -> Token:
        self._skip_insignificant()
        start = self._here()
        in_spec = self.spec_mode is not None
        if self.pos >= len(self.text):
            return Token("eof", "", self._span_from(start), in_spec)
        c = self._peek()

        if c.isalpha() or c == "_":
            ident = []
            while self._peek().isalnum() or self._peek() == "_":
                ident.append(self._peek())
                self._advance()
            return Token("ident", "".join(ident), self._span_from(start), in_spec)

        if c.isdigit():
            num = []
            while self._peek().isdigit():
                num.append(self._peek())
                self._advance()
            return Token("int", "".join(num), self._span_from(start), in_spec)

        if c == "\\":
            self._advance()
            name = []
            while self._peek().isalnum() or self._peek() == "_":
                name.append(self._peek())
                self._advance()
            kw = "".join(name)
            if kw not in _BACKSLASH_KWS:
                raise LexError(self._span_from(start), f"unknown \\{kw}")
            if kw == "by":
                return self._capture_script(start)
            return Token("op", "\\" + kw, self._span_from(start), in_spec)

        if c == '"':
            self._advance()
            buf = []
            while self._peek() not in ('"', ""):
                if self._peek() == "\n":
                    raise LexError(self._span_from(start), "unterminated string")
                buf.append(self._peek())
                self._advance()
            if self._peek() != '"':
                raise LexError(self._span_from(start), "unterminated string")
            self._advance()
            return Token("string", "".join(buf), self._span_from(start), in_spec)

        for p in _PUNCT:
            if self.text.startswith(p, self.pos):
                self._advance(len(p))
                return Token("op", p, self._span_from(start), in_spec)

        raise LexError(self._span_from(start), f"unexpected character {c!r}")

    def _capture_script(self, start: tuple[int, int]) -> Token:
        """Capture the raw text of a balanced `\\by { ... }` block."""
        self._skip_insignificant()
        if self._peek() != "{":
            raise LexError(self._span_from(start), "\\by requires a { ... } block")
        self._advance()
        depth = 1
        buf = []
        while self.pos < len(self.text):
            c = self._peek()
            if c == '"':
                buf.append(c)
                self._advance()
                while self._peek() not in ('"', ""):
                    buf.append(self._peek())
                    self._advance()
                if self._peek() == '"':
                    buf.append('"')
                    self._advance()
                continue
            if c == "{":
                depth += 1
            elif c == "}":
                depth -= 1
                if depth == 0:
                    self._advance()
                    return Token("script", "".join(buf), self._span_from(start), True)
            buf.append(c)
            self._advance()
        raise LexError(self._span_from(start), "unterminated \\by block")


def tokenize(text: str, path: str) -> list[Token]:
    return Lexer(text, path).tokens()
