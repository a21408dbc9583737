"""Hand-rolled lexer for MiniJS."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError
from .syntax import SourceLoc

KEYWORDS = {
    "function", "var", "return", "if", "else", "while", "for", "in",
    "true", "false", "null",
}

# Longest-match-first punctuation.
PUNCT = [
    "==", "!=", "<=", ">=",
    "=", "<", ">", "+", "-", "*", "/", "!",
    "(", ")", "{", "}", "[", "]", ",", ";", ":", ".",
]


@dataclass
class Token:
    kind: str  # "ident" | "number" | "string" | "keyword" | "punct" | "eof"
    value: str
    line: int
    col: int

    def loc(self, unit: str, eval_depth: int = 0) -> SourceLoc:
        return SourceLoc(unit, self.line, self.col, eval_depth)


def tokenize(source: str, unit: str, eval_depth: int = 0) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 0
    n = len(source)

    def err(msg):
        raise ParseError(msg, SourceLoc(unit, line, col, eval_depth))

    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 0
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
                col += 1
            continue
        if source.startswith("/*", i):
            start_line, start_col = line, col
            i += 2
            col += 2
            while i < n and not source.startswith("*/", i):
                if source[i] == "\n":
                    line += 1
                    col = 0
                else:
                    col += 1
                i += 1
            if i >= n:
                raise ParseError("unterminated comment",
                                 SourceLoc(unit, start_line, start_col, eval_depth))
            i += 2
            col += 2
            continue
        if c.isdigit():
            start = i
            start_col = col
            while i < n and source[i].isdigit():
                i += 1
                col += 1
            if i < n and source[i] == "." and i + 1 < n and source[i + 1].isdigit():
                i += 1
                col += 1
                while i < n and source[i].isdigit():
                    i += 1
                    col += 1
            tokens.append(Token("number", source[start:i], line, start_col))
            continue
        if c.isalpha() or c == "_" or c == "$":
            start = i
            start_col = col
            while i < n and (source[i].isalnum() or source[i] in "_$"):
                i += 1
                col += 1
            word = source[start:i]
            kind = "keyword" if word in KEYWORDS else "ident"
            tokens.append(Token(kind, word, line, start_col))
            continue
        if c in "\"'":
            quote = c
            start_col = col
            i += 1
            col += 1
            buf = []
            while i < n and source[i] != quote:
                ch = source[i]
                if ch == "\n":
                    err("unterminated string literal")
                if ch == "\\" and i + 1 < n:
                    esc = source[i + 1]
                    buf.append({"n": "\n", "t": "\t", "\\": "\\",
                                "'": "'", '"': '"'}.get(esc, esc))
                    i += 2
                    col += 2
                    continue
                buf.append(ch)
                i += 1
                col += 1
            if i >= n:
                err("unterminated string literal")
            i += 1
            col += 1
            tokens.append(Token("string", "".join(buf), line, start_col))
            continue
        for p in PUNCT:
            if source.startswith(p, i):
                tokens.append(Token("punct", p, line, col))
                i += len(p)
                col += len(p)
                break
        else:
            err(f"unexpected character {c!r}")
    tokens.append(Token("eof", "", line, col))
    return tokens
