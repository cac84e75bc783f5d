"""Tokenizer for the ``.ssm`` model format."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

PUNCT = {"{", "}", "[", "]", "=", ",", "&", "!"}


class LexError(Exception):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT STRING INT FLOAT PUNCT ARROW EOF
    value: str
    line: int
    column: int


def tokenize(text: str) -> Iterator[Token]:
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch == "=" and i + 1 < n and text[i + 1] == ">":
            yield Token("ARROW", "=>", start_line, start_col)
            i += 2
            col += 2
            continue
        if ch in PUNCT or ch == "=":
            yield Token("PUNCT", ch, start_line, start_col)
            i += 1
            col += 1
            continue
        if ch == '"':
            i += 1
            col += 1
            out: list[str] = []
            while True:
                if i >= n or text[i] == "\n":
                    raise LexError("unterminated string", start_line, start_col)
                c = text[i]
                if c == '"':
                    i += 1
                    col += 1
                    break
                if c == "\\":
                    if i + 1 >= n:
                        raise LexError("unterminated escape", line, col)
                    esc = text[i + 1]
                    mapped = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}.get(esc)
                    if mapped is None:
                        raise LexError(f"unknown escape \\{esc}", line, col)
                    out.append(mapped)
                    i += 2
                    col += 2
                    continue
                out.append(c)
                i += 1
                col += 1
            yield Token("STRING", "".join(out), start_line, start_col)
            continue
        if ch.isdigit():
            j = i
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                if text[j] == ".":
                    seen_dot = True
                j += 1
            lexeme = text[i:j]
            if lexeme.endswith("."):
                raise LexError(f"malformed number {lexeme!r}", start_line, start_col)
            yield Token("FLOAT" if seen_dot else "INT", lexeme, start_line, start_col)
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            yield Token("IDENT", text[i:j], start_line, start_col)
            col += j - i
            i = j
            continue
        raise LexError(f"unexpected character {ch!r}", start_line, start_col)
    yield Token("EOF", "", line, col)
