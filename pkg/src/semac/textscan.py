"""Tokenization of queries and prefixes.

Tokens keep their character offsets into the raw string so decompositions
can reproduce the exact input text and rewrites can splice the original
surface. Tokens are lowercased; comparisons throughout the engine happen on
the lowercased text.

Rules: whitespace separates; ``, < > = <= >= !=`` are standalone tokens
(a comma between digits stays inside a number like ``2,000,000``); a hyphen
between word characters splits the word ("non-tech" -> "non", "tech").
"""

from __future__ import annotations

from dataclasses import dataclass

_SYMBOL_START = {"<", ">", "=", "!", ","}
_TWO_CHAR = {">=", "<=", "!="}


@dataclass(frozen=True)
class Token:
    text: str  # lowercased
    start: int
    end: int


@dataclass(frozen=True)
class PrefixInput:
    raw: str
    tokens: tuple[Token, ...]
    partial: bool  # last token has no trailing whitespace (still being typed)

    @property
    def texts(self) -> tuple[str, ...]:
        return tuple(t.text for t in self.tokens)


def tokenize(raw: str) -> list[Token]:
    tokens: list[Token] = []
    i, n = 0, len(raw)
    while i < n:
        ch = raw[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _SYMBOL_START:
            if raw[i : i + 2] in _TWO_CHAR:
                tokens.append(Token(raw[i : i + 2], i, i + 2))
                i += 2
            else:
                tokens.append(Token(ch, i, i + 1))
                i += 1
            continue
        start = i
        while i < n:
            c = raw[i]
            if c.isspace():
                break
            if c == ",":
                # comma stays inside digit groups: 2,000,000
                if i + 1 < n and raw[i - 1].isdigit() and raw[i + 1].isdigit():
                    i += 1
                    continue
                break
            if c in _SYMBOL_START:
                break
            if c == "-" and i > start and i + 1 < n and raw[i + 1].isalnum():
                # hyphen splits word pairs; emit the left part, skip the hyphen
                tokens.append(Token(raw[start:i].lower(), start, i))
                i += 1
                start = i
                continue
            i += 1
        if i > start:
            tokens.append(Token(raw[start:i].lower(), start, i))
    return tokens


def scan_prefix(raw: str) -> PrefixInput:
    """Tokenize a user prefix; the last token is partial when the raw string
    ends at it with no trailing whitespace (the user is mid-token)."""
    tokens = tokenize(raw)
    partial = bool(tokens) and raw[tokens[-1].end :].strip() == "" and raw == raw.rstrip()
    return PrefixInput(raw, tuple(tokens), partial)
