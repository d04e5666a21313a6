"""Most-popular-completion over a query log.

Logged queries are parsed offline; their interpretations, derivations and
frequencies are stored in a character trie so that serving a prefix is a
single trie descent returning the precomputed top-k by frequency. Queries
the grammar cannot interpret are dropped at build time (suggesting them
would break the guarantee that every suggestion is understood).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .grammar import Grammar, parse
from .ir import Completion, Derivation, Grade
from .lexicon import LexiconStore
from .textscan import tokenize
from .trie import Trie


@dataclass
class IndexedQuery:
    text: str
    frequency: int
    derivation: Derivation


def _normalize(text: str) -> str:
    return " ".join(text.lower().split())


@dataclass
class MpcBuildReport:
    indexed: int
    dropped: list[str]


class MpcIndex:
    """Query-log completion index. Build offline, serve lookups online."""

    def __init__(self, queries: list[IndexedQuery], k: int = 50):
        self.k = k
        self.queries = queries
        self._trie = Trie()
        for q in queries:
            self._trie.insert(q.text, q)
        self._trie.freeze(sort_key=lambda q: (-q.frequency, q.text), cap=k)

    @classmethod
    def build(
        cls,
        grammar: Grammar,
        store: LexiconStore,
        entries,
        k: int = 50,
    ) -> tuple["MpcIndex", MpcBuildReport]:
        by_text: dict[str, int] = {}
        for e in entries:
            text = _normalize(e.text)
            by_text[text] = by_text.get(text, 0) + e.frequency
        queries: list[IndexedQuery] = []
        dropped: list[str] = []
        for text, freq in by_text.items():
            results = parse(grammar, store, text)
            if not results:
                dropped.append(text)
                continue
            queries.append(IndexedQuery(text, freq, results[0].derivation))
        return cls(queries, k=k), MpcBuildReport(len(queries), dropped)

    def complete(self, prefix: str, k: Optional[int] = None) -> list[Completion]:
        k = self.k if k is None else min(k, self.k)
        key = _normalize(prefix)
        if prefix and prefix[-1].isspace() and key:
            key += " "
        hits = self._trie.candidates(key, k)
        ntok = len(tokenize(prefix))
        cursor = max(0, ntok - 1)
        out = []
        for q in hits:
            dtype = q.derivation.type_at(min(cursor, len(q.derivation.tokens) - 1))
            if dtype is None:
                continue
            out.append(
                Completion(
                    completion=q.text,
                    interpretation=q.derivation.formula,
                    dtype=dtype,
                    grade=Grade.HIGH,
                    score=float(q.frequency),
                    source="mpc",
                )
            )
        return out
