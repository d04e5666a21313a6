"""Atom-level completion.

The unfinished query is decomposed into a fully understood initial segment
and an unrecognized remainder; the remainder is matched against a trie of
atoms harvested from the query log, and matching atoms are scored by how
well the words of the initial segment predict them. This completes queries
never seen whole in the log, as long as their building blocks were.

The atom model stores, per atom occurrence surface:

* the atom (with its interpretation),
* a popularity count (sum of log frequencies of queries containing it),
* a context vector: for every word appearing to the left of the atom in
  some logged query, the frequency-weighted number of such co-occurrences.

A candidate atom A is scored against initial segment ``i_p`` as

    S(A, i_p) = h( sum over words w of i_p of f(context_A[w]) )

with f(c) = ln(1 + c) and h the identity, so atoms that habitually follow
the words the user already typed rank first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Optional

from .grammar import Decomposition, Grammar, backtrack, decompose, parse
from .ir import AtomF, Completion, Formula, Grade, assemble_formula, atom_type
from .lexicon import LexiconStore
from .trie import Trie


def context_feature(count: float) -> float:
    """f: contribution of one context-word count."""
    return math.log1p(count)


def aggregate_score(total: float) -> float:
    """h: monotone transform of the summed context features."""
    return total


@dataclass
class AtomRecord:
    surface: str  # normalized token text of the atom occurrence
    formula: Formula  # single-atom formula
    dtype: str
    count: int = 0
    context: dict = dc_field(default_factory=dict)

    def score(self, words: Iterable[str]) -> float:
        total = 0.0
        for w in words:
            c = self.context.get(w)
            if c:
                total += context_feature(c)
        return aggregate_score(total)


@dataclass
class AtomModelReport:
    parsed: int
    dropped: list[str]
    truncated: int


class AtomModel:
    def __init__(self, records: list[AtomRecord]):
        self.records = records
        self._trie = Trie()
        for r in records:
            self._trie.insert(r.surface, r)
        self._trie.freeze(sort_key=lambda r: (-r.count, r.surface, r.dtype), cap=None)

    def candidates(self, match: str, limit: int) -> list[AtomRecord]:
        return self._trie.candidates(" ".join(match.lower().split()), limit)

    def count_matching(self, match: str) -> int:
        return len(self._trie.candidates(" ".join(match.lower().split()), None) or [])

    def strict_prefix_count(self, surface: str) -> int:
        """Atoms whose surface strictly extends ``surface``."""
        key = " ".join(surface.lower().split())
        below = self._trie.candidates(key, None) or []
        return sum(1 for r in below if r.surface != key)

    def __len__(self) -> int:
        return len(self.records)


def build_atom_model(
    grammar: Grammar,
    store: LexiconStore,
    entries,
    *,
    max_records: int = 100_000,
) -> tuple[AtomModel, AtomModelReport]:
    """Harvest atoms and context vectors from a query log."""
    by_key: dict[tuple[str, str], AtomRecord] = {}
    parsed = 0
    dropped: list[str] = []
    for e in entries:
        results = parse(grammar, store, e.text)
        if not results:
            dropped.append(e.text)
            continue
        parsed += 1
        der = results[0].derivation
        for sa in der.spanned:
            surface = " ".join(der.tokens[sa.start : sa.end])
            formula = AtomF(sa.atom)
            key = (surface, formula.serialize())
            rec = by_key.get(key)
            if rec is None:
                rec = AtomRecord(surface, formula, atom_type(sa.atom))
                by_key[key] = rec
            rec.count += e.frequency
            for w in der.tokens[: sa.start]:
                rec.context[w] = rec.context.get(w, 0) + e.frequency
    records = sorted(by_key.values(), key=lambda r: (-r.count, r.surface))
    truncated = max(0, len(records) - max_records)
    records = records[:max_records]
    return AtomModel(records), AtomModelReport(parsed, dropped, truncated)


@dataclass(frozen=True)
class AtomicConfig:
    improvement_ratio: float = 10.0  # backtrack while matches grow this much
    prefix_backtrack_threshold: int = 0  # strict-prefix count triggering case A
    juxtaposition_whitelist: frozenset = frozenset()  # dtypes repeatable side by side
    candidate_pool: int = 500
    disjunction_token: str = "or"


class AtomicEngine:
    def __init__(
        self,
        model: AtomModel,
        grammar: Grammar,
        store: LexiconStore,
        config: AtomicConfig = AtomicConfig(),
    ):
        self.model = model
        self.grammar = grammar
        self.store = store
        self.config = config

    # -- decomposition adjustment -------------------------------------------

    def _adjust(self, dec: Decomposition) -> Decomposition:
        cfg = self.config
        # Case A: nothing unrecognized, but the last recognized atom is also
        # the beginning of longer atoms ("b" parsing as a rating while the
        # user is typing "bullet bonds"): reopen it.
        if not dec.remainder and dec.derivation.spanned:
            spans = sorted(dec.derivation.spanned, key=lambda s: (s.start, s.end))
            last = spans[-1]
            surface = " ".join(dec.derivation.tokens[last.start : last.end])
            if self.model.strict_prefix_count(surface) > cfg.prefix_backtrack_threshold:
                dec = backtrack(self.grammar, self.store, dec, 1)
        # Case B: the remainder matches almost nothing, but pulling atoms
        # back from the initial segment multiplies the matches. With no
        # remainder at all there is nothing to rescue: suggesting the next
        # atom outranks re-suggesting what is already typed.
        while dec.remainder and dec.derivation.spanned:
            current = self.model.count_matching(dec.remainder)
            moved = backtrack(self.grammar, self.store, dec, 1)
            if not moved.remainder:
                break
            new = self.model.count_matching(moved.remainder)
            if new > current * cfg.improvement_ratio and new > 0:
                dec = moved
                continue
            break
        return dec

    # -- completion ---------------------------------------------------------

    def complete(self, prefix: str, k: int = 10) -> list[Completion]:
        if k <= 0:
            raise ValueError("k must be positive")
        cfg = self.config
        dec = decompose(self.grammar, self.store, prefix)
        dec = self._adjust(dec)
        remainder = dec.remainder
        disjunct = False
        rtoks = remainder.split()
        if rtoks and rtoks[0] == cfg.disjunction_token:
            disjunct = True
            remainder = " ".join(rtoks[1:])
        pool = self.model.candidates(remainder, cfg.candidate_pool)
        if not pool:
            return []
        context_words = list(dec.derivation.tokens)
        rightmost = dec.derivation.rightmost_atom_type()
        buckets: dict[str, list[tuple[float, AtomRecord]]] = {}
        for rec in pool:
            if (
                not disjunct
                and rightmost is not None
                and rec.dtype == rightmost
                and rec.dtype not in cfg.juxtaposition_whitelist
            ):
                continue
            buckets.setdefault(rec.dtype, []).append((rec.score(context_words), rec))
        for items in buckets.values():
            items.sort(key=lambda t: (-t[0], -t[1].count, t[1].surface))
        ordered_buckets = sorted(
            buckets.values(),
            key=lambda items: (-items[0][0], -items[0][1].count, items[0][1].surface),
        )
        out: list[Completion] = []
        base = dec.initial_text
        row = 0
        while len(out) < k:
            emitted = False
            for items in ordered_buckets:
                if row < len(items):
                    score, rec = items[row]
                    out.append(self._completion(base, disjunct, dec, rec, score))
                    emitted = True
                    if len(out) >= k:
                        break
            if not emitted:
                break
            row += 1
        return out

    def _completion(
        self,
        base: str,
        disjunct: bool,
        dec: Decomposition,
        rec: AtomRecord,
        score: float,
    ) -> Completion:
        parts = [base] if base else []
        if disjunct:
            parts.append(self.config.disjunction_token)
        parts.append(rec.surface)
        text = " ".join(parts)
        # extend the initial segment's derivation by one atom; a disjunct
        # or-links it to the last typed atom, exactly as re-parsing would
        der = dec.derivation
        atoms = [sa.atom for sa in der.spanned] + [rec.formula.atom]
        links = tuple(der.or_links) + (disjunct and bool(der.spanned),)
        interpretation = assemble_formula(atoms, links)
        return Completion(
            completion=text,
            interpretation=interpretation,
            dtype=rec.dtype,
            grade=Grade.HIGH,
            score=score,
            source="atomic",
            meta=(("atom_surface", rec.surface), ("atom_count", rec.count)),
        )
