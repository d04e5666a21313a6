"""Offline evaluation: match predicates, reciprocal rank, latency stats.

A completer is judged by replaying withheld queries keystroke by keystroke:
for every character prefix (of a minimum length) the suggestions are
compared against the withheld query under a family of match predicates of
increasing leniency, and ranks are aggregated into mean reciprocal rank.

Predicates (each partial predicate is implied by its full counterpart):

* STR  — the suggestion string equals the withheld query.
* PSTR — the suggestion string is a prefix of the withheld query.
* BOW  — equal token multisets (word order ignored).
* PBOW — the suggestion's token multiset is contained in the query's.
* SEM  — canonically equal interpretations.
* PSEM — every atom of the suggestion's interpretation occurs in the
         query's interpretation.
"""

from __future__ import annotations

import json
import math
import statistics
import time
from collections import Counter
from dataclasses import dataclass, field as dc_field
from typing import Callable, Iterable, Optional

from .grammar import Grammar, parse
from .ir import Completion, Formula, atoms_of, canonical_key, canonicalize
from .lexicon import LexiconStore


def _norm(s: str) -> str:
    return " ".join(s.lower().split())


@dataclass(frozen=True)
class EvalTarget:
    text: str
    formula: Optional[Formula]

    @property
    def tokens(self) -> Counter:
        return Counter(_norm(self.text).split())

    @property
    def atom_keys(self) -> Counter:
        if self.formula is None:
            return Counter()
        return Counter(a.serialize() for a in atoms_of(canonicalize(self.formula)))


def match_str(c: Completion, t: EvalTarget) -> bool:
    return _norm(c.completion) == _norm(t.text)


def match_pstr(c: Completion, t: EvalTarget) -> bool:
    return _norm(t.text).startswith(_norm(c.completion))


def match_bow(c: Completion, t: EvalTarget) -> bool:
    return Counter(_norm(c.completion).split()) == t.tokens


def match_pbow(c: Completion, t: EvalTarget) -> bool:
    return Counter(_norm(c.completion).split()) <= t.tokens


def match_sem(c: Completion, t: EvalTarget) -> bool:
    if t.formula is None:
        return False
    return canonical_key(c.interpretation) == canonical_key(t.formula)


def match_psem(c: Completion, t: EvalTarget) -> bool:
    if t.formula is None:
        return False
    mine = Counter(a.serialize() for a in atoms_of(canonicalize(c.interpretation)))
    return mine <= t.atom_keys


PREDICATES: dict[str, Callable[[Completion, EvalTarget], bool]] = {
    "STR": match_str,
    "PSTR": match_pstr,
    "BOW": match_bow,
    "PBOW": match_pbow,
    "SEM": match_sem,
    "PSEM": match_psem,
}

# (full, partial) pairs reported side by side
PREDICATE_PAIRS = (("STR", "PSTR"), ("BOW", "PBOW"), ("SEM", "PSEM"))


def reciprocal_rank(
    completions: list[Completion],
    target: EvalTarget,
    predicate: Callable[[Completion, EvalTarget], bool],
) -> float:
    for i, c in enumerate(completions, start=1):
        if predicate(c, target):
            return 1.0 / i
    return 0.0


def query_prefixes(text: str, min_len: int = 3) -> list[str]:
    """All character prefixes of length >= min_len, excluding the full text."""
    text = text.rstrip()
    return [text[:i] for i in range(min_len, len(text))]


@dataclass
class EvalReport:
    mrr: dict  # predicate -> float
    queries: int
    prefixes: int
    mode: str
    min_prefix: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "mode": self.mode,
                "min_prefix": self.min_prefix,
                "queries": self.queries,
                "prefixes": self.prefixes,
                "mrr": {k: round(v, 6) for k, v in sorted(self.mrr.items())},
            },
            indent=2,
        )


def evaluate(
    completer: Callable[[str], list[Completion]],
    grammar: Grammar,
    store: LexiconStore,
    queries: Iterable[str],
    *,
    predicates: Optional[list[str]] = None,
    min_prefix: int = 3,
    mode: str = "prefix",  # "prefix": uniform over prefixes; "query": per-query average
) -> EvalReport:
    if mode not in ("prefix", "query"):
        raise ValueError("mode must be 'prefix' or 'query'")
    names = predicates or list(PREDICATES)
    for name in names:
        if name not in PREDICATES:
            raise ValueError(f"unknown predicate {name!r}")
    per_query: dict[str, list[list[float]]] = {n: [] for n in names}
    nqueries = 0
    nprefixes = 0
    for text in queries:
        results = parse(grammar, store, text)
        target = EvalTarget(text, results[0].formula if results else None)
        prefixes = query_prefixes(text, min_prefix)
        if not prefixes:
            continue
        nqueries += 1
        nprefixes += len(prefixes)
        rrs: dict[str, list[float]] = {n: [] for n in names}
        for p in prefixes:
            completions = completer(p)
            for n in names:
                rrs[n].append(reciprocal_rank(completions, target, PREDICATES[n]))
        for n in names:
            per_query[n].append(rrs[n])
    mrr = {}
    for n in names:
        if mode == "prefix":
            flat = [rr for qs in per_query[n] for rr in qs]
            mrr[n] = sum(flat) / len(flat) if flat else 0.0
        else:
            means = [sum(qs) / len(qs) for qs in per_query[n] if qs]
            mrr[n] = sum(means) / len(means) if means else 0.0
    return EvalReport(mrr=mrr, queries=nqueries, prefixes=nprefixes, mode=mode, min_prefix=min_prefix)


# ---------------------------------------------------------------------------
# Latency


def percentile(values: list[float], p: float) -> float:
    """Nearest-rank percentile; p in (0, 100]."""
    if not values:
        raise ValueError("no values")
    if not 0 < p <= 100:
        raise ValueError("p must be in (0, 100]")
    ordered = sorted(values)
    rank = math.ceil(p / 100.0 * len(ordered))
    return ordered[rank - 1]


@dataclass
class LatencyReport:
    calls: int
    mean_ms: float
    p50_ms: float
    p90_ms: float
    p95_ms: float
    p99_ms: float
    max_ms: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "calls": self.calls,
                "mean_ms": round(self.mean_ms, 3),
                "p50_ms": round(self.p50_ms, 3),
                "p90_ms": round(self.p90_ms, 3),
                "p95_ms": round(self.p95_ms, 3),
                "p99_ms": round(self.p99_ms, 3),
                "max_ms": round(self.max_ms, 3),
            },
            indent=2,
        )


def measure_latency(completer: Callable[[str], object], prefixes: Iterable[str]) -> LatencyReport:
    samples: list[float] = []
    for p in prefixes:
        t0 = time.perf_counter()
        completer(p)
        samples.append((time.perf_counter() - t0) * 1000.0)
    if not samples:
        raise ValueError("no prefixes to measure")
    return LatencyReport(
        calls=len(samples),
        mean_ms=statistics.fmean(samples),
        p50_ms=percentile(samples, 50),
        p90_ms=percentile(samples, 90),
        p95_ms=percentile(samples, 95),
        p99_ms=percentile(samples, 99),
        max_ms=max(samples),
    )


# ---------------------------------------------------------------------------
# Soundness helpers


def is_syntactic_extension(prefix: str, completion: str) -> bool:
    """Token-partition soundness: every typed token reappears in order, the
    last one possibly as a character prefix of its completion token."""
    ptoks = _norm(prefix).split()
    ctoks = _norm(completion).split()
    if not ptoks:
        return True
    if len(ctoks) < len(ptoks):
        return False
    for a, b in zip(ptoks[:-1], ctoks[: len(ptoks) - 1]):
        if a != b:
            return False
    return ctoks[len(ptoks) - 1].startswith(ptoks[-1])
