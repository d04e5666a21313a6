"""Query logs: storage format, freshness normalization, synthesis.

A log is a list of (query text, submission date, frequency) records stored
one per line as ``text<TAB>YYYY-MM-DD<TAB>frequency``.

Freshness normalization rewrites explicit dates inside logged queries so
that old queries remain useful suggestions: every fully specified date in a
query is advanced by the same calendar distance that separates the query's
submission date from the present, component-wise over years, months and
days, clamping to month ends when the day does not exist in the target
month. Queries whose dates are not fully specified (a bare year, a month
and year) are left untouched.
"""

from __future__ import annotations

import calendar
import datetime as dt
import random
from dataclasses import dataclass, replace as dc_replace
from pathlib import Path
from typing import Iterable, Optional

from .grammar import (
    Alt,
    CompatibleUnitConstraint,
    CompatibleValueConstraint,
    Completable,
    DateTok,
    Grammar,
    Kleene,
    LexRef,
    Lit,
    Mark,
    NegMatch,
    NumberTok,
    OpMatch,
    Opt,
    Ref,
    Seq,
    SetSlot,
    YearTok,
    parse,
)
from .ir import ExactDate, atoms_of
from .lexicon import LexiconStore
from .textscan import tokenize
from .valueparsers import MONTH_NAMES, MONTHS, PARSERS


class QueryLogError(Exception):
    pass


@dataclass(frozen=True)
class LogEntry:
    text: str
    date: dt.date
    frequency: int

    def __post_init__(self):
        if self.frequency <= 0:
            raise ValueError("frequency must be positive")


def load_log(path) -> list[LogEntry]:
    path = Path(path)
    out: list[LogEntry] = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise QueryLogError(f"{path}:{lineno}: expected 3 tab-separated fields")
        text, datestr, freqstr = parts
        try:
            date = dt.date.fromisoformat(datestr)
        except ValueError:
            raise QueryLogError(f"{path}:{lineno}: bad date {datestr!r}") from None
        try:
            freq = int(freqstr)
        except ValueError:
            raise QueryLogError(f"{path}:{lineno}: bad frequency {freqstr!r}") from None
        if freq <= 0:
            raise QueryLogError(f"{path}:{lineno}: frequency must be positive")
        out.append(LogEntry(text.strip(), date, freq))
    return out


def save_log(entries: Iterable[LogEntry], path) -> None:
    path = Path(path)
    lines = [f"{e.text}\t{e.date.isoformat()}\t{e.frequency}" for e in entries]
    path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


# ---------------------------------------------------------------------------
# Freshness normalization


@dataclass(frozen=True)
class ShiftResult:
    date: dt.date
    clamped: bool  # day was pulled back to the target month's last day


def shift_date(d: dt.date, t_q: dt.date, t_now: dt.date) -> ShiftResult:
    """Advance ``d`` by the calendar distance from ``t_q`` to ``t_now``.

    Year and month deltas are applied with month normalization; the day
    delta is then added and the result clamped into the target month.
    """
    dy = t_now.year - t_q.year
    dm = t_now.month - t_q.month
    dd = t_now.day - t_q.day
    total_months = (d.year + dy) * 12 + (d.month - 1 + dm)
    year, month = divmod(total_months, 12)
    month += 1
    last = calendar.monthrange(year, month)[1]
    day = d.day + dd
    clamped = False
    if day > last:
        day = last
        clamped = True
    elif day < 1:
        day = 1
        clamped = True
    return ShiftResult(dt.date(year, month, day), clamped)


_DATE_FORMATS = (
    "{month} {day} , {year}",
    "{month} {day} {year}",
)


def _rewrite_date_text(span_text: str, old: ExactDate, new: dt.date) -> Optional[str]:
    """Replace the surface form of ``old`` inside ``span_text`` with ``new``,
    preserving the original layout (with/without comma, capitalization)."""
    toks = tokenize(span_text)
    texts = [t.text for t in toks]
    parser = PARSERS["date"]
    for i in range(len(texts)):
        m = parser.match_tokens(tuple(texts), i)
        if m is None:
            continue
        ntok, val = m
        if val != old:
            continue
        start = toks[i].start
        end = toks[i + ntok - 1].end
        month_name = MONTH_NAMES[new.month]
        if span_text[toks[i].start].isupper():
            month_name = month_name.capitalize()
        has_comma = any(texts[j] == "," for j in range(i, i + ntok))
        if has_comma:
            repl = f"{month_name} {new.day}, {new.year}"
        else:
            repl = f"{month_name} {new.day} {new.year}"
        return span_text[:start] + repl + span_text[end:]
    return None


@dataclass(frozen=True)
class ShiftedEntry:
    entry: LogEntry
    changed: bool
    clamped: bool


def time_shift_entry(
    grammar: Grammar,
    store: LexiconStore,
    entry: LogEntry,
    now: dt.date,
) -> ShiftedEntry:
    """Normalize the freshness of one log entry.

    Fully specified dates in the query are advanced by the entry's age;
    partially specified dates leave the entry untouched. The result carries
    ``now`` as its submission date.
    """
    results = parse(grammar, store, entry.text)
    if not results:
        return ShiftedEntry(dc_replace(entry, date=now), False, False)
    atoms = atoms_of(results[0].formula)
    targets = [a.value for a in atoms if isinstance(a.value, ExactDate) and a.value.fully_specified]
    if not targets:
        return ShiftedEntry(dc_replace(entry, date=now), False, False)
    text = entry.text
    changed = False
    clamped = False
    for old in targets:
        res = shift_date(dt.date(old.year, old.month, old.day), entry.date, now)
        clamped = clamped or res.clamped
        if res.date == dt.date(old.year, old.month, old.day):
            continue
        new_text = _rewrite_date_text(text, old, res.date)
        if new_text is not None:
            text = new_text
            changed = True
    return ShiftedEntry(LogEntry(text, now, entry.frequency), changed, clamped)


def time_shift_log(
    grammar: Grammar,
    store: LexiconStore,
    entries: Iterable[LogEntry],
    now: dt.date,
) -> list[ShiftedEntry]:
    return [time_shift_entry(grammar, store, e, now) for e in entries]


# ---------------------------------------------------------------------------
# Synthesis


class _Sampler:
    """Random surface realization of a grammar, for building synthetic logs."""

    def __init__(self, grammar: Grammar, store: LexiconStore, rng: random.Random):
        self.grammar = grammar
        self.store = store
        self.rng = rng

    def sample(self, max_depth: int = 12) -> str:
        words = self._node(Ref(self.grammar.root), max_depth)
        return " ".join(words)

    def _node(self, node, depth: int) -> list[str]:
        rng = self.rng
        if depth <= 0:
            return []
        if isinstance(node, Seq):
            out: list[str] = []
            for c in node.children:
                out.extend(self._node(c, depth))
            return out
        if isinstance(node, Alt):
            return self._node(rng.choice(node.children), depth)
        if isinstance(node, Opt):
            return self._node(node.child, depth) if rng.random() < 0.5 else []
        if isinstance(node, Kleene):
            count = 1 if node.min_one else 0
            while rng.random() < 0.35 and count < 3:
                count += 1
            out = []
            for i in range(count):
                if i > 0 and node.separator is not None:
                    out.extend(self._node(node.separator, depth - 1))
                out.extend(self._node(node.child, depth - 1))
            return out
        if isinstance(node, Lit):
            return list(rng.choice(node.options))
        if isinstance(node, OpMatch):
            words, _ = rng.choice(node.options)
            return list(words)
        if isinstance(node, NegMatch):
            return list(rng.choice(node.options))
        if isinstance(node, LexRef):
            lex = self.store.get(node.lexicon)
            if not lex.entries:
                return []
            weights = [e.weight for e in lex.entries]
            entry = rng.choices(lex.entries, weights=weights, k=1)[0]
            return list(entry.surface)
        if isinstance(node, Completable):
            return rng.choice(PARSERS[node.parser].sample_literals()).split()
        if isinstance(node, YearTok):
            return [str(rng.randint(2018, 2032))]
        if isinstance(node, DateTok):
            y = rng.randint(2018, 2032)
            m = rng.randint(1, 12)
            style = rng.random()
            if style < 0.4:
                return [str(y)]
            if style < 0.7:
                return [MONTH_NAMES[m], str(y)]
            d = rng.randint(1, 28)
            return [MONTH_NAMES[m], str(d), ",", str(y)]
        if isinstance(node, NumberTok):
            return [rng.choice(PARSERS["numeric"].sample_literals())]
        if isinstance(node, Ref):
            return self._node(self.grammar.prods[node.name].body, depth - 1)
        # Mark / SetSlot / compatibility constraints have no surface
        return []


def synthesize_log(
    grammar: Grammar,
    store: LexiconStore,
    n: int,
    *,
    seed: int = 0,
    now: Optional[dt.date] = None,
    max_attempts_per_query: int = 60,
) -> list[LogEntry]:
    """Generate ``n`` distinct parsable queries with Zipf-like frequencies.

    Deterministic for a fixed seed. Candidate texts are re-parsed and kept
    only when the grammar fully accepts them, so every synthesized entry is
    guaranteed to be interpretable.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    rng = random.Random(seed)
    now = now or dt.date.today()
    sampler = _Sampler(grammar, store, rng)
    texts: list[str] = []
    seen: set[str] = set()
    attempts = 0
    budget = n * max_attempts_per_query
    while len(texts) < n and attempts < budget:
        attempts += 1
        text = sampler.sample()
        if not text or text in seen:
            continue
        if not parse(grammar, store, text):
            continue
        seen.add(text)
        texts.append(text)
    if len(texts) < n:
        raise QueryLogError(
            f"could only synthesize {len(texts)} of {n} distinct parsable queries"
        )
    top = 1000.0
    out = []
    for rank, text in enumerate(texts, start=1):
        freq = max(1, int(round(top / rank)))
        day_offset = rng.randint(0, 365)
        out.append(LogEntry(text, now - dt.timedelta(days=day_offset), freq))
    return out
