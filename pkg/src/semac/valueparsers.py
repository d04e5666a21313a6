"""Built-in sub-parsers for infinite value spaces: numbers and dates.

Each parser supports two queries: full token matching (used while parsing
complete tokens) and prefix acceptance (used by the ``completable`` grammar
construct to decide whether an unfinished fragment can still grow into
something parsable).
"""

from __future__ import annotations

import re
from typing import Optional

from .ir import ExactDate

_NUM_FULL = re.compile(r"^\d{1,3}(,\d{3})*(\.\d+)?(k|m|mm|b|bn)?$|^\d+(\.\d+)?(k|m|mm|b|bn)?$")
_NUM_PREFIX = re.compile(r"^\d[\d,]*\.?\d*(k|m|mm|b|bn)?$")
_SUFFIX = {"k": 1e3, "m": 1e6, "mm": 1e6, "b": 1e9, "bn": 1e9}

MONTHS = {
    "january": 1, "february": 2, "march": 3, "april": 4, "may": 5, "june": 6,
    "july": 7, "august": 8, "september": 9, "october": 10, "november": 11,
    "december": 12,
}
MONTH_NAMES = {v: k for k, v in MONTHS.items()}


class NumericParser:
    name = "numeric"

    def parse_full(self, s: str) -> Optional[float]:
        s = s.lower().strip()
        if not _NUM_FULL.match(s):
            return None
        m = re.match(r"^([\d,.]+)([a-z]*)$", s)
        if not m:
            return None
        body, suffix = m.groups()
        try:
            mag = float(body.replace(",", ""))
        except ValueError:
            return None
        if suffix:
            if suffix not in _SUFFIX:
                return None
            mag *= _SUFFIX[suffix]
        return mag

    def accepts_prefix(self, fragment: str) -> bool:
        return bool(_NUM_PREFIX.match(fragment.lower()))

    def match_tokens(self, texts: tuple[str, ...], i: int) -> Optional[tuple[int, float]]:
        """Longest match starting at token ``i``; numbers are single tokens."""
        if i >= len(texts):
            return None
        mag = self.parse_full(texts[i])
        if mag is None:
            return None
        return 1, mag

    def sample_literals(self) -> list[str]:
        return ["2", "5", "10", "100", "2.5", "1,000,000"]


def _year(tok: str) -> Optional[int]:
    if re.match(r"^\d{4}$", tok) and 1800 <= int(tok) <= 2200:
        return int(tok)
    return None


def _day(tok: str) -> Optional[int]:
    if re.match(r"^\d{1,2}$", tok) and 1 <= int(tok) <= 31:
        return int(tok)
    return None


class DateParser:
    name = "date"

    def match_tokens(self, texts: tuple[str, ...], i: int) -> Optional[tuple[int, ExactDate]]:
        """Longest date match at token ``i``.

        Patterns (tokens): month day , year | month day year | month year |
        month day | year.
        """
        n = len(texts)
        if i >= n:
            return None
        if texts[i] in MONTHS:
            m = MONTHS[texts[i]]
            if i + 1 < n:
                d = _day(texts[i + 1])
                if d is not None:
                    if i + 3 < n and texts[i + 2] == "," and _year(texts[i + 3]) is not None:
                        return 4, ExactDate(d, m, _year(texts[i + 3]))
                    if i + 2 < n and _year(texts[i + 2]) is not None:
                        return 3, ExactDate(d, m, _year(texts[i + 2]))
                    return 2, ExactDate(d, m, -1)
                y = _year(texts[i + 1])
                if y is not None:
                    return 2, ExactDate(-1, m, y)
            return 1, ExactDate(-1, m, -1)
        y = _year(texts[i])
        if y is not None:
            return 1, ExactDate(-1, -1, y)
        return None

    def accepts_prefix(self, fragment: str) -> bool:
        f = fragment.lower()
        if any(name.startswith(f) for name in MONTHS):
            return True
        return bool(re.match(r"^\d{1,4}$", f))

    def sample_literals(self) -> list[str]:
        return ["2025", "march 3, 2026", "april 2027"]


PARSERS = {"numeric": NumericParser(), "date": DateParser()}
