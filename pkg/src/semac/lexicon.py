"""Trie-backed lexicons mapping surface phrases to semantic identifiers.

Keys are lowercase, single-space-joined surface forms; queried prefixes are
normalized the same way. Derived lexicons (tag filters, per-semantic-type
sub-lexicons) are logical views built at initialization and share entry
objects with their source.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional

from .domain import DomainConfigError, DomainDefinition
from .trie import Trie


@dataclass(frozen=True)
class LexiconEntry:
    surface: tuple[str, ...]  # token sequence, lowercased
    target: str
    tags: frozenset[str] = frozenset()
    weight: float = 1.0

    @property
    def key(self) -> str:
        return " ".join(self.surface)


def _normalize_surface(s: str) -> tuple[str, ...]:
    return tuple(s.lower().split())


class Lexicon:
    def __init__(self, name: str, entries: Iterable[LexiconEntry] = ()):
        self.name = name
        self.entries: list[LexiconEntry] = []
        self._trie = Trie()
        for e in entries:
            self.add(e)
        self._frozen = False

    def add(self, entry: LexiconEntry) -> None:
        if not entry.surface:
            raise ValueError("lexicon entry surface must be non-empty")
        self.entries.append(entry)
        self._trie.insert(entry.key, entry)

    def freeze(self) -> "Lexicon":
        # weight descending, then lexicographic, for deterministic ranking
        self._trie.freeze(sort_key=lambda e: (-e.weight, e.key))
        self._frozen = True
        return self

    def __len__(self) -> int:
        return len(self.entries)

    # -- lookups ------------------------------------------------------------

    def prefix_match(self, s: str, limit: int) -> list[LexiconEntry]:
        """Entries whose surface starts (character-wise) with ``s``."""
        if limit <= 0:
            raise ValueError("limit must be positive")
        key = " ".join(s.lower().split())
        if not self._frozen:
            self.freeze()
        return self._trie.candidates(key, limit)

    def exact(self, s: str) -> list[LexiconEntry]:
        return self._trie.exact(" ".join(s.lower().split()))

    def trie_node(self, key: str):
        return self._trie.node(key)

    def root_node(self):
        return self._trie.root

    def walk_chars(self, key: str) -> int:
        return self._trie.walk(key)

    # -- derived views ------------------------------------------------------

    def derive_view(self, predicate: Callable[[LexiconEntry], bool], name: Optional[str] = None) -> "Lexicon":
        view = Lexicon(name or f"{self.name}:view", (e for e in self.entries if predicate(e)))
        return view.freeze()

    def sub_lexicon_by_type(self, domain: DomainDefinition, type_id: str) -> "Lexicon":
        values = domain.values_of_type(type_id)  # raises on unknown type
        return self.derive_view(lambda e: e.target in values, name=f"{self.name}:{type_id}")

    def restrict_targets(self, targets: frozenset[str], name: Optional[str] = None) -> "Lexicon":
        return self.derive_view(lambda e: e.target in targets, name=name)


class LexiconLoadError(Exception):
    pass


def load_lexicon(path, name: Optional[str] = None) -> Lexicon:
    """Load a line-delimited lexicon: surface<TAB>target<TAB>tags<TAB>weight."""
    path = Path(path)
    lex = Lexicon(name or path.stem)
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise LexiconLoadError(f"{path}:{lineno}: expected 4 tab-separated fields")
        surface, target, tags, weight = parts
        try:
            w = float(weight)
        except ValueError:
            raise LexiconLoadError(f"{path}:{lineno}: bad weight {weight!r}") from None
        if w < 0:
            raise LexiconLoadError(f"{path}:{lineno}: negative weight")
        lex.add(
            LexiconEntry(
                surface=_normalize_surface(surface),
                target=target,
                tags=frozenset(t for t in tags.split(",") if t),
                weight=w,
            )
        )
    return lex.freeze()


class LexiconStore:
    """Named lexicons for one domain, with cached type-restricted views."""

    def __init__(self, domain: DomainDefinition, lexicons: dict[str, Lexicon]):
        self.domain = domain
        self.lexicons = dict(lexicons)
        self._typed_views: dict[tuple[str, str], Lexicon] = {}

    def get(self, name: str) -> Lexicon:
        try:
            return self.lexicons[name]
        except KeyError:
            raise DomainConfigError(f"unknown lexicon: {name}") from None

    def typed_view(self, name: str, type_id: str) -> Lexicon:
        key = (name, type_id)
        if key not in self._typed_views:
            self._typed_views[key] = self.get(name).sub_lexicon_by_type(self.domain, type_id)
        return self._typed_views[key]
