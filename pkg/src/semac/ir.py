"""Intermediate representation: atoms, formulas, derivations, completions.

The IR is a first-order-logic fragment: conjunctions, disjunctions and
negations of field-operator-value atoms. All values are immutable and
hashable so they can be used as deduplication keys and shared freely
between threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field
from typing import Optional, Union

OPS = ("=", "<", ">", "<=", ">=", "!=", "CONTAINS")
ORDER_OPS = ("<", ">", "<=", ">=")

TEMPORAL_UNITS = ("DAY", "WEEK", "MONTH", "YEAR")

VALUE_KINDS = ("enum", "numeric", "date", "string", "boolean")


class Grade(enum.IntEnum):
    """Qualitative completion score, comparable across algorithms."""

    LOW = 0
    MEDIUM = 1
    HIGH = 2


# ---------------------------------------------------------------------------
# Values


@dataclass(frozen=True)
class EnumValue:
    id: str

    def serialize(self) -> str:
        return self.id


@dataclass(frozen=True)
class NumericValue:
    # magnitude None marks a placeholder produced by ellipsis completions
    # ("market cap > ... usd"), where the user has not typed the number yet.
    magnitude: Optional[float]
    unit: Optional[str] = None

    def serialize(self) -> str:
        if self.magnitude is None:
            mag = "?"
        elif float(self.magnitude).is_integer():
            mag = str(int(self.magnitude))
        else:
            mag = repr(float(self.magnitude))
        if self.unit:
            return f"{mag}({self.unit})"
        return mag


@dataclass(frozen=True)
class ExactDate:
    """Calendar date; -1 marks an unspecified component."""

    day: int
    month: int
    year: int

    def __post_init__(self):
        if self.day == self.month == self.year == -1:
            raise ValueError("ExactDate needs at least one specified component")
        if self.day != -1 and not 1 <= self.day <= 31:
            raise ValueError(f"day out of range: {self.day}")
        if self.month != -1 and not 1 <= self.month <= 12:
            raise ValueError(f"month out of range: {self.month}")
        if self.year != -1 and not 1 <= self.year <= 9999:
            raise ValueError(f"year out of range: {self.year}")

    @property
    def fully_specified(self) -> bool:
        return -1 not in (self.day, self.month, self.year)

    def serialize(self) -> str:
        return f"EXACT_DATE({self.day},{self.month},{self.year})"


@dataclass(frozen=True)
class RelativeTime:
    """Time obtained by adding ``n`` units to the anchor expression."""

    n: int
    unit: str
    anchor: str = "NOW"

    def __post_init__(self):
        if self.unit not in TEMPORAL_UNITS:
            raise ValueError(f"bad temporal unit: {self.unit}")

    def serialize(self) -> str:
        return f"RELATIVE_TIME({self.n},{self.unit},{self.anchor})"


@dataclass(frozen=True)
class StringValue:
    text: str

    def serialize(self) -> str:
        return f'"{self.text}"'


@dataclass(frozen=True)
class BooleanValue:
    flag: bool

    def serialize(self) -> str:
        return "TRUE" if self.flag else "FALSE"


Value = Union[EnumValue, NumericValue, ExactDate, RelativeTime, StringValue, BooleanValue]


# ---------------------------------------------------------------------------
# Field descriptors


@dataclass(frozen=True)
class FieldDescriptor:
    id: str
    value_kind: str  # enum | numeric | date | string | boolean
    compatible_units: frozenset[str] = frozenset()
    enum_domain: frozenset[str] = frozenset()
    value_type: Optional[str] = None  # semantic type id for enum fields

    def __post_init__(self):
        if self.value_kind not in VALUE_KINDS:
            raise ValueError(f"field {self.id} has unknown kind {self.value_kind!r}")
        if self.value_kind == "enum" and not self.enum_domain:
            raise ValueError(f"enum field {self.id} needs a non-empty enum_domain")
        if self.value_kind != "enum" and self.enum_domain:
            raise ValueError(f"non-enum field {self.id} must not declare enum_domain")
        if self.value_kind != "numeric" and self.compatible_units:
            raise ValueError(f"non-numeric field {self.id} must not declare units")


# ---------------------------------------------------------------------------
# Atoms and formulas


@dataclass(frozen=True)
class Atom:
    field: str
    op: str
    value: Value
    negated: bool = False

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"bad operator: {self.op}")

    def serialize(self) -> str:
        if self.op == "CONTAINS":
            body = f"{self.field} CONTAINS {self.value.serialize()}"
        else:
            body = f"{self.field}{self.op}{self.value.serialize()}"
        if self.negated:
            return f"NOT({body})"
        return body

    def sort_key(self) -> tuple:
        return (self.field, self.op, self.value.serialize(), self.negated)


@dataclass(frozen=True)
class AtomF:
    atom: Atom

    def serialize(self) -> str:
        return self.atom.serialize()


@dataclass(frozen=True)
class And:
    children: tuple["Formula", ...]

    def serialize(self) -> str:
        return "AND(" + ", ".join(c.serialize() for c in self.children) + ")"


@dataclass(frozen=True)
class Or:
    children: tuple["Formula", ...]

    def serialize(self) -> str:
        return "OR(" + ", ".join(c.serialize() for c in self.children) + ")"


@dataclass(frozen=True)
class Not:
    child: "Formula"

    def serialize(self) -> str:
        return f"NOT({self.child.serialize()})"


Formula = Union[AtomF, And, Or, Not]


def conjoin(formulas: list[Formula]) -> Optional[Formula]:
    """And-combine a list of formulas, flattening; None for the empty list."""
    parts: list[Formula] = []
    for f in formulas:
        if isinstance(f, And):
            parts.extend(f.children)
        else:
            parts.append(f)
    if not parts:
        return None
    if len(parts) == 1:
        return parts[0]
    return And(tuple(parts))


def assemble_formula(atoms: list[Atom], or_links: tuple[bool, ...] = ()) -> Optional[Formula]:
    """Combine atoms into a formula: consecutive or-linked atoms form an OR
    group; groups are conjoined."""
    if not atoms:
        return None
    links = tuple(or_links) + (False,) * (len(atoms) - len(or_links))
    groups: list[list[Atom]] = []
    for atom, linked in zip(atoms, links):
        if linked and groups:
            groups[-1].append(atom)
        else:
            groups.append([atom])
    parts: list[Formula] = [
        AtomF(g[0]) if len(g) == 1 else Or(tuple(AtomF(a) for a in g)) for g in groups
    ]
    return conjoin(parts)


def atoms_of(f: Optional[Formula]) -> list[Atom]:
    """All atom occurrences in pre-order."""
    if f is None:
        return []
    if isinstance(f, AtomF):
        return [f.atom]
    if isinstance(f, Not):
        return atoms_of(f.child)
    out: list[Atom] = []
    for c in f.children:
        out.extend(atoms_of(c))
    return out


def canonicalize(f: Optional[Formula]) -> Optional[Formula]:
    """Normalize a formula into a canonical, order-insensitive form.

    Flattens nested And/Or, folds Not(AtomF) into the atom's negated flag,
    removes double negation, sorts children by a total order on their
    serialized form and drops exact duplicates. For the conjunctive fragment,
    semantically equal formulas map to an identical canonical form.
    """
    if f is None:
        return None
    if isinstance(f, AtomF):
        return f
    if isinstance(f, Not):
        inner = canonicalize(f.child)
        if isinstance(inner, AtomF):
            return AtomF(
                Atom(inner.atom.field, inner.atom.op, inner.atom.value, not inner.atom.negated)
            )
        if isinstance(inner, Not):
            return canonicalize(inner.child)
        return Not(inner)
    cls = And if isinstance(f, And) else Or
    flat: list[Formula] = []
    for c in f.children:
        cc = canonicalize(c)
        if isinstance(cc, cls):
            flat.extend(cc.children)
        else:
            flat.append(cc)
    seen = {}
    for c in flat:
        seen.setdefault(c.serialize(), c)
    uniq = [seen[k] for k in sorted(seen)]
    if len(uniq) == 1:
        return uniq[0]
    return cls(tuple(uniq))


def canonical_key(f: Optional[Formula]) -> str:
    """Deterministic serialization of the canonical form; the dedup key."""
    c = canonicalize(f)
    return "" if c is None else c.serialize()


# ---------------------------------------------------------------------------
# Diversification types


def atom_type(a: Atom) -> str:
    """Diversification type of an atom.

    For (field op value) atoms this is the field on the left-hand side;
    negation does not change it.
    """
    return a.field


# ---------------------------------------------------------------------------
# Derivations


@dataclass(frozen=True)
class SpannedAtom:
    atom: Atom
    start: int  # token index, inclusive
    end: int  # token index, exclusive

    def __post_init__(self):
        if self.end <= self.start:
            raise ValueError("empty atom span")


@dataclass(frozen=True)
class Derivation:
    """Parse result: a formula plus token spans for each atom occurrence.

    ``or_links[i]`` is True when atom ``i`` is disjoined with atom ``i-1``
    (they belong to one OR group) rather than conjoined.
    """

    formula: Optional[Formula]
    spanned: tuple[SpannedAtom, ...]
    tokens: tuple[str, ...]
    or_links: tuple[bool, ...] = ()

    def rightmost_atom_type(self) -> Optional[str]:
        if not self.spanned:
            return None
        best = max(self.spanned, key=lambda s: (s.end, s.start))
        return atom_type(best.atom)

    def type_at(self, token_index: int) -> Optional[str]:
        """Type of the atom whose span covers ``token_index``.

        Falls back to the nearest atom starting at or after the index, then
        the rightmost atom: this mirrors "the constraint currently being
        typed" when the cursor sits on filler between atoms.
        """
        if not self.spanned:
            return None
        for s in self.spanned:
            if s.start <= token_index < s.end:
                return atom_type(s.atom)
        after = [s for s in self.spanned if s.start >= token_index]
        if after:
            return atom_type(min(after, key=lambda s: s.start).atom)
        return self.rightmost_atom_type()


def rightmost_atom_type(d: Derivation) -> Optional[str]:
    return d.rightmost_atom_type()


# ---------------------------------------------------------------------------
# Completions


@dataclass(frozen=True)
class Completion:
    completion: str
    interpretation: Formula
    dtype: str
    grade: Grade
    score: float = 0.0
    source: str = ""
    meta: tuple = dc_field(default_factory=tuple)

    def __post_init__(self):
        if self.interpretation is None:
            raise ValueError("completion interpretation must be non-empty")

    def key(self) -> str:
        return canonical_key(self.interpretation)
