"""Semantic auto-completion for natural-language query interfaces.

Completes unfinished queries to phrases the system can fully interpret,
returning each suggestion together with its logical interpretation. Three
complementary algorithms — most-popular-completion over a query log,
atom-level completion over decomposed prefixes, and template-driven
enumeration — run under a shared coordinator that deduplicates, grades and
diversifies the merged list.
"""

from .ir import (
    And,
    Atom,
    AtomF,
    BooleanValue,
    Completion,
    Derivation,
    EnumValue,
    ExactDate,
    FieldDescriptor,
    Formula,
    Grade,
    Not,
    NumericValue,
    Or,
    RelativeTime,
    SpannedAtom,
    StringValue,
    atom_type,
    atoms_of,
    canonical_key,
    canonicalize,
    conjoin,
)

__version__ = "0.1.0"

__all__ = [
    "And",
    "Atom",
    "AtomF",
    "BooleanValue",
    "Completion",
    "Derivation",
    "EnumValue",
    "ExactDate",
    "FieldDescriptor",
    "Formula",
    "Grade",
    "Not",
    "NumericValue",
    "Or",
    "RelativeTime",
    "SpannedAtom",
    "StringValue",
    "atom_type",
    "atoms_of",
    "canonical_key",
    "canonicalize",
    "conjoin",
]
