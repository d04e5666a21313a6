"""Completability analysis.

Decides whether an unfinished query can still grow into something the
system fully understands, without producing any completions. A user
interface can flag a dead prefix the moment it goes wrong, pointing at the
first character past which no interpretation survives.
"""

from __future__ import annotations

from .grammar import CompletabilityResult, Grammar, completable
from .lexicon import LexiconStore

__all__ = ["CompletabilityResult", "analyze"]


def analyze(grammar: Grammar, store: LexiconStore, prefix: str) -> CompletabilityResult:
    """True when some extension of ``prefix`` is fully interpretable.

    On failure, ``dead_at`` is the character offset of the first position
    the grammar could not get past; everything before it still matched some
    viable path.
    """
    return completable(grammar, store, prefix)
