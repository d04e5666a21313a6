"""Walk one keystroke sequence through the whole completion stack.

Loads the bundled corporate-bond domain, then shows — for a prefix typed
character by character — what each engine proposes and how the coordinator
blends them into one graded, diversified list.

Run: python3 demos/01_complete_a_query.py
"""

import datetime as dt

from semac.domains import load_bundle
from semac.grammar import completable, decompose

PREFIX = "bullet bonds mat"


def main():
    bundle = load_bundle("bonds", now=dt.date.today())
    coord = bundle.coordinator()
    engines = bundle.engines()

    print(f"domain: {bundle.definition.id}  "
          f"({len(bundle.log)} logged queries, {len(bundle.atom_model)} harvested atoms)\n")

    print(f"typing {PREFIX!r}:\n")
    for i in range(3, len(PREFIX) + 1):
        p = PREFIX[:i]
        top = coord.complete(p, 3)
        shown = " | ".join(c.completion for c in top) or "(nothing)"
        print(f"  {p!r:24} -> {shown}")

    print(f"\nfull picture for {PREFIX!r}:")
    dec = decompose(bundle.grammar, bundle.store, PREFIX)
    print(f"  understood so far : {dec.initial_text!r}  ({dec.formula.serialize() if dec.formula else '-'})")
    print(f"  being typed       : {dec.remainder!r}")
    live = completable(bundle.grammar, bundle.store, PREFIX)
    print(f"  still completable : {live.completable}")

    print("\n  engine-by-engine:")
    for name, engine in engines.items():
        for c in engine.complete(PREFIX, 3):
            print(f"    [{name:8}] {c.completion!r:44} {c.grade.name:6} {c.interpretation.serialize()}")

    print("\n  coordinator (deduped, graded, diversified):")
    for c in coord.complete(PREFIX, 5):
        print(f"    {c.completion!r:46} {c.grade.name:6} {c.dtype:15} {c.interpretation.serialize()}")

    coord.close()


if __name__ == "__main__":
    main()
