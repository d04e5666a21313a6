"""What happens mid-number: ellipsis completions and prefix viability.

Infinite value spaces (magnitudes, dates) cannot be completed from a
lexicon. While the user is typing "2" of "2M", the template engine extends
the query with a placeholder ("market cap > 2... usd") that parses like any
other suggestion; the completability probe separately reports whether the
prefix can still grow into something the grammar understands, and where it
died when it cannot.

Run: python3 demos/03_unfinished_values.py
"""

from semac.domains import load_bundle
from semac.grammar import completable


CASES = [
    "tech companies with market cap > 2",      # mid-magnitude: ellipsis
    "tech companies with market cap > 2M u",   # complete magnitude, mid-unit
    "ibm's market c",                          # possessive the grammar lacks
]


def main():
    bundle = load_bundle("equities")
    template = bundle.engines()["template"]

    for prefix in CASES:
        print(f"prefix: {prefix!r}")
        live = completable(bundle.grammar, bundle.store, prefix)
        if live.completable:
            print("  completable: yes")
        else:
            print(f"  completable: no (dead at character {live.dead_at}: "
                  f"{prefix[:live.dead_at]!r} was the last viable prefix)")
        suggestions = template.complete(prefix, 4)
        if not suggestions:
            print("  templates: no suggestions")
        for c in suggestions:
            print(f"  {c.completion!r:48} -> {c.interpretation.serialize()}")
        print()


if __name__ == "__main__":
    main()
