import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semac.evaluation import (
    PREDICATES,
    EvalTarget,
    evaluate,
    is_syntactic_extension,
    measure_latency,
    percentile,
    query_prefixes,
    reciprocal_rank,
)
from semac.ir import Atom, AtomF, Completion, EnumValue, Grade, conjoin


def mk(text, fields=("A",)):
    f = conjoin([AtomF(Atom(fld, "=", EnumValue("X"))) for fld in fields])
    return Completion(
        completion=text, interpretation=f, dtype=fields[0], grade=Grade.HIGH,
        score=1.0, source="mpc",
    )


def target(text, fields=("A", "B")):
    return EvalTarget(text, conjoin([AtomF(Atom(fld, "=", EnumValue("X"))) for fld in fields]))


words = st.lists(st.sampled_from(["ibm", "bonds", "bullet", "yield", "pct", "2"]), min_size=1, max_size=5)
fieldsets = st.lists(st.sampled_from(["A", "B", "C"]), min_size=1, max_size=3, unique=True)


class TestPredicateLattice:
    @given(c=words, t=words, cf=fieldsets, tf=fieldsets)
    @settings(max_examples=300)
    def test_partial_predicates_dominate_full(self, c, t, cf, tf):
        comp = mk(" ".join(c), tuple(cf))
        tgt = target(" ".join(t), tuple(tf))
        # each full-match predicate implies its partial counterpart
        assert not PREDICATES["STR"](comp, tgt) or PREDICATES["PSTR"](comp, tgt)
        assert not PREDICATES["BOW"](comp, tgt) or PREDICATES["PBOW"](comp, tgt)
        assert not PREDICATES["SEM"](comp, tgt) or PREDICATES["PSEM"](comp, tgt)
        # string identity implies bag-of-words identity
        assert not PREDICATES["STR"](comp, tgt) or PREDICATES["BOW"](comp, tgt)
        assert not PREDICATES["PSTR"](comp, tgt) or PREDICATES["PBOW"](comp, tgt)

    def test_examples(self):
        tgt = target("bullet bonds maturing in 2020")
        assert PREDICATES["PSTR"](mk("bullet bonds"), tgt)
        assert not PREDICATES["STR"](mk("bullet bonds"), tgt)
        assert PREDICATES["PBOW"](mk("bonds bullet"), tgt)
        assert not PREDICATES["PSTR"](mk("bonds bullet"), tgt)

    def test_sem_uses_canonical_form(self):
        comp = mk("any text", ("B", "A"))
        tgt = target("other text", ("A", "B"))
        assert PREDICATES["SEM"](comp, tgt)

    def test_psem_is_atom_subset(self):
        assert PREDICATES["PSEM"](mk("x", ("A",)), target("y", ("A", "B")))
        assert not PREDICATES["PSEM"](mk("x", ("C",)), target("y", ("A", "B")))

    def test_sem_false_without_target_formula(self):
        tgt = EvalTarget("x", None)
        assert not PREDICATES["SEM"](mk("x"), tgt)
        assert not PREDICATES["PSEM"](mk("x"), tgt)


class TestReciprocalRank:
    def test_rank_positions(self):
        tgt = target("b c")
        comps = [mk("a"), mk("b c")]
        assert reciprocal_rank(comps, tgt, PREDICATES["STR"]) == 0.5

    def test_no_match(self):
        assert reciprocal_rank([mk("a")], target("zzz"), PREDICATES["STR"]) == 0.0

    @given(n=st.integers(1, 8))
    def test_match_at_n_gives_one_over_n(self, n):
        tgt = target("hit")
        comps = [mk(f"miss{i}") for i in range(n - 1)] + [mk("hit")]
        assert reciprocal_rank(comps, tgt, PREDICATES["STR"]) == pytest.approx(1 / n)


class TestQueryPrefixes:
    def test_excludes_full_text(self):
        out = query_prefixes("abcde")
        assert out == ["abc", "abcd"]

    def test_short_text_empty(self):
        assert query_prefixes("ab") == []

    def test_trailing_space_stripped(self):
        assert query_prefixes("abcd  ") == ["abc"]


class TestEvaluate:
    def test_mpc_scores_nonzero_on_training_log(self, bonds, bonds_engines):
        mpc = bonds_engines["mpc"]
        queries = [e.text for e in bonds.log[:5]]
        report = evaluate(
            lambda p: mpc.complete(p, 10), bonds.grammar, bonds.store, queries,
            predicates=["STR", "PSTR"],
        )
        assert report.mrr["STR"] > 0
        assert report.mrr["PSTR"] >= report.mrr["STR"]
        assert report.queries == 5

    def test_unknown_predicate_rejected(self, bonds):
        with pytest.raises(ValueError, match="unknown predicate"):
            evaluate(lambda p: [], bonds.grammar, bonds.store, [], predicates=["NOPE"])

    def test_bad_mode_rejected(self, bonds):
        with pytest.raises(ValueError, match="mode"):
            evaluate(lambda p: [], bonds.grammar, bonds.store, [], mode="avg")

    def test_report_json(self, bonds):
        report = evaluate(lambda p: [], bonds.grammar, bonds.store, ["ibm bonds"], predicates=["STR"])
        assert '"STR"' in report.to_json()


class TestPercentile:
    def test_nearest_rank(self):
        vals = [float(v) for v in range(1, 11)]
        assert percentile(vals, 50) == 5.0
        assert percentile(vals, 90) == 9.0
        assert percentile(vals, 99) == 10.0
        assert percentile(vals, 100) == 10.0

    def test_single_value(self):
        assert percentile([7.0], 1) == 7.0

    def test_validation(self):
        with pytest.raises(ValueError):
            percentile([], 50)
        with pytest.raises(ValueError):
            percentile([1.0], 0)

    @given(st.lists(st.floats(0, 1e6), min_size=1, max_size=50), st.floats(0.01, 100))
    def test_result_is_an_observed_value(self, vals, p):
        assert percentile(vals, p) in vals


class TestLatency:
    def test_measures_every_prefix(self):
        report = measure_latency(lambda p: None, ["a", "b", "c"])
        assert report.calls == 3
        assert report.mean_ms >= 0
        assert report.max_ms >= report.p99_ms >= report.p50_ms

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            measure_latency(lambda p: None, [])

    def test_json(self):
        report = measure_latency(lambda p: None, ["a"])
        assert "p99_ms" in report.to_json()


class TestSyntacticExtension:
    @pytest.mark.parametrize(
        "prefix,completion,expected",
        [
            ("bullet bonds mat", "bullet bonds maturing in 2020", True),
            ("bullet bonds mat", "bullet bonds with yield", False),
            ("", "anything", True),
            ("a b", "a", False),
            ("ibm", "IBM bonds", True),
            ("a b", "a c b", False),
        ],
    )
    def test_cases(self, prefix, completion, expected):
        assert is_syntactic_extension(prefix, completion) is expected

    @given(words, st.lists(st.sampled_from(["x", "y"]), max_size=3))
    def test_appending_tokens_is_always_an_extension(self, base, extra):
        text = " ".join(base)
        assert is_syntactic_extension(text, " ".join(base + extra))
