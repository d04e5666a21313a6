import pytest

from semac.grammar import parse
from semac.ir import Grade, canonical_key
from semac.templates import TemplateConfig, TemplateEngine


@pytest.fixture(scope="module")
def engine(equities):
    return TemplateEngine(equities.templates, equities.store)


class TestTemplates:
    def test_ellipsis_for_unfinished_number(self, engine):
        out = engine.complete("tech companies with market cap > 2", 10)
        texts = [c.completion for c in out]
        assert any(t.endswith("2... usd") for t in texts)
        assert any(t.endswith("2... eur") for t in texts)

    def test_ellipsis_interpretation_has_placeholder(self, engine):
        out = engine.complete("tech companies with market cap > 2", 10)
        usd = next(c for c in out if c.completion.endswith("2... usd"))
        assert "MARKET_CAP>?(USD)" in usd.interpretation.serialize()

    def test_completions_reparse_under_templates(self, engine, equities):
        for prefix in ["tech companies with market cap > 2", "german tech comp", "pe "]:
            for c in engine.complete(prefix, 10):
                r = parse(equities.templates, equities.store, c.completion)
                assert r, c.completion
                assert canonical_key(r[0].formula) == canonical_key(c.interpretation)

    def test_grade_and_source(self, engine):
        for c in engine.complete("german tech comp", 5):
            assert c.grade is Grade.MEDIUM
            assert c.source == "template"

    def test_failure_case_yields_nothing(self, engine):
        assert engine.complete("ibm's market c", 10) == []

    def test_k_validated(self, engine):
        with pytest.raises(ValueError):
            engine.complete("pe", 0)

    def test_raw_candidates_cap_respected(self, equities):
        eng = TemplateEngine(equities.templates, equities.store, TemplateConfig(raw_candidates=3))
        assert len(eng.complete("t", 50)) <= 3
