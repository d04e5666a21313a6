import pytest

from semac.domain import DomainConfigError
from semac.lexicon import Lexicon, LexiconEntry, LexiconLoadError, load_lexicon


def make_lex():
    return Lexicon(
        "countries",
        [
            LexiconEntry(("chinese",), "CHINA", frozenset({"adjective"}), 80),
            LexiconEntry(("china",), "CHINA", frozenset({"noun"}), 70),
            LexiconEntry(("german",), "GERMANY", frozenset({"adjective"}), 75),
            LexiconEntry(("new", "zealand"), "NZ", frozenset({"noun"}), 10),
        ],
    ).freeze()


class TestLexicon:
    def test_prefix_match_ranked_by_weight(self):
        lex = make_lex()
        assert [e.target for e in lex.prefix_match("ch", 10)] == ["CHINA", "CHINA"]
        assert lex.prefix_match("ch", 10)[0].key == "chinese"

    def test_prefix_match_limit(self):
        lex = make_lex()
        assert len(lex.prefix_match("", 2)) == 2

    def test_prefix_match_bad_limit(self):
        with pytest.raises(ValueError):
            make_lex().prefix_match("c", 0)

    def test_multiword_key_uses_single_spaces(self):
        lex = make_lex()
        assert lex.exact("New   Zealand")[0].target == "NZ"
        assert [e.target for e in lex.prefix_match("new z", 5)] == ["NZ"]

    def test_exact_miss(self):
        assert make_lex().exact("chin") == []

    def test_walk_chars(self):
        lex = make_lex()
        assert lex.walk_chars("chin") == 4
        assert lex.walk_chars("chix") == 3

    def test_empty_surface_rejected(self):
        with pytest.raises(ValueError):
            Lexicon("x").add(LexiconEntry((), "T"))

    def test_derive_view(self):
        lex = make_lex()
        adjectives = lex.derive_view(lambda e: "adjective" in e.tags)
        assert sorted(e.key for e in adjectives.entries) == ["chinese", "german"]

    def test_restrict_targets(self):
        lex = make_lex()
        only_china = lex.restrict_targets(frozenset({"CHINA"}))
        assert all(e.target == "CHINA" for e in only_china.entries)
        assert len(only_china) == 2


class TestLoadLexicon:
    def test_load_and_blank_lines(self, tmp_path):
        p = tmp_path / "x.lex"
        p.write_text("# comment\nchinese\tCHINA\tadjective\t80\n\nchina\tCHINA\t\t70\n")
        lex = load_lexicon(p)
        assert len(lex) == 2
        assert lex.exact("china")[0].tags == frozenset()

    def test_bad_field_count(self, tmp_path):
        p = tmp_path / "x.lex"
        p.write_text("chinese\tCHINA\n")
        with pytest.raises(LexiconLoadError, match="4 tab-separated"):
            load_lexicon(p)

    def test_bad_weight(self, tmp_path):
        p = tmp_path / "x.lex"
        p.write_text("chinese\tCHINA\t\tmany\n")
        with pytest.raises(LexiconLoadError, match="bad weight"):
            load_lexicon(p)

    def test_negative_weight(self, tmp_path):
        p = tmp_path / "x.lex"
        p.write_text("chinese\tCHINA\t\t-1\n")
        with pytest.raises(LexiconLoadError, match="negative"):
            load_lexicon(p)


class TestStore:
    def test_get_and_typed_view(self, bonds):
        store = bonds.store
        lex = store.get("countries")
        assert lex.exact("chinese")[0].target == "CHINA"
        view = store.typed_view("countries", "COUNTRY")
        assert view is store.typed_view("countries", "COUNTRY")  # cached

    def test_get_unknown(self, bonds):
        with pytest.raises(DomainConfigError):
            bonds.store.get("nope")
