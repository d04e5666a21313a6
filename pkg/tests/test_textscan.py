from semac.textscan import Token, scan_prefix, tokenize


def texts(raw):
    return [t.text for t in tokenize(raw)]


class TestTokenize:
    def test_simple_words_lowercased(self):
        assert texts("Bullet Bonds") == ["bullet", "bonds"]

    def test_offsets_roundtrip(self):
        raw = "  yield >  2 pct "
        for t in tokenize(raw):
            assert raw[t.start : t.end].lower() == t.text

    def test_comparison_symbols_split(self):
        assert texts("yield>2") == ["yield", ">", "2"]
        assert texts("cap>=3") == ["cap", ">=", "3"]
        assert texts("pe!=7") == ["pe", "!=", "7"]

    def test_comma_separates_words(self):
        assert texts("ipo date, ipo price") == ["ipo", "date", ",", "ipo", "price"]

    def test_comma_inside_number_kept(self):
        assert texts("2,000,000 usd") == ["2,000,000", "usd"]

    def test_hyphen_splits_words(self):
        assert texts("non-tech firms") == ["non", "tech", "firms"]

    def test_date_with_comma(self):
        assert texts("May 30, 2020") == ["may", "30", ",", "2020"]

    def test_empty(self):
        assert tokenize("") == []
        assert tokenize("   ") == []


class TestScanPrefix:
    def test_partial_when_no_trailing_space(self):
        pi = scan_prefix("bullet bonds mat")
        assert pi.partial
        assert pi.texts == ("bullet", "bonds", "mat")

    def test_complete_when_trailing_space(self):
        pi = scan_prefix("bullet bonds ")
        assert not pi.partial

    def test_empty_prefix(self):
        pi = scan_prefix("")
        assert pi.tokens == () and not pi.partial

    def test_texts_property(self):
        assert scan_prefix("a b").texts == ("a", "b")
