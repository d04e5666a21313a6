import pytest

from semac.ir import (
    And,
    Atom,
    AtomF,
    BooleanValue,
    EnumValue,
    ExactDate,
    Grade,
    Not,
    NumericValue,
    Or,
    RelativeTime,
    StringValue,
    assemble_formula,
    atom_type,
    atoms_of,
    canonical_key,
    canonicalize,
    conjoin,
)


def A(field, op="=", value=None, negated=False):
    return Atom(field, op, value if value is not None else EnumValue("X"), negated)


class TestValues:
    def test_enum_serialize(self):
        assert EnumValue("CHINA").serialize() == "CHINA"

    def test_numeric_with_unit(self):
        assert NumericValue(2.0, "PCT").serialize() == "2(PCT)"

    def test_numeric_without_unit(self):
        assert NumericValue(2.5, None).serialize() == "2.5"

    def test_numeric_placeholder(self):
        assert NumericValue(None, "USD").serialize() == "?(USD)"
        assert NumericValue(None, None).serialize() == "?"

    def test_exact_date_partial(self):
        assert ExactDate(-1, -1, 2020).serialize() == "EXACT_DATE(-1,-1,2020)"

    def test_exact_date_full(self):
        assert ExactDate(30, 5, 2020).serialize() == "EXACT_DATE(30,5,2020)"
        assert ExactDate(30, 5, 2020).fully_specified
        assert not ExactDate(-1, -1, 2020).fully_specified

    def test_exact_date_validation(self):
        with pytest.raises(ValueError):
            ExactDate(32, 1, 2020)
        with pytest.raises(ValueError):
            ExactDate(1, 13, 2020)

    def test_relative_time(self):
        assert RelativeTime(3, "YEAR").serialize() == "RELATIVE_TIME(3,YEAR,NOW)"

    def test_relative_time_validation(self):
        with pytest.raises(ValueError):
            RelativeTime(1, "FORTNIGHT")

    def test_string_and_boolean(self):
        assert StringValue("china tariffs").serialize() == '"china tariffs"'
        assert BooleanValue(True).serialize() == "TRUE"


class TestAtoms:
    def test_serialize_eq(self):
        a = Atom("COUNTRY_OF_RISK", "=", EnumValue("CHINA"))
        assert AtomF(a).serialize() == "COUNTRY_OF_RISK=CHINA"

    def test_serialize_negated(self):
        a = Atom("SECTOR", "=", EnumValue("SEC_TECH"), negated=True)
        assert AtomF(a).serialize() == "NOT(SECTOR=SEC_TECH)"

    def test_serialize_order_op(self):
        a = Atom("YIELD", ">", NumericValue(2.0, "PCT"))
        assert AtomF(a).serialize() == "YIELD>2(PCT)"


class TestCanonicalize:
    def test_and_flattens_and_sorts(self):
        a = A("B")
        b = A("A")
        f = And((And((AtomF(a),)), AtomF(b)))
        c = canonicalize(f)
        assert isinstance(c, And)
        assert [x.serialize() for x in c.children] == ["A=X", "B=X"]

    def test_duplicate_conjuncts_collapse(self):
        f = And((AtomF(A("A")), AtomF(A("A"))))
        assert canonicalize(f).serialize() == "A=X"

    def test_not_atom_folds_into_negated_atom(self):
        f = Not(AtomF(A("A")))
        c = canonicalize(f)
        assert isinstance(c, AtomF)
        assert c.atom.negated

    def test_canonical_key_order_insensitive(self):
        f1 = And((AtomF(A("A")), AtomF(A("B"))))
        f2 = And((AtomF(A("B")), AtomF(A("A"))))
        assert canonical_key(f1) == canonical_key(f2)

    def test_canonical_key_none(self):
        assert canonical_key(None) == ""

    def test_or_preserved(self):
        f = Or((AtomF(A("B")), AtomF(A("A"))))
        c = canonicalize(f)
        assert isinstance(c, Or)


class TestAssembly:
    def test_conjoin_single(self):
        f = conjoin([AtomF(A("A"))])
        assert isinstance(f, AtomF)

    def test_conjoin_empty(self):
        assert conjoin([]) is None

    def test_assemble_no_links(self):
        f = assemble_formula([A("A"), A("B")])
        assert isinstance(f, And)
        assert len(f.children) == 2

    def test_assemble_or_link_groups_with_previous(self):
        f = assemble_formula([A("A"), A("B"), A("C")], (False, True, False))
        assert isinstance(f, And)
        kinds = [type(p).__name__ for p in f.children]
        assert kinds == ["Or", "AtomF"]
        assert len(f.children[0].children) == 2

    def test_assemble_all_linked(self):
        f = assemble_formula([A("A"), A("B")], (False, True))
        assert isinstance(f, Or)

    def test_assemble_short_links_padded(self):
        f = assemble_formula([A("A"), A("B")], ())
        assert isinstance(f, And)

    def test_assemble_empty(self):
        assert assemble_formula([]) is None


class TestHelpers:
    def test_atoms_of_nested(self):
        f = And((AtomF(A("A")), Or((AtomF(A("B")), AtomF(A("C"))))))
        assert sorted(a.field for a in atoms_of(f)) == ["A", "B", "C"]

    def test_atoms_of_none(self):
        assert atoms_of(None) == []

    def test_atom_type_is_field(self):
        assert atom_type(A("YIELD")) == "YIELD"

    def test_grade_ordering(self):
        assert Grade.LOW < Grade.MEDIUM < Grade.HIGH
