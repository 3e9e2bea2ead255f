import pytest

from dertype.catalog import (algebra_entries, catalog_lookup, crosscheck_tables, entries, get_entry,
                             load_catalog)
from dertype.dsl import parse_presentation
from dertype.recognition import is_gentle, is_nodal, normalize_with_match


def test_counts():
    assert len(entries("table2")) == 24
    assert len(entries("table1")) == 9
    assert {e.id for e in entries("local")} >= {"L1", "L2", "L3", "L4", "L5"}
    assert {e.id for e in entries("deformation")} == {"D1", "D2"}


def test_lookup_examples():
    assert catalog_lookup(get_entry("L5").presentation).id == "L5"
    assert catalog_lookup(get_entry("T2.9").presentation).id == "T2.9"
    assert catalog_lookup(parse_presentation("quiver { v 1; x:1->1 } rel { x*x*x }")) is None


def test_lookup_after_relabeling():
    # Table 2 (16) with the vertices swapped
    p = parse_presentation("quiver { v 1 2; a:2->2, b:2->1, c:1->2 } rel { a*a; b*c; c*b }")
    assert catalog_lookup(p).id == "T2.16"


@pytest.mark.parametrize("nodal, gentle", [("T1.4", "T2.14"), ("T1.2", "T2.8")])
def test_twins(nodal, gentle):
    assert get_entry(nodal).table2_match == gentle
    a = normalize_with_match(get_entry(nodal).presentation)[0]
    b = normalize_with_match(get_entry(gentle).presentation)[0]
    assert a.to_dsl() == b.to_dsl()


def test_nodal_nine_has_no_twin():
    assert not get_entry("T1.9").table2_match
    _, _, match = normalize_with_match(get_entry("T1.9").presentation)
    assert match == "T1.9"


def test_closed_under_normalization():
    for e in algebra_entries():
        out, moves, _ = normalize_with_match(e.presentation)
        assert out.to_dsl() == e.presentation.to_dsl(), e.id


def test_tame_two_point_flags():
    for e in algebra_entries():
        if e.derived_class in ("tame", "discrete", "finite") and len(e.presentation.quiver.vertices) == 2:
            assert e.gentle or e.nodal or e.id in ("D1", "D2"), e.id


def test_crosscheck():
    r = crosscheck_tables()
    assert r["ok"], r["mismatches"]
    found = next(i for i in r["items"] if i["check"] == "table2_nodal")["found"]
    assert found == [3, 8, 9, 14, 15, 22, 23, 24]


def test_json_round_trip():
    for e in load_catalog().values():
        data = e.to_json()
        assert data["id"] == e.id
        if "dsl" in data:
            assert parse_presentation(data["dsl"]).to_dsl() == data["dsl"]


def test_unknown_entry():
    with pytest.raises(KeyError):
        get_entry("T9.99")
