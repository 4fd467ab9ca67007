"""Field comparison: edit distance, binning, missingness, schema checks."""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from privlink.errors import SchemaError
from privlink.linkage.compare import compare_fields, edit_similarity, levenshtein
from privlink.linkage.schema import ComparisonVector, FeatureSpec, Record, Schema

SCHEMA = Schema(
    fields=(("id", "text"), ("name", "text"), ("city", "categorical")),
    id_field="id",
)

NAME_SIM = FeatureSpec(
    name="name", source_field="name", kind="edit-distance-similarity", bins=(0.5, 0.8)
)
CITY_EQ = FeatureSpec(name="city", source_field="city", kind="boolean-equality")
NAME3 = FeatureSpec(name="name3", source_field="name", kind="prefix-agreement", n_chars=3)


def rec(rid, name=None, city=None):
    values = {"id": rid}
    if name is not None:
        values["name"] = name
    if city is not None:
        values["city"] = city
    return Record(id=rid, values=values)


def test_levenshtein_known_values():
    assert levenshtein("", "") == 0
    assert levenshtein("abc", "") == 3
    assert levenshtein("kitten", "sitting") == 3
    assert levenshtein("SMITH", "SMYTH") == 1
    assert levenshtein("flaw", "lawn") == 2


def test_edit_similarity():
    assert edit_similarity("", "") == 1.0
    assert edit_similarity("SMITH", "SMITH") == 1.0
    # one substitution over five characters
    assert edit_similarity("SMITH", "SMYTH") == pytest.approx(0.8)
    assert edit_similarity("ABC", "XYZ") == 0.0


def test_single_edit_lands_in_top_band():
    # similarity 0.8 sits at the top cut-point; bisect_right puts it in band 2
    v = compare_fields(rec("a", "SMITH"), rec("b", "SMYTH"), [NAME_SIM])
    assert v.levels == (2,)
    assert v.missing_mask == (False,)


def test_identical_and_disjoint_bands():
    assert compare_fields(rec("a", "SMITH"), rec("b", "SMITH"), [NAME_SIM]).levels == (2,)
    assert compare_fields(rec("a", "AAAA"), rec("b", "ZZZZ"), [NAME_SIM]).levels == (0,)
    # similarity 0.5 is >= first cut, < second: middle band
    assert compare_fields(rec("a", "ABCD"), rec("b", "ABZZ"), [NAME_SIM]).levels == (1,)


def test_boolean_and_prefix_kinds():
    a, b = rec("a", "JOHNSON", "OSLO"), rec("b", "JOHNSTON", "OSLO")
    v = compare_fields(a, b, [CITY_EQ, NAME3])
    assert v.levels == (1, 1)
    v = compare_fields(a, rec("c", "KARLSEN", "BERGEN"), [CITY_EQ, NAME3])
    assert v.levels == (0, 0)


def test_missing_masks_feature():
    v = compare_fields(rec("a", None, "OSLO"), rec("b", "SMITH", "OSLO"), [NAME_SIM, CITY_EQ])
    assert v.missing_mask == (True, False)
    assert v.levels[0] == 0
    # missing on the right side too
    v = compare_fields(rec("a", "SMITH"), rec("b", "SMITH", "OSLO"), [NAME_SIM, CITY_EQ])
    assert v.missing_mask == (False, True)


def test_blank_counts_as_missing():
    v = compare_fields(rec("a", ""), rec("b", "SMITH"), [NAME_SIM])
    assert v.missing_mask == (True,)


def test_unknown_field_rejected():
    spec = FeatureSpec(name="zip", source_field="zip", kind="boolean-equality")
    with pytest.raises(SchemaError):
        compare_fields(rec("a", "X"), rec("b", "X"), [spec], schema=SCHEMA)


def test_feature_spec_validation():
    with pytest.raises(SchemaError):
        FeatureSpec(name="x", source_field="x", kind="soundex")
    with pytest.raises(SchemaError):
        FeatureSpec(name="x", source_field="x", kind="prefix-agreement", n_chars=0)
    with pytest.raises(SchemaError):
        FeatureSpec(name="x", source_field="x", kind="edit-distance-similarity", bins=())
    with pytest.raises(SchemaError):
        FeatureSpec(
            name="x", source_field="x", kind="edit-distance-similarity", bins=(0.8, 0.5)
        )
    with pytest.raises(SchemaError):
        FeatureSpec(
            name="x", source_field="x", kind="edit-distance-similarity", bins=(0.0, 0.5)
        )
    with pytest.raises(SchemaError):
        FeatureSpec(name="x", source_field="x", kind="boolean-equality", bins=(0.5,))


def test_arities():
    assert NAME_SIM.arity == 3
    assert CITY_EQ.arity == 2
    assert NAME3.arity == 2


def test_comparison_vector_validation():
    with pytest.raises(SchemaError):
        ComparisonVector(levels=(0,), missing_mask=(False, True))


@settings(max_examples=200, deadline=None)
@given(st.text(max_size=12), st.text(max_size=12))
def test_levenshtein_symmetric_and_bounded(a, b):
    d = levenshtein(a, b)
    assert d == levenshtein(b, a)
    assert abs(len(a) - len(b)) <= d <= max(len(a), len(b))
    assert (d == 0) == (a == b)


@settings(max_examples=100, deadline=None)
@given(st.text(max_size=8), st.text(max_size=8), st.text(max_size=8))
def test_levenshtein_triangle_inequality(a, b, c):
    assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)


@settings(max_examples=200, deadline=None)
@given(st.text(min_size=1, max_size=12), st.text(min_size=1, max_size=12))
def test_similarity_in_unit_interval(a, b):
    s = edit_similarity(a, b)
    assert 0.0 <= s <= 1.0
