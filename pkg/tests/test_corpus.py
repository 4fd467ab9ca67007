"""Synthetic corpus generation and table IO."""
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from privlink.corpus.io import load_table, load_truth, write_table, write_truth
from privlink.corpus.synth import (
    CITIES,
    DEFAULT_SCHEMA,
    FIRST_NAMES,
    LAST_NAMES,
    ErrorProfile,
    apply_edit,
    corrupt_value,
    generate_pairs,
)
from privlink.errors import IngestError
from privlink.linkage.compare import edit_similarity, levenshtein


def test_pools_loaded():
    assert len(FIRST_NAMES) == 160
    assert len(LAST_NAMES) == 200
    assert len(CITIES) == 40
    for pool in (FIRST_NAMES, LAST_NAMES, CITIES):
        assert len(set(pool)) == len(pool)
        assert all(name.isupper() and name.isalpha() for name in pool)


@pytest.mark.parametrize("pool", [FIRST_NAMES, LAST_NAMES, CITIES])
def test_pools_are_edit_separated(pool):
    # no two distinct pool entries may reach the top similarity band (0.8),
    # or even come close: a single typo must never turn one into another
    worst = max(
        edit_similarity(a, b)
        for i, a in enumerate(pool)
        for b in pool[i + 1 :]
    )
    assert worst < 0.75


def test_apply_edit_known_cases():
    assert apply_edit("SMITH", "transpose", 2) == "SMTIH"
    assert apply_edit("SMITH", "delete", 0) == "MITH"
    assert apply_edit("SMITH", "substitute", 2, "Y") == "SMYTH"
    assert apply_edit("SMITH", "insert", 5, "S") == "SMITHS"
    with pytest.raises(ValueError):
        apply_edit("AB", "transpose", 1)
    with pytest.raises(ValueError):
        apply_edit("AB", "rot13", 0)


def test_corrupt_value_rate_zero_is_identity():
    profile = ErrorProfile(field_error_rate=0.0)
    assert corrupt_value("SMITH", profile, "s") == "SMITH"


def test_corrupt_value_deterministic_and_single_edit():
    profile = ErrorProfile(field_error_rate=1.0)
    for trial in range(200):
        seed = f"trial{trial}"
        out = corrupt_value("JOHANSEN", profile, seed)
        assert out == corrupt_value("JOHANSEN", profile, seed)
        # one insert/delete/substitute, or a transpose (two substitutions)
        assert levenshtein("JOHANSEN", out) in (1, 2)
        assert out != "JOHANSEN" or levenshtein("JOHANSEN", out) == 0


def test_generate_pairs_shapes():
    profile = ErrorProfile()
    file_a, file_b, truth = generate_pairs(50, 0.6, profile, seed=5)
    assert len(file_a) == 50
    assert len(file_b) == 50
    assert len(truth.pairs) == 30
    assert {a.id for a in file_a} == {f"A{i:05d}" for i in range(50)}
    assert {b.id for b in file_b} == {f"B{i:05d}" for i in range(50)}


def test_truth_references_real_records():
    profile = ErrorProfile(field_error_rate=0.3)
    file_a, file_b, truth = generate_pairs(40, 0.5, profile, seed=9)
    ids_a = {r.id for r in file_a}
    ids_b = {r.id for r in file_b}
    seen_a, seen_b = set(), set()
    for id_a, id_b in truth.pairs:
        assert id_a in ids_a and id_b in ids_b
        assert id_a not in seen_a and id_b not in seen_b
        seen_a.add(id_a)
        seen_b.add(id_b)


def test_clean_copy_is_field_identical():
    file_a, file_b, truth = generate_pairs(30, 1.0, ErrorProfile(), seed=3)
    amap = {r.id: r for r in file_a}
    bmap = {r.id: r for r in file_b}
    for id_a, id_b in truth.pairs:
        va = {k: v for k, v in amap[id_a].values.items() if k != "id"}
        vb = {k: v for k, v in bmap[id_b].values.items() if k != "id"}
        assert va == vb


def test_name_pairs_unique_per_run():
    file_a, file_b, truth = generate_pairs(120, 0.5, ErrorProfile(), seed=13)
    pairs_a = [(r.values["first_name"], r.values["last_name"]) for r in file_a]
    assert len(set(pairs_a)) == len(pairs_a)
    # fresh B identities must not collide with any A identity either
    matched_b = {id_b for _, id_b in truth.pairs}
    fresh_pairs = [
        (r.values["first_name"], r.values["last_name"])
        for r in file_b
        if r.id not in matched_b
    ]
    assert not set(fresh_pairs) & set(pairs_a)
    assert len(set(fresh_pairs)) == len(fresh_pairs)


def test_deterministic_per_seed():
    profile = ErrorProfile(field_error_rate=0.2, missing_rate=0.1)
    one = generate_pairs(25, 0.8, profile, seed=21)
    two = generate_pairs(25, 0.8, profile, seed=21)
    assert [r.values for r in one[0]] == [r.values for r in two[0]]
    assert [r.values for r in one[1]] == [r.values for r in two[1]]
    assert one[2].pairs == two[2].pairs
    other = generate_pairs(25, 0.8, profile, seed=22)
    assert [r.values for r in one[1]] != [r.values for r in other[1]]


def test_corrupted_text_fields_stay_one_edit_away():
    profile = ErrorProfile(field_error_rate=1.0)
    file_a, file_b, truth = generate_pairs(60, 1.0, profile, seed=31)
    amap = {r.id: r for r in file_a}
    bmap = {r.id: r for r in file_b}
    for id_a, id_b in truth.pairs:
        for fieldname in ("first_name", "last_name", "city"):
            va = amap[id_a].get(fieldname)
            vb = bmap[id_b].get(fieldname)
            if va is not None and vb is not None:
                assert levenshtein(str(va), str(vb)) <= 2


def test_missing_rate_blanks_fields():
    profile = ErrorProfile(missing_rate=0.5)
    _, file_b, truth = generate_pairs(80, 1.0, profile, seed=41)
    blanks = sum(
        1
        for r in file_b
        for f in ("first_name", "last_name", "city", "birth_year", "height_cm")
        if r.get(f) is None
    )
    assert 120 <= blanks <= 280  # 400 cells at rate 0.5


def test_table_round_trip(tmp_path):
    profile = ErrorProfile(field_error_rate=0.3, missing_rate=0.2)
    file_a, file_b, truth = generate_pairs(35, 0.7, profile, seed=8)
    pa, pb, pt = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "t.csv"
    write_table(pa, DEFAULT_SCHEMA, file_a)
    write_table(pb, DEFAULT_SCHEMA, file_b)
    write_truth(pt, set(truth.pairs))
    back_a = load_table(pa, DEFAULT_SCHEMA)
    back_b = load_table(pb, DEFAULT_SCHEMA)
    assert [r.values for r in back_a] == [r.values for r in file_a]
    assert [r.values for r in back_b] == [r.values for r in file_b]
    assert load_truth(pt) == set(truth.pairs)


def test_load_table_rejects_bad_header(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("id,first_name\nA1,X\n")
    with pytest.raises(IngestError):
        load_table(p, DEFAULT_SCHEMA)


def test_load_table_rejects_duplicate_id(tmp_path):
    p = tmp_path / "dup.csv"
    header = ",".join(DEFAULT_SCHEMA.field_names)
    row = "A1,X,Y,Z,1980,170"
    p.write_text(f"{header}\n{row}\n{row}\n")
    with pytest.raises(IngestError) as err:
        load_table(p, DEFAULT_SCHEMA)
    assert "3" in str(err.value)  # duplicate appears on line 3


def test_load_table_rejects_missing_id(tmp_path):
    p = tmp_path / "noid.csv"
    header = ",".join(DEFAULT_SCHEMA.field_names)
    p.write_text(f"{header}\n,X,Y,Z,1980,170\n")
    with pytest.raises(IngestError):
        load_table(p, DEFAULT_SCHEMA)


def test_overlap_bounds_validated():
    with pytest.raises(ValueError):
        generate_pairs(10, 1.5, ErrorProfile(), seed=0)
    with pytest.raises(ValueError):
        generate_pairs(0, 1.0, ErrorProfile(), seed=0)
    with pytest.raises(ValueError):
        ErrorProfile(field_error_rate=-0.1)
    with pytest.raises(ValueError):
        ErrorProfile(ops=("substitute", "shuffle"))


@settings(max_examples=100, deadline=None)
@given(
    st.text(alphabet="ABCDEFGHIJ", min_size=1, max_size=10),
    st.sampled_from(["substitute", "delete", "insert"]),
    st.data(),
)
def test_apply_edit_distance_one(value, op, data):
    if op == "insert":
        pos = data.draw(st.integers(min_value=0, max_value=len(value)))
    else:
        pos = data.draw(st.integers(min_value=0, max_value=len(value) - 1))
    char = data.draw(st.sampled_from("KLMNOP")) if op in ("substitute", "insert") else None
    out = apply_edit(value, op, pos, char)
    assert levenshtein(value, out) <= 1
