import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import decomposition
from wga_chunks.census import (Census, GuardRailError, compare, enumerate_curves, enumerate_records,
                               oracle_enumerate)
from wga_chunks.oracle import OracleLimitError
from wga_chunks.patterns import TAGS


def dump(c):
    return json.dumps(c.to_json(), sort_keys=True)


def test_zero_letters_is_empty():
    c = enumerate_curves(decomposition("trefoil"), 0)
    assert c.entries == [] and c.raw_records == 0


def test_deterministic_output():
    cd = decomposition("figure8")
    assert dump(enumerate_curves(cd, 4)) == dump(enumerate_curves(cd, 4))


def test_entries_sorted_and_counted():
    c = enumerate_curves(decomposition("chain4"), 4)
    words = [e.word for e in c.entries]
    assert words == sorted(words)
    assert sum(e.count for e in c.entries) == c.raw_records
    for e in c.entries:
        assert 0 <= e.disk_count <= e.count


@pytest.mark.parametrize("name", ["trefoil", "figure8"])
def test_monotone_in_letter_bound(name):
    cd = decomposition(name)
    prev = {}
    for k in range(0, 6):
        cur = enumerate_curves(cd, k).counts()
        assert set(prev) <= set(cur)
        for w, n in prev.items():
            assert cur[w] >= n
        prev = cur


def test_guard_rail():
    cd = decomposition("trefoil")
    with pytest.raises(GuardRailError):
        enumerate_curves(cd, 13)
    with pytest.raises(ValueError):
        enumerate_curves(cd, -1)
    with pytest.raises(OracleLimitError):
        oracle_enumerate(decomposition("trefoil-sum"), 3)
    with pytest.raises(OracleLimitError):
        oracle_enumerate(cd, 7)


def test_json_roundtrip_keeps_digest():
    c = enumerate_curves(decomposition("trefoil"), 4, ("Thm8.1",))
    back = Census.from_json(json.loads(dump(c)))
    assert back.digest == c.digest
    assert compare(c, back).empty


def test_compare_reports_changes():
    cd = decomposition("trefoil")
    a = enumerate_curves(cd, 4)
    b = enumerate_curves(cd, 4, ("Thm8.1",))
    d = compare(a, b)
    assert not d.empty and not d.digests_equal
    assert d.only_b == {"SSSS": 12}
    with pytest.raises(ValueError):
        compare(a, enumerate_curves(cd, 3))
    with pytest.raises(ValueError):
        compare(a, b, check_filters=True)


def test_trefoil_census_values():
    # frozen from the brute-force oracle
    assert enumerate_curves(decomposition("trefoil"), 4).counts() == {"BBBB": 36, "BBSS": 12, "PPPP": 12}


def test_no_disk_entries_are_out_of_scope():
    c = enumerate_curves(decomposition("torus-grid"), 3)
    for e in c.entries:
        if e.disk_count == 0:
            assert e.classification.verdict == "out-of-scope"


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["trefoil", "figure8", "chain4"]), st.sets(st.sampled_from(TAGS)), st.integers(0, 4))
def test_oracle_agrees_under_any_filters(name, off, k):
    cd = decomposition(name)
    a = enumerate_curves(cd, k, off)
    b = oracle_enumerate(cd, k, off)
    assert compare(a, b).empty
    assert a.digest == b.digest


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["trefoil", "figure8"]), st.sets(st.sampled_from(TAGS)), st.sampled_from(TAGS))
def test_disabling_more_filters_only_adds(name, off, extra):
    cd = decomposition(name)
    a = enumerate_curves(cd, 4, off).counts()
    b = enumerate_curves(cd, 4, off | {extra}).counts()
    for w, n in a.items():
        assert b.get(w, 0) >= n


def test_records_carry_disk_flag():
    cd = decomposition("figure8")
    recs = enumerate_records(cd, 4)
    assert all(isinstance(d, bool) for _, _, d in recs)
    assert any(d for _, _, d in recs)
