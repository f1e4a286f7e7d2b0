import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import decomposition
from wga_chunks.census import enumerate_curves, enumerate_records
from wga_chunks.curve import CurveError, LetterWord
from wga_chunks.patterns import (TAGS, ZONES, check_ssss_zones, check_tags, classify_word, is_pisj, parity_invariant,
                                 search_pisj, zone_extensions)

RULE_TAGS = {"Thm9.1", "Thm9.2", "Thm8.1", "parity", "Prop7.1(3)"}
ps_words = st.text(alphabet="PS", min_size=1, max_size=10)
b_words = st.text(alphabet="BS", min_size=1, max_size=10)


def ssss_disks(name):
    cd = decomposition(name)
    return [p for w, p, disk in enumerate_records(cd, 4, ("Thm8.1",)) if w == "SSSS" and disk]


@pytest.mark.parametrize("w", ["P", "S", "B"])
def test_single_letters_forbidden(w):
    assert classify_word(w).verdict == "forbidden"


@settings(max_examples=300)
@given(st.one_of(ps_words, b_words), st.integers(0, 9), st.booleans())
def test_classify_invariant_under_dihedral_moves(w, k, flip):
    k %= len(w)
    v = w[k:] + w[:k]
    if flip:
        v = v[::-1]
    a, b = classify_word(w), classify_word(v)
    assert (a.word, a.verdict, a.reasons) == (b.word, b.verdict, b.reasons)


@settings(max_examples=300)
@given(ps_words)
def test_parity_tag_matches_invariant(w):
    cl = classify_word(w)
    has_parity = any(t == "parity" for t, _ in cl.reasons)
    assert has_parity == (not parity_invariant(w))
    if len(w) % 2:
        assert cl.verdict == "forbidden"


@settings(max_examples=300)
@given(st.one_of(ps_words, b_words), st.sampled_from([math.inf, 2, 4, 5]))
def test_forbidden_carries_theorem_tag(w, r):
    cl = classify_word(w, r)
    if cl.verdict == "forbidden":
        assert {t for t, _ in cl.reasons} & RULE_TAGS


@settings(max_examples=200)
@given(st.one_of(ps_words, b_words), st.sets(st.sampled_from(TAGS)))
def test_disabled_tags_never_reported(w, off):
    cl = classify_word(w, math.inf, off)
    assert not {t for t, _ in cl.reasons} & off


def test_short_words():
    for w in ("PP", "PS", "SS"):
        assert ("Thm9.1" in {t for t, _ in classify_word(w).reasons})
    for w in ("PPP", "PPS", "PSS", "SSS"):
        assert ("Thm9.2" in {t for t, _ in classify_word(w).reasons})
    assert classify_word("SS", disabled=("Thm9.1",)).verdict == "candidate"


def test_ssss_depends_on_representativity():
    assert classify_word("SSSS", math.inf).verdict == "forbidden"
    assert classify_word("SSSS", 5).verdict == "forbidden"
    cl = classify_word("SSSS", 4)
    assert cl.verdict == "candidate" and cl.reasons


def test_mixed_out_of_scope():
    assert classify_word("BBPS").verdict == "out-of-scope"


def test_parity_rejects_b():
    with pytest.raises(ValueError):
        parity_invariant("BB")
    with pytest.raises(ValueError):
        parity_invariant("PX")


def test_unknown_tag():
    with pytest.raises(ValueError, match="unknown filter"):
        check_tags(["Thm1.1"])


def test_pisj():
    assert is_pisj("SPPS") == (2, 2)
    assert is_pisj("PSPS") is None
    assert is_pisj("PPPP") is None
    found = search_pisj(enumerate_curves(decomposition("trefoil"), 4))
    assert all(f["status"] == "candidate" for f in found)
    assert {f["word"] for f in found} <= {"PPSS", "PPPS", "PSSS"}


@pytest.mark.parametrize("name", ["trefoil", "figure8", "chain4"])
def test_ssss_zones_contradiction(name):
    disks = ssss_disks(name)
    assert disks
    for p in disks:
        v = check_ssss_zones(p, decomposition(name))
        assert v.verdict == "no consistent extension"
        assert v.cases_checked == 7 ** 4
        loose = check_ssss_zones(p, decomposition(name), disabled=("Prop7.1(4)",))
        assert loose.verdict == "consistent extension found"


def test_transferred_arcs_keep_classes():
    p = ssss_disks("trefoil")[0]
    v = check_ssss_zones(p, decomposition("trefoil"))
    assert len(v.transferred) == 4
    for t in v.transferred:
        assert t["face"][0] == "-"


def test_zone_check_needs_ssss_disk():
    cd = decomposition("trefoil")
    w, p, _ = next(r for r in enumerate_records(cd, 4) if r[0] == "BBBB")
    with pytest.raises(CurveError):
        check_ssss_zones(p, cd)


def test_zone_extensions_unconstrained_finds_planar():
    met = {i: set() for i in (1, 2, 3, 4)}
    zc = dict(zip(ZONES, "wxyz"))
    found = [a for _, a in zone_extensions(met, zc) if a]
    assert any(all(isinstance(t, str) for t in a.values()) for a in found)
    # connecting 1-3 and 2-4 would cross
    assert not any(a[1] == 3 and a[2] == 4 for a in found)


def test_word_object_accepted():
    assert classify_word(LetterWord("SPSP")).word == "PSPS"
