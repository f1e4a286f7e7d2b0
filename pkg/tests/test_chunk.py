import json
from collections import Counter

import pytest
from hypothesis import assume, given, settings

from strategies import braid_diagrams
from wga_chunks.chunk import (SIDES, DecompositionError, build_chunks, crossing_arc_classes, harlequin_tiling,
                              verify_decomposition, with_flipped_gluing)
from wga_chunks.diagram import component_passes, trace_regions, validate_wga
from wga_chunks.fixtures import load_fixture, torus_grid

GOOD = ("trefoil", "figure8", "chain4", "torus-grid", "trefoil-sum")


def chunks(name):
    return build_chunks(load_fixture(name), force=True)


@pytest.mark.parametrize("name", GOOD)
def test_verify_passes(name):
    rep = verify_decomposition(chunks(name))
    assert rep["ok"], rep


@pytest.mark.parametrize("name", GOOD)
def test_orbits_are_two_plus_two(name):
    cd = chunks(name)
    classes = crossing_arc_classes(cd)
    assert len(classes) == len(cd.diagram.crossings)
    assert sorted(k.crossing for k in classes) == sorted(x.id for x in cd.diagram.crossings)
    for k in classes:
        assert Counter(c[0] for c in k.cells) == {"+": 2, "-": 2}


@pytest.mark.parametrize("name", GOOD)
def test_strips_follow_passes(name):
    cd = chunks(name)
    strips = harlequin_tiling(cd)
    for strip, passes in zip(strips, component_passes(cd.diagram)):
        assert len(strip) == len(passes)
    assert sum(map(len, strips)) == 2 * len(cd.diagram.crossings)


@pytest.mark.parametrize("name", GOOD)
def test_interior_edge_not_fixed(name):
    cd = chunks(name)
    for s in SIDES:
        sc = cd.sides[s]
        for c in sc.cells.values():
            if c.kind != "interior":
                continue
            a = cd.glue(s, *c.forward)
            b = cd.glue(s, *c.backward)
            other = cd.sides["-" if s == "+" else "+"]
            assert other.faces[a[0]].word[a[1]] != other.faces[b[0]].word[b[1]]


@pytest.mark.parametrize("name", GOOD)
def test_side_euler(name):
    cd = chunks(name)
    _, info = trace_regions(cd.diagram)
    chi = sum(c.euler_characteristic for c in info.components)
    for s in SIDES:
        assert cd.sides[s].euler_characteristic() == chi


def test_interior_words_double_corners():
    cd = chunks("figure8")
    regions, _ = trace_regions(cd.diagram)
    for r in regions:
        assert len(cd.sides["+"].faces[f"+R{r.id}"].word) == 2 * len(r.corners)


def test_monogon_gluing_reported_trivial():
    rep = verify_decomposition(chunks("unknot1"))
    assert rep["checks"]["gluing_bijection"]["ok"] is False
    assert "trivial" in rep["checks"]["gluing_bijection"]["error"]


def test_gate_rejects_without_force():
    with pytest.raises(DecompositionError):
        build_chunks(load_fixture("nugatory"))
    build_chunks(load_fixture("nugatory"), force=True)


def test_non_cellular_rejected():
    with pytest.raises((DecompositionError, ValueError)):
        build_chunks(load_fixture("fig1-left"), force=True)


def test_flipped_gluing_is_caught():
    cd = chunks("figure8")
    rid = next(iter(sorted(cd.gluings)))
    bad = with_flipped_gluing(cd, rid)
    rep = verify_decomposition(bad)
    assert not rep["ok"]


def test_json_deterministic():
    a = json.dumps(chunks("chain4").to_json(), sort_keys=True)
    b = json.dumps(chunks("chain4").to_json(), sort_keys=True)
    assert a == b


def test_larger_torus_grid():
    cd = build_chunks(torus_grid(4, 2))
    assert verify_decomposition(cd)["ok"]


@settings(max_examples=40, deadline=None)
@given(braid_diagrams(alternating=True))
def test_random_alternating_braids_decompose(d):
    regions, _ = trace_regions(d)
    assume(all(len(r.corners) > 1 for r in regions))
    cd = build_chunks(d, force=True)
    rep = verify_decomposition(cd)
    assert rep["ok"], rep
    assert validate_wga(d).conditions["1_alternating"]["ok"]
