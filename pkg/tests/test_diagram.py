import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import braid_diagrams
from wga_chunks.diagram import (AmbientSpec, Crossing, Diagram, WgadParseError, check_alternating, check_weakly_prime,
                                checkerboard_color, format_wgad, is_string_of_bigons, parse_wgad,
                                representativity_report, representativity_value, trace_link_components,
                                trace_regions, validate_wga)
from wga_chunks.fixtures import FIXTURES, closed_braid, load_fixture, torus_grid

SPHERE_FIXTURES = ("trefoil", "figure8", "chain4", "trefoil-sum", "nugatory", "unknot1")


def edge_sides(d, regions):
    rid = {c: r.id for r in regions for c in r.corners}
    out = {}
    for h, (a, b) in d.edge_darts.items():
        c, s = a
        out[h] = (rid[(c, (s - 1) % 4)], rid[(c, s)])
    return out


def relabel(d, perm):
    xs = [d.crossings[i] for i in perm]
    xs = [Crossing(f"k{n}", x.slots, x.over_pair) for n, x in enumerate(xs)]
    return Diagram(tuple(xs), d.ambient, name=d.name)


def mirror_rotation(d):
    # reversing every rotation order; the over pair keeps its slots
    xs = []
    for x in d.crossings:
        slots = (x.slots[0], x.slots[3], x.slots[2], x.slots[1])
        xs.append(Crossing(x.id, slots, x.over_pair))
    return Diagram(tuple(xs), d.ambient, name=d.name)


def weakly_prime_brute(d):
    """Sphere diagrams: look at every curve crossing two edges once each and
    ask whether both sides hold crossings."""
    regions, _ = trace_regions(d)
    sides = edge_sides(d, regions)
    edges = sorted(sides)
    n = len(d.crossings)
    for i, e in enumerate(edges):
        for f in edges[i + 1:]:
            if sorted(sides[e]) != sorted(sides[f]) or sides[e][0] == sides[e][1]:
                continue
            color = {0: 0}
            todo = [0]
            adj = {}
            for h, (a, b) in d.edge_darts.items():
                flip = int(h in (e, f))
                adj.setdefault(a[0], []).append((b[0], flip))
                adj.setdefault(b[0], []).append((a[0], flip))
            ok = True
            while todo and ok:
                x = todo.pop()
                for y, flip in adj[x]:
                    want = color[x] ^ flip
                    if y not in color:
                        color[y] = want
                        todo.append(y)
                    elif color[y] != want:
                        ok = False
            if ok and len(color) == n and len(set(color.values())) == 2:
                return False
    return True


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_roundtrip(name):
    d = load_fixture(name)
    again = parse_wgad(format_wgad(d))
    assert format_wgad(again) == format_wgad(d)


@pytest.mark.parametrize("name", FIXTURES)
def test_regions_partition_corners(name):
    d = load_fixture(name)
    regions, _ = trace_regions(d)
    corners = [c for r in regions for c in r.corners]
    assert len(corners) == len(set(corners)) == 4 * len(d.crossings)


@pytest.mark.parametrize("name", [n for n in FIXTURES if n != "fig1-left"])
def test_euler_characteristic(name):
    d = load_fixture(name)
    regions, info = trace_regions(d)
    for comp in info.components:
        v = len(comp.crossing_ids)
        e = 2 * v
        f = len(comp.region_ids)
        assert v - e + f == 2 - 2 * comp.genus
    want = 1 if name == "torus-grid" else 0
    assert info.genus == want


def test_trefoil_passes_gate():
    rep = validate_wga(load_fixture("trefoil"))
    assert rep.ok
    assert rep.representativity["value"] == "inf"


def test_fig1_left_fails_gate():
    rep = validate_wga(load_fixture("fig1-left"))
    assert not rep.ok
    assert rep.conditions["5_checkerboard"]["ok"] is False
    r = representativity_report(load_fixture("fig1-left"))
    assert r["per_side"] == {"+": 3, "-": 0}
    assert r["value"] == 0


def test_nugatory_not_weakly_prime():
    rep = validate_wga(load_fixture("nugatory"))
    assert rep.conditions["2_weakly_prime"]["ok"] is False
    assert rep.conditions["2_weakly_prime"]["witness"]


def test_string_of_bigons():
    assert is_string_of_bigons(closed_braid([1, 1, 1, 1], 2))
    assert not is_string_of_bigons(load_fixture("figure8"))
    assert not is_string_of_bigons(torus_grid())


def test_link_components():
    assert len(trace_link_components(load_fixture("trefoil"))) == 1
    assert len(trace_link_components(closed_braid([1, 1], 2))) == 2


@pytest.mark.parametrize("text, fragment", [
    ("", "empty"),
    ("wgad 2\n", "version"),
    ("wgad 1\nx a b c d e over=0\n", "unpaired"),
    ("wgad 1\nx a p q p q over=3\n", "over"),
    ("wgad 1\nambient custom\nx a p q p q over=0\n", "custom"),
    ("wgad 1\nambient sphere-s3 r=3\nx a p q p q over=0\n", "inf"),
    ("wgad 1\nfrobnicate\n", "unknown directive"),
    ("wgad 1\ncompressing + z\nx a p q p q over=0\n", "unknown edge"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(WgadParseError, match=fragment):
        parse_wgad(text)


def test_parse_error_position():
    with pytest.raises(WgadParseError) as info:
        parse_wgad("wgad 1\n\n   bogus 1\n")
    assert info.value.line == 3 and info.value.column == 4


def test_ambient_rules():
    with pytest.raises(ValueError):
        AmbientSpec("thickened-surface", 2)
    d = parse_wgad("wgad 1\nambient custom r=5\nx a p q p q over=0\n")
    assert representativity_value(d) == 5
    assert representativity_value(load_fixture("torus-grid")) == math.inf


@settings(max_examples=60, deadline=None)
@given(braid_diagrams(), st.randoms(use_true_random=False))
def test_alternating_invariant_under_relabel_and_mirror(d, rng):
    base = check_alternating(d).ok
    perm = list(range(len(d.crossings)))
    rng.shuffle(perm)
    assert check_alternating(relabel(d, perm)).ok == base
    assert check_alternating(mirror_rotation(d)).ok == base


@settings(max_examples=60, deadline=None)
@given(braid_diagrams())
def test_checkerboard_separates_every_edge(d):
    regions, _ = trace_regions(d)
    res = checkerboard_color(d, regions)
    if not res.ok:
        return
    for a, b in edge_sides(d, regions).values():
        assert {res.colors[a], res.colors[b]} == {"white", "shaded"}


@settings(max_examples=60, deadline=None)
@given(braid_diagrams(alternating=True))
def test_alternating_braids_color(d):
    assert checkerboard_color(d).ok


@settings(max_examples=80, deadline=None)
@given(braid_diagrams(max_len=6))
def test_weakly_prime_matches_brute_force(d):
    if len(d.crossings) > 6:
        return
    assert check_weakly_prime(d)["ok"] == weakly_prime_brute(d)


@pytest.mark.parametrize("name", ["trefoil", "figure8", "chain4", "trefoil-sum", "nugatory"])
def test_weakly_prime_fixtures_brute_force(name):
    d = load_fixture(name)
    assert check_weakly_prime(d)["ok"] == weakly_prime_brute(d)
