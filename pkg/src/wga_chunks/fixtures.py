"""Builders for the small diagrams used as fixtures, and access to the
packaged ``.wgad`` files."""

from __future__ import annotations

from importlib import resources

from .diagram import AmbientSpec, Crossing, Diagram, parse_wgad

FIXTURES = ("trefoil", "figure8", "chain4", "torus-grid", "fig1-left", "trefoil-sum", "nugatory", "unknot1")


def closed_braid(word: list[int], strands: int, name: str = "", ambient: AmbientSpec | None = None) -> Diagram:
    """Standard plane closure of a braid word (``i`` for sigma_i, ``-i`` for
    its inverse).  Strands run upward; slot 0 is north-east and the order is
    counterclockwise."""
    pending = {p: f"s{p}" for p in range(1, strands + 1)}
    crossings = []
    for n, g in enumerate(word):
        i = abs(g)
        left, right = f"e{n}l", f"e{n}r"
        slots = (right, left, pending[i], pending[i + 1])
        crossings.append([f"c{n}", list(slots), 0 if g > 0 else 1])
        pending[i], pending[i + 1] = left, right
    rename = {}
    for p, lab in pending.items():
        if lab == f"s{p}":
            raise ValueError(f"strand {p} has no crossing")
        rename[lab] = f"s{p}"
    out = [Crossing(cid, tuple(rename.get(h, h) for h in slots), over) for cid, slots, over in crossings]
    return Diagram(tuple(out), ambient or AmbientSpec("sphere-s3"), name=name)


def torus_grid(a: int = 2, b: int = 2) -> Diagram:
    """Alternating ``a x b`` square grid on the torus (``a``, ``b`` even)."""
    if a % 2 or b % 2:
        raise ValueError("grid sides must be even for alternation")
    xs = []
    for j in range(b):
        for i in range(a):
            east = f"h{i}_{j}"
            north = f"v{i}_{j}"
            west = f"h{(i - 1) % a}_{j}"
            south = f"v{i}_{(j - 1) % b}"
            xs.append(Crossing(f"c{i}_{j}", (east, north, west, south), 0 if (i + j) % 2 == 0 else 1))
    return Diagram(tuple(xs), AmbientSpec("thickened-surface"), name=f"torus-grid-{a}x{b}")


def load_fixture(name: str) -> Diagram:
    text = resources.files("wga_chunks").joinpath("data", f"{name}.wgad").read_text()
    return parse_wgad(text)


def fixture_text(name: str) -> str:
    return resources.files("wga_chunks").joinpath("data", f"{name}.wgad").read_text()
