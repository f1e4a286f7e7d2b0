"""Generalized link diagrams on closed orientable surfaces.

A diagram is stored as a combinatorial map: every crossing carries four
half-edge labels in counterclockwise order (seen from the positive side of
the projection surface), and each label occurs at exactly two slots, which
pairs the slots into diagram edges.  Regions are recovered by face tracing;
the surface is the cellular closure of the rotation system, optionally with
declared annular regions (``merge`` lines) for diagrams such as a closed
braid drawn on a band of a torus.

Conventions used everywhere in the package:

* a *dart* is a pair ``(crossing index, slot)``;
* a *corner* ``(c, k)`` is the angle between slots ``k`` and ``k + 1``;
* faces are traced with the region on the right, so an arrival through
  slot ``k`` leaves through slot ``k + 1`` and passes corner ``(c, k)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from networkx.utils import UnionFind

INF = math.inf

Dart = tuple[int, int]
Corner = tuple[int, int]


class WgadParseError(ValueError):
    """Malformed ``.wgad`` input."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Crossing:
    id: str
    slots: tuple[str, str, str, str]
    over_pair: int  # 0: slots {0, 2} are the overstrand, 1: slots {1, 3}

    def __post_init__(self):
        if len(self.slots) != 4:
            raise ValueError(f"crossing {self.id} needs 4 slots")
        if any(self.slots.count(h) > 2 for h in self.slots):
            raise ValueError(f"crossing {self.id} repeats a half-edge label")
        if self.over_pair not in (0, 1):
            raise ValueError(f"crossing {self.id}: over must be 0 or 1")

    def is_over(self, slot: int) -> bool:
        return slot % 2 == self.over_pair


@dataclass(frozen=True)
class CurveOnPi:
    """A closed curve on the projection surface, recorded by the diagram
    edges it crosses in order.  An empty ``edges`` tuple is a curve lying in
    a single region."""

    edges: tuple[str, ...]
    side: str = "+"
    name: str = ""

    @property
    def intersections(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class AmbientSpec:
    kind: str  # sphere-s3 | thickened-surface | heegaard-s3 | custom
    declared_representativity: float = INF
    compressing_curves: tuple[CurveOnPi, ...] = ()

    KINDS = ("sphere-s3", "thickened-surface", "heegaard-s3", "custom")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown ambient kind {self.kind!r}")
        if self.kind in ("sphere-s3", "thickened-surface") and self.declared_representativity != INF:
            raise ValueError(f"{self.kind} forces representativity inf")


@dataclass(frozen=True)
class Region:
    id: int
    boundary_components: tuple[tuple[Corner, ...], ...]
    color: str | None = None

    @property
    def is_disk(self) -> bool:
        return len(self.boundary_components) == 1

    @property
    def corners(self) -> tuple[Corner, ...]:
        return tuple(c for comp in self.boundary_components for c in comp)


@dataclass(frozen=True)
class SurfaceComponent:
    id: int
    genus: int
    euler_characteristic: int
    region_ids: tuple[int, ...]
    crossing_ids: tuple[str, ...]


@dataclass(frozen=True)
class SurfaceInfo:
    components: tuple[SurfaceComponent, ...]

    @property
    def genus(self) -> int:
        return sum(c.genus for c in self.components)

    def component_of_crossing(self, crossing_id: str) -> SurfaceComponent:
        for comp in self.components:
            if crossing_id in comp.crossing_ids:
                return comp
        raise KeyError(crossing_id)


@dataclass(frozen=True, eq=False)
class Diagram:
    crossings: tuple[Crossing, ...]
    ambient: AmbientSpec = field(default_factory=lambda: AmbientSpec("sphere-s3"))
    merges: tuple[tuple[Corner, Corner], ...] = ()
    name: str = ""

    def __post_init__(self):
        seen: dict[str, list[Dart]] = {}
        ids = set()
        for ci, x in enumerate(self.crossings):
            if x.id in ids:
                raise ValueError(f"duplicate crossing id {x.id}")
            ids.add(x.id)
            for s, h in enumerate(x.slots):
                seen.setdefault(h, []).append((ci, s))
        for h, darts in seen.items():
            if len(darts) == 1:
                raise ValueError(f"unpaired half-edge {h}")
            if len(darts) > 2:
                raise ValueError(f"half-edge {h} appears {len(darts)} times")

    # -- combinatorial map -------------------------------------------------

    @cached_property
    def index(self) -> dict[str, int]:
        return {x.id: i for i, x in enumerate(self.crossings)}

    @cached_property
    def edges(self) -> tuple[str, ...]:
        """Edge labels, sorted by their first dart."""
        out = []
        for x in self.crossings:
            for h in x.slots:
                if h not in out:
                    out.append(h)
        return tuple(out)

    @cached_property
    def edge_darts(self) -> dict[str, tuple[Dart, Dart]]:
        acc: dict[str, list[Dart]] = {}
        for ci, x in enumerate(self.crossings):
            for s, h in enumerate(x.slots):
                acc.setdefault(h, []).append((ci, s))
        return {h: (d[0], d[1]) for h, d in acc.items()}

    def label(self, dart: Dart) -> str:
        return self.crossings[dart[0]].slots[dart[1]]

    def partner(self, dart: Dart) -> Dart:
        a, b = self.edge_darts[self.label(dart)]
        return b if dart == a else a

    def face_next(self, dart: Dart) -> Dart:
        c, t = self.partner(dart)
        return (c, (t + 1) % 4)

    def corner_of(self, dart: Dart) -> Corner:
        """The corner passed just before leaving along ``dart``."""
        return (dart[0], (dart[1] - 1) % 4)

    def is_over(self, dart: Dart) -> bool:
        return self.crossings[dart[0]].is_over(dart[1])

    @cached_property
    def face_cycles(self) -> tuple[tuple[Dart, ...], ...]:
        """Face-tracing orbits, each starting at its least dart."""
        seen = set()
        cycles = []
        for ci in range(len(self.crossings)):
            for s in range(4):
                d = (ci, s)
                if d in seen:
                    continue
                cyc = []
                while d not in seen:
                    seen.add(d)
                    cyc.append(d)
                    d = self.face_next(d)
                cycles.append(tuple(cyc))
        return tuple(cycles)

    @cached_property
    def cycle_of_corner(self) -> dict[Corner, int]:
        out = {}
        for i, cyc in enumerate(self.face_cycles):
            for d in cyc:
                out[self.corner_of(d)] = i
        return out

    def corner_type(self, corner: Corner) -> str:
        """``'OU'`` if the traced boundary arrives at the corner on the
        overstrand and leaves on the understrand, else ``'UO'``."""
        c, k = corner
        return "OU" if self.crossings[c].is_over(k) else "UO"

    @cached_property
    def is_cellular(self) -> bool:
        return not self.merges

    def __repr__(self):
        return f"Diagram({self.name or '?'}, {len(self.crossings)} crossings)"


# -- parsing ---------------------------------------------------------------

_CORNER_RE = re.compile(r"^(\S+):([0-3])$")


def _parse_corner(tok: str, crossing_ids: dict[str, int], line: int, col: int) -> Corner:
    m = _CORNER_RE.match(tok)
    if not m or m.group(1) not in crossing_ids:
        raise WgadParseError(f"bad corner reference {tok!r}", line, col)
    return (crossing_ids[m.group(1)], int(m.group(2)))


def parse_wgad(text: str) -> Diagram:
    """Parse a ``.wgad`` document into a validated :class:`Diagram`."""
    lines = text.splitlines()
    version_seen = False
    name = ""
    ambient_kind = None
    declared = INF
    curves: list[CurveOnPi] = []
    crossings: list[Crossing] = []
    pending_merges: list[tuple[str, str, int, int]] = []
    for lineno, raw in enumerate(lines, 1):
        body = raw.split("#", 1)[0]
        toks = body.split()
        if not toks:
            continue
        col = raw.index(toks[0]) + 1
        head = toks[0]
        if not version_seen:
            if toks != ["wgad", "1"]:
                raise WgadParseError("expected version line 'wgad 1'", lineno, col)
            version_seen = True
            continue
        if head == "name":
            name = " ".join(toks[1:])
        elif head == "ambient":
            if ambient_kind is not None:
                raise WgadParseError("duplicate ambient line", lineno, col)
            if len(toks) < 2:
                raise WgadParseError("ambient needs a kind", lineno, col)
            ambient_kind = toks[1]
            if ambient_kind not in AmbientSpec.KINDS:
                raise WgadParseError(f"unknown ambient kind {ambient_kind!r}", lineno, col)
            for opt in toks[2:]:
                if not opt.startswith("r="):
                    raise WgadParseError(f"unknown ambient option {opt!r}", lineno, raw.index(opt) + 1)
                val = opt[2:]
                try:
                    declared = INF if val == "inf" else int(val)
                except ValueError:
                    raise WgadParseError(f"bad representativity {val!r}", lineno, raw.index(opt) + 1)
                if declared != INF and declared < 0:
                    raise WgadParseError("representativity must be nonnegative", lineno, raw.index(opt) + 1)
            if ambient_kind == "custom" and not any(t.startswith("r=") for t in toks[2:]):
                raise WgadParseError("custom ambient requires r=<n|inf>", lineno, col)
        elif head == "compressing":
            if len(toks) < 3 or toks[1] not in "+-":
                raise WgadParseError("usage: compressing <+|-> <edge>... | -", lineno, col)
            edges = () if toks[2:] == ["-"] else tuple(toks[2:])
            curves.append(CurveOnPi(edges, side=toks[1], name=f"{toks[1]}{len(curves)}"))
        elif head == "merge":
            if len(toks) != 3:
                raise WgadParseError("usage: merge <crossing>:<k> <crossing>:<k>", lineno, col)
            pending_merges.append((toks[1], toks[2], lineno, col))
        elif head == "x":
            if len(toks) != 7 or not toks[6].startswith("over="):
                raise WgadParseError("usage: x <id> <h0> <h1> <h2> <h3> over=<0|1>", lineno, col)
            over = toks[6][5:]
            if over not in ("0", "1"):
                raise WgadParseError(f"bad over value {over!r}", lineno, raw.index(toks[6]) + 1)
            if any(x.id == toks[1] for x in crossings):
                raise WgadParseError(f"duplicate crossing id {toks[1]}", lineno, col)
            try:
                crossings.append(Crossing(toks[1], tuple(toks[2:6]), int(over)))
            except ValueError as exc:
                raise WgadParseError(str(exc), lineno, col)
        else:
            raise WgadParseError(f"unknown directive {head!r}", lineno, col)
    if not version_seen:
        raise WgadParseError("empty document", 1, 1)
    if ambient_kind is None:
        ambient_kind = "sphere-s3"
    counts: dict[str, int] = {}
    for x in crossings:
        for h in x.slots:
            counts[h] = counts.get(h, 0) + 1
    for h, n in counts.items():
        if n == 1:
            raise WgadParseError(f"unpaired half-edge {h}")
        if n > 2:
            raise WgadParseError(f"half-edge {h} appears {n} times")
    for cv in curves:
        for e in cv.edges:
            if e not in counts:
                raise WgadParseError(f"compressing curve crosses unknown edge {e}")
    ids = {x.id: i for i, x in enumerate(crossings)}
    merges = tuple(
        (_parse_corner(a, ids, ln, col), _parse_corner(b, ids, ln, col))
        for a, b, ln, col in pending_merges
    )
    if ambient_kind == "heegaard-s3" and not curves:
        pass  # reported by representativity_report
    try:
        ambient = AmbientSpec(ambient_kind, declared, tuple(curves))
    except ValueError as exc:
        raise WgadParseError(str(exc))
    return Diagram(tuple(crossings), ambient, merges, name)


def format_wgad(d: Diagram) -> str:
    out = ["wgad 1"]
    if d.name:
        out.append(f"name {d.name}")
    a = d.ambient
    amb = f"ambient {a.kind}"
    if a.kind == "custom":
        amb += " r=" + ("inf" if a.declared_representativity == INF else str(int(a.declared_representativity)))
    out.append(amb)
    for cv in a.compressing_curves:
        out.append(f"compressing {cv.side} " + (" ".join(cv.edges) if cv.edges else "-"))
    for p, q in d.merges:
        out.append(f"merge {d.crossings[p[0]].id}:{p[1]} {d.crossings[q[0]].id}:{q[1]}")
    for x in d.crossings:
        out.append(f"x {x.id} {' '.join(x.slots)} over={x.over_pair}")
    return "\n".join(out) + "\n"


# -- regions and surface ---------------------------------------------------


def trace_regions(d: Diagram) -> tuple[list[Region], SurfaceInfo]:
    cycles = d.face_cycles
    uf = UnionFind(range(len(cycles)))
    for p, q in d.merges:
        uf.union(d.cycle_of_corner[p], d.cycle_of_corner[q])
    groups: dict[int, list[int]] = {}
    for i in range(len(cycles)):
        groups.setdefault(uf[i], []).append(i)
    ordered = sorted(groups.values(), key=min)
    regions = []
    for rid, members in enumerate(ordered):
        comps = tuple(tuple(d.corner_of(dt) for dt in cycles[i]) for i in sorted(members))
        regions.append(Region(rid, comps))

    # connected components of the diagram graph
    cu = UnionFind(range(len(d.crossings)))
    for a, b in d.edge_darts.values():
        cu.union(a[0], b[0])
    comp_of = {}
    for ci in range(len(d.crossings)):
        comp_of.setdefault(cu[ci], []).append(ci)
    comps = []
    for cid, members in enumerate(sorted(comp_of.values(), key=min)):
        ms = set(members)
        v = len(members)
        e = sum(1 for a, _ in d.edge_darts.values() if a[0] in ms)
        regs = [r for r in regions if r.boundary_components[0][0][0] in ms]
        f_chi = sum(2 - len(r.boundary_components) for r in regs)
        chi = v - e + f_chi
        if chi > 2 or (2 - chi) % 2:
            raise ValueError(f"inconsistent Euler characteristic {chi} on component {cid}")
        comps.append(SurfaceComponent(
            cid, (2 - chi) // 2, chi, tuple(r.id for r in regs),
            tuple(d.crossings[i].id for i in members)))
    return regions, SurfaceInfo(tuple(comps))


def trace_link_components(d: Diagram) -> list[tuple[str, ...]]:
    """Link components as cyclic edge sequences; strands continue through
    opposite slots."""
    seen: set[str] = set()
    comps = []
    for h in d.edges:
        if h in seen:
            continue
        seq = []
        dart = d.edge_darts[h][0]
        # walk so that we leave through ``dart``
        while True:
            lab = d.label(dart)
            if lab in seen:
                break
            seen.add(lab)
            seq.append(lab)
            c, t = d.partner(dart)
            dart = (c, (t + 2) % 4)
        comps.append(tuple(seq))
    return comps


def component_passes(d: Diagram) -> list[list[tuple[int, int]]]:
    """Per link component: the ordered crossing passes ``(crossing, slot)``
    where the strand arrives, aligned with :func:`trace_link_components`."""
    out = []
    for comp in trace_link_components(d):
        passes = []
        dart = d.edge_darts[comp[0]][0]
        for _ in comp:
            passes.append(d.partner(dart))
            c, t = d.partner(dart)
            dart = (c, (t + 2) % 4)
        out.append(passes)
    return out


# -- alternating / checkerboard ---------------------------------------------


@dataclass
class AlternatingReport:
    ok: bool
    offending: list[dict]

    def to_json(self):
        return {"ok": self.ok, "offending_corners": self.offending}


def check_alternating(d: Diagram, regions: list[Region] | None = None) -> AlternatingReport:
    if regions is None:
        regions, _ = trace_regions(d)
    bad = []
    for r in regions:
        for bi, comp in enumerate(r.boundary_components):
            types = [d.corner_type(c) for c in comp]
            if len(set(types)) > 1:
                majority = max(set(types), key=types.count)
                witness = next(c for c, t in zip(comp, types) if t != majority)
                bad.append({"region": r.id, "boundary": bi,
                            "crossing": d.crossings[witness[0]].id, "corner": witness[1]})
    return AlternatingReport(not bad, bad)


@dataclass
class ColoringResult:
    ok: bool
    colors: dict[int, str]
    obstruction: list[dict]

    def to_json(self):
        return {"ok": self.ok,
                "colors": {str(k): v for k, v in sorted(self.colors.items())},
                "obstruction": self.obstruction}


def region_boundary_type(d: Diagram, comp: Iterable[Corner]) -> str | None:
    types = {d.corner_type(c) for c in comp}
    return types.pop() if len(types) == 1 else None


def checkerboard_color(d: Diagram, regions: list[Region] | None = None) -> ColoringResult:
    """White regions read over-to-under along the traced (clockwise)
    boundary, i.e. under-to-over counterclockwise."""
    if regions is None:
        regions, _ = trace_regions(d)
    colors: dict[int, str] = {}
    obstruction = []
    for r in regions:
        kinds = [region_boundary_type(d, comp) for comp in r.boundary_components]
        if None in kinds:
            obstruction.append({"region": r.id, "reason": "boundary component not alternating"})
            continue
        if len(set(kinds)) > 1:
            obstruction.append({
                "region": r.id,
                "reason": "boundary components induce conflicting orientations",
                "boundary_types": kinds,
            })
            continue
        colors[r.id] = "white" if kinds[0] == "OU" else "shaded"
    if not obstruction:
        # every edge must separate the two colors
        rid_of = {}
        for r in regions:
            for c in r.corners:
                rid_of[c] = r.id
        for h, (a, b) in d.edge_darts.items():
            ra, rb = rid_of[d.corner_of(a)], rid_of[d.corner_of(b)]
            if colors[ra] == colors[rb]:
                obstruction.append({"edge": h, "regions": [ra, rb], "reason": "edge inside one color"})
    if obstruction:
        return ColoringResult(False, {}, obstruction)
    return ColoringResult(True, colors, [])


def colored_regions(d: Diagram) -> list[Region]:
    regions, _ = trace_regions(d)
    res = checkerboard_color(d, regions)
    if not res.ok:
        raise ValueError("not checkerboard colorable")
    return [Region(r.id, r.boundary_components, res.colors[r.id]) for r in regions]


# -- representativity -------------------------------------------------------


def representativity_report(d: Diagram, a: AmbientSpec | None = None) -> dict:
    a = a or d.ambient
    if a.kind in ("sphere-s3", "thickened-surface"):
        return {"kind": a.kind, "value": "inf", "status": "no essential compressing disk", "curves": []}
    if a.kind == "custom":
        v = a.declared_representativity
        return {"kind": a.kind, "value": "inf" if v == INF else int(v), "status": "user-asserted", "curves": []}
    if not a.compressing_curves:
        raise ValueError("heegaard-s3 ambient needs at least one compressing curve")
    regions, _ = trace_regions(d)
    _check_curves_on_pi(d, regions, a.compressing_curves)
    per_side: dict[str, int] = {}
    curves = []
    for cv in a.compressing_curves:
        n = cv.intersections
        per_side[cv.side] = min(per_side.get(cv.side, n), n)
        curves.append({"name": cv.name, "side": cv.side, "edges": list(cv.edges), "intersections": n})
    value = min(per_side.values())
    return {
        "kind": a.kind,
        "value": value,
        "status": "upper bound from supplied compressing curves",
        "per_side": {k: per_side[k] for k in sorted(per_side)},
        "curves": curves,
    }


def _check_curves_on_pi(d: Diagram, regions: list[Region], curves: Iterable[CurveOnPi]) -> None:
    rid_of = {}
    for r in regions:
        for c in r.corners:
            rid_of[c] = r.id
    sides = {h: {rid_of[d.corner_of(a)], rid_of[d.corner_of(b)]} for h, (a, b) in d.edge_darts.items()}
    for cv in curves:
        n = len(cv.edges)
        for i in range(n):
            e, f = cv.edges[i], cv.edges[(i + 1) % n]
            if not sides[e] & sides[f]:
                raise ValueError(f"curve {cv.name}: edges {e} and {f} share no region")


def representativity_value(d: Diagram, a: AmbientSpec | None = None) -> float:
    v = representativity_report(d, a)["value"]
    return INF if v == "inf" else v


# -- derived predicates -----------------------------------------------------


def is_string_of_bigons(d: Diagram, regions: list[Region] | None = None) -> bool:
    """Bigon-chain criterion: the bigon regions, viewed as edges between
    their two crossings, form one cycle through every crossing."""
    if regions is None:
        regions, _ = trace_regions(d)
    n = len(d.crossings)
    if n < 2:
        return False
    deg = [0] * n
    uf = UnionFind(range(n))
    nbigons = 0
    for r in regions:
        if not r.is_disk or len(r.boundary_components[0]) != 2:
            continue
        (c1, _), (c2, _) = r.boundary_components[0]
        if c1 == c2:
            return False
        deg[c1] += 1
        deg[c2] += 1
        uf.union(c1, c2)
        nbigons += 1
    if any(x != 2 for x in deg):
        return False
    return nbigons == n and len({uf[i] for i in range(n)}) == 1


def check_weakly_prime(d: Diagram) -> dict:
    from .curve import two_arc_curves, bounds_disk_with_sides

    regions, info = trace_regions(d)
    if not d.is_cellular:
        return {"ok": None, "status": "not evaluated: non-cellular region", "witness": None}
    from .chunk import side_complex

    sc = side_complex(d, "+")
    for pattern, edges in two_arc_curves(sc):
        comp = info.component_of_crossing(d.crossings[d.edge_darts[edges[0]][0][0]].id)
        disk, sides = bounds_disk_with_sides(pattern, sc)
        if not disk:
            continue
        # sides: list of (is_disk, crossing count) for complementary pieces
        disks = [s for s in sides if s["is_disk"]]
        if comp.genus == 0:
            ok = any(s["tiles"] == 0 for s in sides)
        else:
            ok = all(s["tiles"] == 0 for s in disks)
        if not ok:
            return {"ok": False, "status": "two-edge curve bounds a disk containing crossings",
                    "witness": {"edges": list(edges), "regions": [a.face for a in pattern.arcs]}}
    return {"ok": True, "status": "no violating two-edge curve", "witness": None}


@dataclass
class WgaReport:
    conditions: dict[str, dict]
    representativity: dict

    @property
    def ok(self) -> bool:
        return all(c["ok"] is True for c in self.conditions.values())

    def to_json(self):
        return {"ok": self.ok, "conditions": self.conditions, "representativity": self.representativity}


def validate_wga(d: Diagram, a: AmbientSpec | None = None) -> WgaReport:
    a = a or d.ambient
    regions, info = trace_regions(d)
    conds: dict[str, dict] = {}
    alt = check_alternating(d, regions)
    conds["1_alternating"] = alt.to_json()
    conds["2_weakly_prime"] = check_weakly_prime(d)
    touched = {x.id for x in d.crossings}
    conds["3_meets_every_component"] = {
        "ok": all(set(c.crossing_ids) & touched for c in info.components) and bool(info.components),
        "components": [c.id for c in info.components],
    }
    passes = component_passes(d)
    conds["4_components_cross"] = {"ok": all(len(p) > 0 for p in passes), "link_components": len(passes)}
    col = checkerboard_color(d, regions)
    conds["5_checkerboard"] = col.to_json()
    try:
        rep = representativity_report(d, a)
        v = INF if rep["value"] == "inf" else rep["value"]
        conds["6_representativity"] = {"ok": v >= 4, "value": rep["value"]}
    except ValueError as exc:
        rep = {"error": str(exc)}
        conds["6_representativity"] = {"ok": False, "value": None, "error": str(exc)}
    return WgaReport(conds, rep)
