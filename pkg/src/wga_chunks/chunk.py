"""Decorated chunk boundaries, one-notch gluings and crossing-arc orbits.

Each side ``'+'`` / ``'-'`` of the projection surface is cellulated as
follows.  Every region becomes an *interior face* whose boundary word
alternates interior edges (copies of diagram edges) and truncation edges;
every crossing becomes a quadrilateral *truncation face* with four
truncation edges.  The vertex ``v(c, s)`` is the point where the interior
edge at slot ``s`` of crossing ``c`` meets the truncation face of ``c``.

Interior face words are listed in face-tracing order (clockwise seen from
the positive side); truncation faces are listed as ``t3, t2, t1, t0``,
which is the same orientation.  The gluing of a face from ``-`` to ``+``
shifts the word by one notch (an interior edge plus the following
truncation edge): forward for white faces, backward for shaded ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

from networkx.utils import UnionFind

from .diagram import Diagram, colored_regions, component_passes, trace_link_components, trace_regions

SIDES = ("+", "-")


def other(side: str) -> str:
    return "-" if side == "+" else "+"


def ecell(side: str, label: str) -> str:
    return f"{side}E:{label}"


def tcell(side: str, crossing: str, k: int) -> str:
    return f"{side}t:{crossing}:{k}"


def rface(side: str, rid: int) -> str:
    return f"{side}R{rid}"


def qface(side: str, crossing: str) -> str:
    return f"{side}T:{crossing}"


def vertex(side: str, crossing: str, slot: int) -> str:
    return f"{side}v:{crossing}:{slot}"


@dataclass(frozen=True)
class Face:
    id: str
    kind: str  # interior | truncation
    word: tuple[str, ...]
    vertices: tuple[str, ...]  # vertices[i] sits between word[i] and word[i + 1]
    anchor: str  # region id or crossing id
    color: str | None = None

    def positions(self, cell: str) -> list[int]:
        return [i for i, c in enumerate(self.word) if c == cell]


@dataclass(frozen=True)
class Cell:
    id: str
    kind: str  # interior | truncation
    forward: tuple[str, int]  # (face, position) traversing the cell canonically
    backward: tuple[str, int]
    ends: tuple[str, str]  # vertices at the start / end of the canonical direction


@dataclass(frozen=True, eq=False)
class SideComplex:
    """Cell structure of one boundary copy of the projection surface."""

    side: str
    diagram: Diagram
    faces: dict[str, Face]
    cells: dict[str, Cell]
    marked: frozenset[str] = frozenset()  # identified quad vertices

    def across(self, face: str, pos: int) -> tuple[str, int]:
        """The (face, position) on the other side of the cell at ``pos``."""
        cell = self.cells[self.faces[face].word[pos]]
        return cell.backward if cell.forward == (face, pos) else cell.forward

    def is_forward(self, face: str, pos: int) -> bool:
        return self.cells[self.faces[face].word[pos]].forward == (face, pos)

    @cached_property
    def vertex_ids(self) -> tuple[str, ...]:
        vs = set()
        for f in self.faces.values():
            vs.update(f.vertices)
        return tuple(sorted(vs))

    def euler_characteristic(self) -> int:
        return len(self.vertex_ids) - len(self.cells) + len(self.faces)

    def cell_order(self) -> dict[str, int]:
        return {c: i for i, c in enumerate(sorted(self.cells))}


def side_complex(d: Diagram, side: str, colors: dict[int, str] | None = None) -> SideComplex:
    if not d.is_cellular:
        raise ValueError("non-cellular diagram: declared annular regions are not supported here")
    regions, _ = trace_regions(d)
    faces: dict[str, Face] = {}
    occurrences: dict[str, list[tuple[str, int]]] = {}
    xid = [x.id for x in d.crossings]
    for r in regions:
        word, verts = [], []
        cyc = d.face_cycles[d.cycle_of_corner[r.boundary_components[0][0]]]
        for dart in cyc:
            c2, t = d.partner(dart)
            word.append(ecell(side, d.label(dart)))
            verts.append(vertex(side, xid[c2], t))
            word.append(tcell(side, xid[c2], t))
            nxt = d.face_next(dart)
            verts.append(vertex(side, xid[nxt[0]], nxt[1]))
        fid = rface(side, r.id)
        faces[fid] = Face(fid, "interior", tuple(word), tuple(verts), str(r.id),
                          None if colors is None else colors[r.id])
    for x in d.crossings:
        word = tuple(tcell(side, x.id, k) for k in (3, 2, 1, 0))
        verts = tuple(vertex(side, x.id, k) for k in (3, 2, 1, 0))
        fid = qface(side, x.id)
        faces[fid] = Face(fid, "truncation", word, verts, x.id)
    for f in faces.values():
        for i, c in enumerate(f.word):
            occurrences.setdefault(c, []).append((f.id, i))
    cells = {}
    for cid, occ in occurrences.items():
        if len(occ) != 2:
            raise AssertionError(f"cell {cid} bordered {len(occ)} times")
        kind = "interior" if ":" in cid and cid[1] == "E" else "truncation"
        if kind == "interior":
            label = cid.split(":", 1)[1]
            a, _ = d.edge_darts[label]
            start_face = None
            for fid, pos in occ:
                f = faces[fid]
                # the face traversing via dart ``a`` is the forward one
                prev_vertex = f.vertices[pos - 1]
                if prev_vertex == vertex(side, xid[a[0]], a[1]):
                    start_face = (fid, pos)
            if start_face is None:
                raise AssertionError(f"cannot orient {cid}")
            fwd = start_face
        else:
            fwd = next(o for o in occ if faces[o[0]].kind == "interior")
        bwd = occ[1] if occ[0] == fwd else occ[0]
        ff = faces[fwd[0]]
        ends = (ff.vertices[fwd[1] - 1], ff.vertices[fwd[1]])
        cells[cid] = Cell(cid, kind, fwd, bwd, ends)
    return SideComplex(side, d, faces, cells)


@dataclass(frozen=True)
class RotationGluing:
    region: int
    color: str
    length: int
    shift: int  # in cells, applied to positions of the '-' face to land on '+'

    def to_plus(self, pos: int) -> int:
        return (pos + self.shift) % self.length

    def to_minus(self, pos: int) -> int:
        return (pos - self.shift) % self.length

    def apply(self, side: str, pos: int) -> int:
        """Image of a position on ``side`` in the glued copy."""
        return self.to_plus(pos) if side == "-" else self.to_minus(pos)


@dataclass(frozen=True)
class CrossingArcClass:
    crossing: str
    cells: tuple[str, ...]  # four interior-edge cells, '+' first


@dataclass(frozen=True, eq=False)
class ChunkDecomposition:
    diagram: Diagram
    sides: dict[str, SideComplex]
    gluings: dict[int, RotationGluing]
    colors: dict[int, str]
    chunk_annotation: str = ""
    classes: tuple[CrossingArcClass, ...] = field(default=())

    @cached_property
    def class_of(self) -> dict[str, str]:
        return {c: k.crossing for k in self.classes for c in k.cells}

    def glue(self, side: str, face: str, pos: int) -> tuple[str, int]:
        """Image of an interior-face boundary position in the other side."""
        f = self.sides[side].faces[face]
        if f.kind != "interior":
            raise ValueError("only interior faces are glued")
        rid = int(f.anchor)
        g = self.gluings[rid]
        return rface(other(side), rid), g.apply(side, pos)

    def face_color(self, face_id: str) -> str | None:
        return self.sides[face_id[0]].faces[face_id].color

    def to_json(self) -> dict:
        out = {"diagram": self.diagram.name, "chunk_annotation": self.chunk_annotation, "sides": {}}
        for s in SIDES:
            sc = self.sides[s]
            out["sides"][s] = {
                "faces": [{"id": f.id, "kind": f.kind, "anchor": f.anchor, "color": f.color,
                           "word": list(f.word)} for f in sorted(sc.faces.values(), key=lambda f: f.id)],
                "marked_vertices": sorted(sc.marked),
                "euler_characteristic": sc.euler_characteristic(),
            }
        out["gluings"] = [{"region": g.region, "color": g.color, "length": g.length, "shift": g.shift}
                          for g in sorted(self.gluings.values(), key=lambda g: g.region)]
        out["crossing_arcs"] = [{"crossing": k.crossing, "cells": list(k.cells)}
                                for k in sorted(self.classes, key=lambda k: k.crossing)]
        return out


class DecompositionError(ValueError):
    pass


def _gluing_table(d: Diagram, regions, colors) -> dict[int, RotationGluing]:
    out = {}
    for r in regions:
        n = 2 * len(r.boundary_components[0])
        shift = 2 if colors[r.id] == "white" else -2
        out[r.id] = RotationGluing(r.id, colors[r.id], n, shift)
    return out


def build_chunks(d: Diagram, a=None, force: bool = False) -> ChunkDecomposition:
    """Build both decorated boundary copies and the gluing data.

    Unless ``force`` is set the diagram must pass :func:`validate_wga`;
    checkerboard colorability is required regardless.
    """
    from .diagram import validate_wga

    if not d.is_cellular:
        raise DecompositionError("non-cellular diagram: annular regions are outside the supported class")
    try:
        regions = colored_regions(d)
    except ValueError:
        raise DecompositionError("not checkerboard colorable")
    if not force:
        rep = validate_wga(d, a)
        if not rep.ok:
            failed = [k for k, v in rep.conditions.items() if v["ok"] is not True]
            raise DecompositionError("diagram is not WGA: " + ", ".join(failed))
    colors = {r.id: r.color for r in regions}
    sides = {s: side_complex(d, s, colors) for s in SIDES}
    gluings = _gluing_table(d, regions, colors)
    amb = (a or d.ambient).kind
    note = {"sphere-s3": "two chunks (balls)", "thickened-surface": "two chunks (surface x half-line)"}.get(
        amb, "chunk topology not computed")
    cd = ChunkDecomposition(d, sides, gluings, colors, note)
    classes = crossing_arc_classes(cd)
    cd = replace(cd, classes=tuple(classes))
    marked = {s: set() for s in SIDES}
    cls = cd.class_of
    for x in d.crossings:
        for s in SIDES:
            for slot, lab in enumerate(x.slots):
                if cls[ecell(s, lab)] == x.id:
                    marked[s].add(vertex(s, x.id, slot))
    cd.sides["+"] = replace(sides["+"], marked=frozenset(marked["+"]))
    cd.sides["-"] = replace(sides["-"], marked=frozenset(marked["-"]))
    return cd


def _edge_orbits(cd: ChunkDecomposition) -> list[list[str]]:
    cells = sorted(c for s in SIDES for c, v in cd.sides[s].cells.items() if v.kind == "interior")
    uf = UnionFind(cells)
    minus = cd.sides["-"]
    for fid, f in minus.faces.items():
        if f.kind != "interior":
            continue
        g = cd.gluings[int(f.anchor)]
        plus_word = cd.sides["+"].faces[rface("+", g.region)].word
        for pos, cell in enumerate(f.word):
            if minus.cells[cell].kind == "interior":
                uf.union(cell, plus_word[g.to_plus(pos)])
    groups: dict[str, list[str]] = {}
    for c in cells:
        groups.setdefault(uf[c], []).append(c)
    return sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])


def _class_candidates(d: Diagram, cells: list[str]) -> set[str]:
    per_side = {s: [c.split(":", 1)[1] for c in cells if c[0] == s] for s in SIDES}
    if len(cells) != 4 or any(len(v) != 2 for v in per_side.values()):
        raise DecompositionError(f"crossing-arc orbit {cells} is not 2 + 2")
    found = None
    for s in SIDES:
        h1, h2 = per_side[s]
        hits = set()
        for x in d.crossings:
            for i in range(4):
                if {x.slots[i], x.slots[(i + 2) % 4]} == {h1, h2} and h1 != h2:
                    hits.add(x.id)
        found = hits if found is None else found & hits
    if not found:
        raise DecompositionError(f"orbit {cells}: edges are not opposite at a common ideal vertex")
    return found


def crossing_arc_classes(cd: ChunkDecomposition) -> list[CrossingArcClass]:
    d = cd.diagram
    pending = {tuple(o): _class_candidates(d, o) for o in _edge_orbits(cd)}
    out = []
    # doubled edges (as on small tori) can leave several candidates, so
    # resolve forced choices first
    while pending:
        orb, cand = min(pending.items(), key=lambda kv: (len(kv[1]), kv[0]))
        if not cand:
            raise DecompositionError(f"orbit {list(orb)} has no free ideal vertex")
        x = min(cand, key=d.index.__getitem__)
        del pending[orb]
        for c in pending.values():
            c.discard(x)
        cells = tuple(sorted(orb, key=lambda c: (c[0] != "+", c)))
        out.append(CrossingArcClass(x, cells))
    return sorted(out, key=lambda k: d.index[k.crossing])


def truncation_gluing(cd: ChunkDecomposition, side: str, cell: str) -> str:
    """The truncation edge on the other side glued to ``cell``."""
    c = cd.sides[side].cells[cell]
    fid, pos = c.forward  # interior face
    f2, p2 = cd.glue(side, fid, pos)
    return cd.sides[other(side)].faces[f2].word[p2]


def tile_adjacency(cd: ChunkDecomposition) -> dict[str, set[str]]:
    adj: dict[str, set[str]] = {}
    for s in SIDES:
        sc = cd.sides[s]
        for cid, c in sc.cells.items():
            if c.kind != "truncation":
                continue
            tile = c.backward[0]
            img = truncation_gluing(cd, s, cid)
            tile2 = cd.sides[other(s)].cells[img].backward[0]
            adj.setdefault(tile, set()).add(tile2)
    return adj


def harlequin_tiling(cd: ChunkDecomposition) -> list[list[str]]:
    """Per link component, the cyclic strip of truncation faces met along
    the component: the ``+`` tile where it passes over, the ``-`` tile
    where it passes under."""
    d = cd.diagram
    adj = tile_adjacency(cd)
    strips = []
    for passes in component_passes(d):
        strip = []
        for c, slot in passes:
            x = d.crossings[c]
            strip.append(qface("+" if x.is_over(slot) else "-", x.id))
        n = len(strip)
        for i in range(n):
            a, b = strip[i], strip[(i + 1) % n]
            if n > 1 and b not in adj.get(a, ()):
                raise DecompositionError(f"harlequin strip does not close between {a} and {b}")
        strips.append(strip)
    used = [t for s in strips for t in s]
    if len(used) != len(set(used)) or len(used) != 2 * len(d.crossings):
        raise DecompositionError("truncation faces are not partitioned by the strips")
    return strips


def with_flipped_gluing(cd: ChunkDecomposition, region: int) -> ChunkDecomposition:
    """A corrupted copy with one gluing rotated the wrong way (for tests)."""
    gl = dict(cd.gluings)
    g = gl[region]
    gl[region] = replace(g, shift=-g.shift)
    return replace(cd, gluings=gl)


def verify_decomposition(cd: ChunkDecomposition) -> dict:
    d = cd.diagram
    regions, info = trace_regions(d)
    checks: dict[str, dict] = {}

    def record(name, fn):
        try:
            detail = fn()
            checks[name] = {"ok": True, **({"detail": detail} if detail is not None else {})}
        except (DecompositionError, AssertionError, KeyError) as exc:
            checks[name] = {"ok": False, "error": str(exc)}

    def counts():
        out = {}
        for s in SIDES:
            sc = cd.sides[s]
            nint = sum(1 for f in sc.faces.values() if f.kind == "interior")
            quads = [f for f in sc.faces.values() if f.kind == "truncation"]
            nie = sum(1 for c in sc.cells.values() if c.kind == "interior")
            nte = sum(1 for c in sc.cells.values() if c.kind == "truncation")
            assert nint == len(regions), f"{s}: {nint} interior faces for {len(regions)} regions"
            assert nie == len(d.edges), f"{s}: {nie} interior edges for {len(d.edges)} diagram edges"
            assert len(quads) == len(d.crossings) and all(len(q.word) == 4 for q in quads), "truncation faces"
            for f in sc.faces.values():
                if f.kind == "interior":
                    kinds = [sc.cells[c].kind for c in f.word]
                    assert kinds == ["interior", "truncation"] * (len(kinds) // 2), f"{f.id} word not alternating"
            out[s] = {"interior_faces": nint, "interior_edges": nie, "truncation_faces": len(quads),
                      "truncation_edges": nte}
        return out

    def euler():
        chi = sum(c.euler_characteristic for c in info.components)
        for s in SIDES:
            got = cd.sides[s].euler_characteristic()
            assert got == chi, f"{s}: decorated chi {got} != surface chi {chi}"
        return chi

    def gluing_bijective():
        for g in cd.gluings.values():
            img = {g.to_plus(p) for p in range(g.length)}
            assert len(img) == g.length, f"gluing of region {g.region} not bijective"
            assert g.shift % g.length != 0, f"gluing of region {g.region} is trivial"
        return None

    def orbits():
        classes = crossing_arc_classes(cd)
        assert len(classes) == len(d.crossings), f"{len(classes)} classes for {len(d.crossings)} crossings"
        return len(classes)

    def strips():
        return [len(s) for s in harlequin_tiling(cd)]

    def marks():
        for s in SIDES:
            sc = cd.sides[s]
            for x in d.crossings:
                m = sorted(k for k in range(4) if vertex(s, x.id, k) in sc.marked)
                assert m in ([0, 2], [1, 3]), f"{s}{x.id}: marked corners {m} not an opposite pair"
        return None

    record("cell_counts", counts)
    record("euler", euler)
    record("gluing_bijection", gluing_bijective)
    record("crossing_arc_orbits", orbits)
    record("harlequin_strips", strips)
    record("corner_identification", marks)
    return {"ok": all(c["ok"] for c in checks.values()), "checks": checks}


def link_component_count(d: Diagram) -> int:
    return len(trace_link_components(d))
