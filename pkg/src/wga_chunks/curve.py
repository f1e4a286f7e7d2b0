"""Closed transverse curves on decorated chunk boundaries.

A :class:`CurvePattern` is a cyclic list of :class:`FaceArc` values.  Arc
``i`` leaves its face through the cell at ``exit.pos`` and arc ``i + 1``
enters its face at ``entry.pos`` through the same point.  On one side the
two faces are the two faces of that cell; a step to the other side is only
allowed across a glued pair of truncation edges (this is how a meridian
passes between the tiles above and below the diagram).

Points on a cell are ordered by ``rank`` along the cell's canonical
direction, so several passes through a cell are unambiguous.  A closed
loop inside one face is a single arc with no endpoints.
"""

from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass, field

from networkx.utils import UnionFind

from .chunk import ChunkDecomposition, SideComplex, other, truncation_gluing
from .diagram import CurveOnPi, Diagram


class CurveError(ValueError):
    pass


class UnresolvableAtCurveLevel(CurveError):
    """A normality violation whose removal needs surface-level data."""

    def __init__(self, violation: dict, pattern: "CurvePattern", trace: list[dict]):
        super().__init__("unresolvable at curve level: " + violation["reason"])
        self.violation = violation
        self.pattern = pattern
        self.trace = trace


@dataclass(frozen=True, order=True)
class Point:
    pos: int
    rank: int = 0


@dataclass(frozen=True, order=True)
class FaceArc:
    face: str
    entry: Point | None
    exit: Point | None

    @property
    def side(self) -> str:
        return self.face[0]

    @property
    def is_loop(self) -> bool:
        return self.entry is None


@dataclass(frozen=True)
class CurvePattern:
    arcs: tuple[FaceArc, ...]

    def __len__(self):
        return len(self.arcs)

    @property
    def sides(self) -> frozenset[str]:
        return frozenset(a.side for a in self.arcs)

    def rotated(self, k: int) -> "CurvePattern":
        n = len(self.arcs)
        return CurvePattern(tuple(self.arcs[(i + k) % n] for i in range(n))) if n else self

    def canonical(self) -> "CurvePattern":
        if not self.arcs:
            return self
        return min((self.rotated(k) for k in range(len(self.arcs))), key=lambda p: p.arcs)

    def to_text(self) -> str:
        return format_pattern(self)


# -- context ---------------------------------------------------------------


def _complexes(ctx) -> tuple[dict[str, SideComplex], ChunkDecomposition | None]:
    if isinstance(ctx, ChunkDecomposition):
        return ctx.sides, ctx
    if isinstance(ctx, SideComplex):
        return {ctx.side: ctx}, None
    raise TypeError("expected a ChunkDecomposition or SideComplex")


def _cell_at(sides, face: str, pos: int) -> str:
    return sides[face[0]].faces[face].word[pos]


def _step_ok(sides, cd, a: FaceArc, b: FaceArc) -> bool:
    """Whether leaving ``a`` and entering ``b`` go through one point."""
    if a.is_loop or b.is_loop:
        return False
    if a.exit.rank != b.entry.rank:
        return False
    if a.side == b.side:
        return sides[a.side].across(a.face, a.exit.pos) == (b.face, b.entry.pos)
    if cd is None:
        return False
    sa, sb = sides[a.side], sides[b.side]
    fa, fb = sa.faces[a.face], sb.faces[b.face]
    if fa.kind != "truncation" or fb.kind != "truncation":
        return False
    cell = fa.word[a.exit.pos]
    return truncation_gluing(cd, a.side, cell) == fb.word[b.entry.pos]


def crossing_points(p: CurvePattern, ctx) -> list[tuple[str, str, int]]:
    """``(side, cell, rank)`` of the point after each arc (as seen from the
    arc being left)."""
    sides, _ = _complexes(ctx)
    return [(a.side, _cell_at(sides, a.face, a.exit.pos), a.exit.rank) for a in p.arcs if not a.is_loop]


def _points_per_cell(p: CurvePattern, ctx) -> Counter:
    sides, cd = _complexes(ctx)
    cnt: Counter = Counter()
    for i, a in enumerate(p.arcs):
        if a.is_loop:
            continue
        cell = _cell_at(sides, a.face, a.exit.pos)
        cnt[(a.side, cell)] += 1
        b = p.arcs[(i + 1) % len(p.arcs)]
        if b.side != a.side:
            cnt[(b.side, _cell_at(sides, b.face, b.entry.pos))] += 1
    return cnt


def _circle_key(sides, counts, face: str, pt: Point) -> tuple[int, int]:
    sc = sides[face[0]]
    cell = sc.faces[face].word[pt.pos]
    m = counts[(face[0], cell)]
    off = pt.rank if sc.is_forward(face, pt.pos) else m - 1 - pt.rank
    return (pt.pos, off)


def validate_pattern(p: CurvePattern, ctx) -> None:
    """Raise :class:`CurveError` unless the pattern is a closed embedded curve."""
    sides, cd = _complexes(ctx)
    n = len(p.arcs)
    if n == 0:
        raise CurveError("empty pattern")
    for a in p.arcs:
        if a.side not in sides or a.face not in sides[a.side].faces:
            raise CurveError(f"unknown face {a.face}")
        if (a.entry is None) != (a.exit is None):
            raise CurveError(f"arc in {a.face}: entry and exit must both be given")
        if not a.is_loop:
            size = len(sides[a.side].faces[a.face].word)
            for pt in (a.entry, a.exit):
                if not 0 <= pt.pos < size or pt.rank < 0:
                    raise CurveError(f"position {pt.pos}.{pt.rank} out of range in {a.face}")
    if any(a.is_loop for a in p.arcs):
        if n != 1:
            raise CurveError("a closed loop must be the only arc of its pattern")
        return
    for i in range(n):
        if not _step_ok(sides, cd, p.arcs[i], p.arcs[(i + 1) % n]):
            a, b = p.arcs[i], p.arcs[(i + 1) % n]
            raise CurveError(f"arcs {i} ({a.face}) and {(i + 1) % n} ({b.face}) do not share a crossing point")
    # ranks on each cell are 0..m-1, each used once
    seen: dict[tuple[str, str], set[int]] = {}
    for i, a in enumerate(p.arcs):
        cell = _cell_at(sides, a.face, a.exit.pos)
        bucket = seen.setdefault((a.side, cell), set())
        if a.exit.rank in bucket:
            raise CurveError(f"point {cell}.{a.exit.rank} used twice")
        bucket.add(a.exit.rank)
        b = p.arcs[(i + 1) % n]
        if b.side != a.side:
            cell2 = _cell_at(sides, b.face, b.entry.pos)
            bucket2 = seen.setdefault((b.side, cell2), set())
            if b.entry.rank in bucket2:
                raise CurveError(f"point {cell2}.{b.entry.rank} used twice")
            bucket2.add(b.entry.rank)
    for key, ranks in seen.items():
        if ranks != set(range(len(ranks))):
            raise CurveError(f"ranks on {key[1]} are not 0..{len(ranks) - 1}")
    counts = _points_per_cell(p, ctx)
    chords: dict[str, list[tuple[tuple, tuple, int]]] = {}
    for i, a in enumerate(p.arcs):
        x = _circle_key(sides, counts, a.face, a.entry)
        y = _circle_key(sides, counts, a.face, a.exit)
        chords.setdefault(a.face, []).append((min(x, y), max(x, y), i))
    for face, cs in chords.items():
        for (a1, b1, i), (a2, b2, j) in itertools.combinations(cs, 2):
            if (a1 < a2 < b1) != (a1 < b2 < b1):
                raise CurveError(f"arcs {i} and {j} cross inside {face}")


def is_embedded(p: CurvePattern, ctx) -> bool:
    try:
        validate_pattern(p, ctx)
        return True
    except CurveError:
        return False


# -- text form -------------------------------------------------------------

_ARC_RE = re.compile(r"face:(\S+)\s+in:(\S+)\s+out:(\S+)")


def _fmt_point(pt: Point | None) -> str:
    if pt is None:
        return "-"
    return str(pt.pos) if pt.rank == 0 else f"{pt.pos}.{pt.rank}"


def _parse_point(tok: str) -> Point | None:
    if tok == "-":
        return None
    pos, _, rank = tok.partition(".")
    try:
        return Point(int(pos), int(rank or 0))
    except ValueError:
        raise CurveError(f"bad position {tok!r}")


def format_pattern(p: CurvePattern) -> str:
    return "\n".join(f"face:{a.face} in:{_fmt_point(a.entry)} out:{_fmt_point(a.exit)}" for a in p.arcs) + "\n"


def parse_pattern(text: str) -> CurvePattern:
    arcs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        for chunk in re.split(r"\s*;\s*", body):
            if not chunk:
                continue
            m = _ARC_RE.fullmatch(chunk)
            if not m:
                raise CurveError(f"line {lineno}: expected 'face:<id> in:<pos> out:<pos>'")
            arcs.append(FaceArc(m.group(1), _parse_point(m.group(2)), _parse_point(m.group(3))))
    if not arcs:
        raise CurveError("empty pattern")
    return CurvePattern(tuple(arcs))


# -- construction from cell sequences -------------------------------------


def patterns_from_cells(ctx, side: str, cells: list[str]) -> list[CurvePattern]:
    """All one-sided patterns crossing the given distinct cells in cyclic
    order, one point per cell."""
    sides, _ = _complexes(ctx)
    sc = sides[side]
    n = len(cells)
    if n == 0 or len(set(cells)) != n:
        raise CurveError("cell sequence must be nonempty and without repeats")
    occ = []
    for c in cells:
        if c not in sc.cells:
            raise CurveError(f"unknown cell {c}")
        cc = sc.cells[c]
        occ.append((cc.forward, cc.backward))
    out = []
    for first in (0, 1):
        # crossing i goes from occ[i][d] to occ[i][1 - d]
        def extend(i, dirs):
            if i == n:
                if occ[0][first][0] == occ[n - 1][1 - dirs[-1]][0]:
                    yield list(dirs)
                return
            prev_face = occ[i - 1][1 - dirs[-1]][0]
            for d in (0, 1):
                if occ[i][d][0] == prev_face:
                    yield from extend(i + 1, dirs + [d])

        for dirs in extend(1, [first]):
            arcs = []
            for i in range(n):
                fid, pin = occ[i][1 - dirs[i]]
                _, pout = occ[(i + 1) % n][dirs[(i + 1) % n]]
                arcs.append(FaceArc(fid, Point(pin), Point(pout)))
            p = CurvePattern(tuple(arcs[-1:] + arcs[:-1]))
            if is_embedded(p, ctx) and p not in out:
                out.append(p)
    return out


def pattern_from_cells(ctx, side: str, cells: list[str]) -> CurvePattern:
    found = patterns_from_cells(ctx, side, cells)
    if not found:
        raise CurveError(f"no embedded curve crosses {cells} in order")
    return found[0]


def loop_in_face(face: str) -> CurvePattern:
    return CurvePattern((FaceArc(face, None, None),))


# -- letters ---------------------------------------------------------------


@dataclass(frozen=True)
class LetterWord:
    letters: str
    provenance: tuple = field(default=(), compare=False)

    def canonical(self) -> str:
        w = self.letters
        if not w:
            return ""
        cands = [w[i:] + w[:i] for i in range(len(w))]
        r = w[::-1]
        cands += [r[i:] + r[:i] for i in range(len(r))]
        return min(cands)

    def __str__(self):
        return self.letters

    def same_as(self, other: "LetterWord | str") -> bool:
        o = other if isinstance(other, LetterWord) else LetterWord(other)
        return self.canonical() == o.canonical()

    @property
    def weight(self) -> int:
        return self.letters.count("S")


def _tile_arc_kind(sc: SideComplex, a: FaceArc) -> tuple[str, str | None]:
    """Classify an arc in a truncation face: ``corner`` (with the cut
    vertex), ``opposite`` or ``return``."""
    i, j = a.entry.pos, a.exit.pos
    f = sc.faces[a.face]
    if i == j:
        return "return", None
    if (j - i) % 4 == 1:
        return "corner", f.vertices[i]
    if (i - j) % 4 == 1:
        return "corner", f.vertices[j]
    return "opposite", None


def tile_arcs_report(p: CurvePattern, ctx) -> list[dict]:
    sides, _ = _complexes(ctx)
    out = []
    for i, a in enumerate(p.arcs):
        sc = sides[a.side]
        if a.is_loop or sc.faces[a.face].kind != "truncation":
            continue
        kind, v = _tile_arc_kind(sc, a)
        out.append({"arc": i, "face": a.face, "kind": kind, "vertex": v,
                    "marked": v is not None and v in sc.marked})
    return out


@dataclass
class MeridianalReport:
    ok: bool
    reasons: list[str]

    def to_json(self):
        return {"ok": self.ok, "reasons": self.reasons}


def check_meridianal_form(p: CurvePattern, cd: ChunkDecomposition) -> MeridianalReport:
    """Two-tile meridian test: exactly two truncation faces, on opposite
    sides, each crossed between adjacent edges at an unmarked corner."""
    reasons = []
    sides, _ = _complexes(cd)
    if any(a.is_loop for a in p.arcs):
        return MeridianalReport(False, ["closed loop in a face"])
    tiles = tile_arcs_report(p, cd)
    if len(tiles) != 2:
        reasons.append(f"meets {len(tiles)} truncation faces, expected 2")
    elif {t["face"][0] for t in tiles} != {"+", "-"}:
        reasons.append("truncation faces are not on opposite sides")
    if len(tiles) != len(p.arcs):
        reasons.append("curve also runs through interior faces")
    for t in tiles:
        if t["kind"] != "corner":
            reasons.append(f"{t['face']}: arc does not join adjacent edges")
        elif t["marked"]:
            reasons.append(f"{t['face']}: cut corner {t['vertex']} is identified")
    return MeridianalReport(not reasons, reasons)


def meridianal_ok(p: CurvePattern, ctx) -> tuple[bool, list[str]]:
    """Requirement for reading truncation traversals as P letters.

    Two-sided patterns must pass :func:`check_meridianal_form`; for a curve
    on a single chunk boundary every truncation-face arc must cut off an
    unmarked corner."""
    sides, cd = _complexes(ctx)
    if len(p.sides) == 2:
        rep = check_meridianal_form(p, cd)
        return rep.ok, rep.reasons
    bad = []
    for t in tile_arcs_report(p, ctx):
        if t["kind"] != "corner":
            bad.append(f"{t['face']}: arc does not cut a single corner")
        elif t["marked"]:
            bad.append(f"{t['face']}: cut corner {t['vertex']} is identified")
    return not bad, bad


def label(p: CurvePattern, ctx, meridianal_mode: bool = False) -> LetterWord:
    validate_pattern(p, ctx)
    sides, _ = _complexes(ctx)
    if meridianal_mode:
        ok, why = meridianal_ok(p, ctx)
        if not ok:
            raise CurveError("pattern is not in meridianal form: " + "; ".join(why))
    letters, prov = [], []
    n = len(p.arcs)
    for i, a in enumerate(p.arcs):
        if a.is_loop:
            continue
        sc = sides[a.side]
        face = sc.faces[a.face]
        if meridianal_mode and face.kind == "truncation":
            letters.append("P")
            prov.append({"face": a.face})
        cell = face.word[a.exit.pos]
        if sc.cells[cell].kind == "interior":
            letters.append("S")
            prov.append({"cell": cell})
        elif not meridianal_mode:
            b = p.arcs[(i + 1) % n]
            tile = a.face if face.kind == "truncation" else b.face
            letters.append("B")
            prov.append({"cell": cell, "tile": tile})
    return LetterWord("".join(letters), tuple(prov))


def weight(p: CurvePattern, ctx) -> int:
    sides, _ = _complexes(ctx)
    return sum(1 for s, c, _ in crossing_points(p, ctx) if sides[s].cells[c].kind == "interior")


def check_b_pairs(w: LetterWord | str) -> bool:
    """B letters come in cyclically consecutive pairs entering and leaving
    one truncation face."""
    if isinstance(w, str):
        w = LetterWord(w)
    s = w.letters
    nb = s.count("B")
    if nb % 2:
        return False
    if nb == 0:
        return True
    if nb == len(s):
        runs = [len(s)]
        start = 0
    else:
        start = next(i for i in range(len(s)) if s[i] != "B")
        rot = s[start:] + s[:start]
        runs = [len(m.group()) for m in re.finditer("B+", rot)]
    if any(r % 2 for r in runs):
        return False
    if not w.provenance:
        return True
    n = len(s)
    rot_letters = [s[(start + i) % n] for i in range(n)]
    rot_prov = [w.provenance[(start + i) % n] for i in range(n)]
    offsets = [0, 1] if nb == n else [0]
    for off in offsets:
        idx = [i for i in range(n) if rot_letters[i] == "B"]
        idx = idx[off:] + idx[:off]
        if all(rot_prov[idx[k]].get("tile") == rot_prov[idx[k + 1]].get("tile") for k in range(0, len(idx), 2)):
            return True
    return False


def bb_color_flip(p: CurvePattern, ctx) -> list[bool]:
    """Per BB pair (tile traversal): whether the two interior faces on
    either side have different colors.  Adjacent edges flip, opposite
    edges preserve."""
    return [t["kind"] == "corner" for t in tile_arcs_report(p, ctx)]


# -- normality ---------------------------------------------------------------


@dataclass
class NormalityReport:
    ok: bool
    violations: list[dict]

    def to_json(self):
        return {"ok": self.ok, "violations": self.violations}


def _violations(p: CurvePattern, ctx) -> list[dict]:
    sides, _ = _complexes(ctx)
    out = []
    for i, a in enumerate(p.arcs):
        if a.is_loop:
            out.append({"condition": 2, "arc": i, "face": a.face})
            continue
        f = sides[a.side].faces[a.face]
        if a.entry.pos == a.exit.pos:
            out.append({"condition": 3, "arc": i, "face": a.face, "cell": f.word[a.entry.pos],
                        "innermost": abs(a.entry.rank - a.exit.rank) == 1})
            continue
        if f.kind != "interior":
            continue
        n = len(f.word)
        sc = sides[a.side]
        for t_pt, e_pt, role in ((a.entry, a.exit, "entry"), (a.exit, a.entry, "exit")):
            if sc.cells[f.word[t_pt.pos]].kind != "truncation":
                continue
            if sc.cells[f.word[e_pt.pos]].kind != "interior":
                continue
            if (e_pt.pos - t_pt.pos) % n == 1:
                v = f.vertices[t_pt.pos]
            elif (t_pt.pos - e_pt.pos) % n == 1:
                v = f.vertices[e_pt.pos]
            else:
                continue
            out.append({"condition": 4, "arc": i, "face": a.face, "truncation_edge": f.word[t_pt.pos],
                        "interior_edge": f.word[e_pt.pos], "vertex": v, "truncation_end": role})
    return out


def _is_innermost_corner(p: CurvePattern, ctx, viol: dict) -> bool:
    """No other curve point lies between the arc's endpoints on the side of
    the cut vertex."""
    sides, _ = _complexes(ctx)
    counts = _points_per_cell(p, ctx)
    a = p.arcs[viol["arc"]]
    x = _circle_key(sides, counts, a.face, a.entry)
    y = _circle_key(sides, counts, a.face, a.exit)
    lo, hi = min(x, y), max(x, y)
    n = len(sides[a.side].faces[a.face].word)
    wraps = (hi[0] - lo[0]) != 1  # the cut vertex lies between the far ends
    keys = []
    for j, b in enumerate(p.arcs):
        if b.face != a.face or j == viol["arc"]:
            continue
        keys += [_circle_key(sides, counts, b.face, b.entry), _circle_key(sides, counts, b.face, b.exit)]
    if not wraps:
        return not any(lo < k < hi for k in keys)
    return not any(k < lo or k > hi for k in keys) and (hi[0] - lo[0]) % n == n - 1


def check_normal(p: CurvePattern, ctx) -> NormalityReport:
    if not p.arcs:
        return NormalityReport(True, [])  # the curve was removed entirely
    validate_pattern(p, ctx)
    v = [{k: x for k, x in d.items() if k != "innermost"} for d in _violations(p, ctx)]
    return NormalityReport(not v, v)


# -- disk test ---------------------------------------------------------------


def _cut_surface(p: CurvePattern, sc: SideComplex) -> dict:
    """Cut the side complex along a one-sided pattern; returns component
    data for the two sides of the curve."""
    counts = _points_per_cell(p, sc)
    n = len(p.arcs)
    # points in each face, in circular order
    face_points: dict[str, list[tuple[tuple, int, str]]] = {}
    for i, a in enumerate(p.arcs):
        face_points.setdefault(a.face, []).append((_circle_key({sc.side: sc}, counts, a.face, a.entry), i, "in"))
        face_points.setdefault(a.face, []).append((_circle_key({sc.side: sc}, counts, a.face, a.exit), i, "out"))
    uf = UnionFind()
    piece_of: dict[tuple, tuple] = {}  # (face, pos, seg) -> piece
    vpiece: dict[tuple, tuple] = {}
    after_point: dict[tuple[int, str], tuple] = {}
    quad_pieces: dict[str, set] = {}
    for fid, f in sc.faces.items():
        pts = sorted(face_points.get(fid, []))
        keys = [k for k, _, _ in pts]
        m_of = lambda pos: counts[(sc.side, f.word[pos])]

        def piece_for(key):
            # index of the piece containing boundary location ``key``
            if not keys:
                return (fid, 0)
            j = sum(1 for k in keys if k < key) - 1
            return (fid, j % len(keys))

        for pos, cell in enumerate(f.word):
            m = m_of(pos)
            fwd = sc.is_forward(fid, pos)
            for off in range(m + 1):
                seg = off if fwd else m - off
                piece = piece_for((pos, off - 0.5))
                piece_of[(fid, pos, seg)] = piece
                uf[piece]
            vpiece[(fid, pos)] = piece_for((pos, m - 0.5 + 1e-9))  # vertex after cell at pos
        for j, (_, i, role) in enumerate(pts):
            after_point[(i, role)] = (fid, j)
        if pts:
            # chords: walking piece j to point j+1, jump across the chord
            partner = {}
            by_arc: dict[int, list[int]] = {}
            for j, (_, i, _) in enumerate(pts):
                by_arc.setdefault(i, []).append(j)
            for js in by_arc.values():
                partner[js[0]], partner[js[1]] = js[1], js[0]
            L = len(pts)
            for j in range(L):
                uf.union((fid, j), (fid, partner[(j + 1) % L]))
        if f.kind == "truncation":
            quad_pieces[fid] = {pc for pc in piece_of.values() if pc[0] == fid} or {(fid, 0)}
    # glue pieces across cells and around vertices
    for cid, c in sc.cells.items():
        m = counts[(sc.side, cid)]
        for seg in range(m + 1):
            uf.union(piece_of[(c.forward[0], c.forward[1], seg)], piece_of[(c.backward[0], c.backward[1], seg)])
    vertex_comp = {}
    for fid, f in sc.faces.items():
        for pos in range(len(f.word)):
            v = f.vertices[pos]
            if v in vertex_comp:
                uf.union(vertex_comp[v], vpiece[(fid, pos)])
            else:
                vertex_comp[v] = vpiece[(fid, pos)]
    root = uf.__getitem__
    pieces = {root(x) for x in piece_of.values()}
    comp = {r: {"V": 0, "E": 0, "F": 0, "tiles": set()} for r in pieces}
    all_pieces = set(piece_of.values())
    for pc in all_pieces:
        comp[root(pc)]["F"] += 1
    for fid in quad_pieces:
        for pc in quad_pieces[fid]:
            comp[root(pc)]["tiles"].add(fid)
    for v, pc in vertex_comp.items():
        comp[root(pc)]["V"] += 1
    for cid, c in sc.cells.items():
        m = counts[(sc.side, cid)]
        for seg in range(m + 1):
            comp[root(piece_of[(c.forward[0], c.forward[1], seg)])]["E"] += 1
        for r in range(m):
            # the point splits into a copy on each side
            comp[root(piece_of[(c.forward[0], c.forward[1], r)])]["V"] += 1
            comp[root(piece_of[(c.forward[0], c.forward[1], r + 1)])]["V"] += 1
    for i, a in enumerate(p.arcs):
        comp[root(after_point[(i, "in")])]["E"] += 1
        comp[root(after_point[(i, "out")])]["E"] += 1
    left = {root(after_point[(i, "in")]) for i in range(n)}
    right = {root(after_point[(i, "out")]) for i in range(n)}
    if len(left) != 1 or len(right) != 1:
        raise AssertionError("curve sides are not connected")
    return {"left": left.pop(), "right": right.pop(), "components": comp}


def bounds_disk_with_sides(p: CurvePattern, sc: SideComplex) -> tuple[bool, list[dict]]:
    """Cut along the curve; report each complementary side's Euler
    characteristic, whether it is a disk, and how many truncation faces
    (crossings) it contains."""
    if len(p.sides) != 1 or next(iter(p.sides)) != sc.side:
        raise CurveError("disk test needs a curve on a single side")
    validate_pattern(p, sc)
    if p.arcs[0].is_loop:
        inside = {"is_disk": True, "chi": 1, "tiles": 0}
        return True, [inside, {"is_disk": False, "chi": None, "tiles": None}]
    cut = _cut_surface(p, sc)
    comps = cut["components"]
    if cut["left"] == cut["right"]:
        c = comps[cut["left"]]
        return False, [{"is_disk": False, "chi": c["V"] - c["E"] + c["F"], "tiles": len(c["tiles"]),
                        "nonseparating": True}]
    out = []
    for key in ("left", "right"):
        c = comps[cut[key]]
        chi = c["V"] - c["E"] + c["F"]
        out.append({"is_disk": chi == 1, "chi": chi, "tiles": len(c["tiles"])})
    return any(s["is_disk"] for s in out), out


def bounds_disk(curve, ctx) -> bool:
    """Disk test for a :class:`CurvePattern` on one side, or a
    :class:`CurveOnPi` given as the edges it crosses."""
    if isinstance(curve, CurveOnPi):
        d = ctx if isinstance(ctx, Diagram) else ctx.diagram
        from .chunk import ecell, side_complex

        sc = side_complex(d, "+")
        if not curve.edges:
            return True
        curve = pattern_from_cells(sc, "+", [ecell("+", e) for e in curve.edges])
    else:
        sides, _ = _complexes(ctx)
        sc = sides[next(iter(curve.sides))]
    return bounds_disk_with_sides(curve, sc)[0]


def project_to_pi(p: CurvePattern, ctx) -> CurveOnPi:
    """Diagram edges crossed, in order (side tags dropped)."""
    sides, _ = _complexes(ctx)
    edges = tuple(c.split(":", 1)[1] for s, c, _ in crossing_points(p, ctx) if sides[s].cells[c].kind == "interior")
    return CurveOnPi(edges, side="".join(sorted(p.sides)) if len(p.sides) == 1 else "+")


def two_arc_curves(sc: SideComplex):
    """Curves made of two arcs, each in one interior face, crossing two
    distinct interior edges."""
    interior = sorted(c for c, v in sc.cells.items() if v.kind == "interior")
    for e1, e2 in itertools.combinations(interior, 2):
        f1 = {sc.cells[e1].forward[0], sc.cells[e1].backward[0]}
        f2 = {sc.cells[e2].forward[0], sc.cells[e2].backward[0]}
        if f1 != f2 or len(f1) != 2:
            continue
        for p in patterns_from_cells(sc, sc.side, [e1, e2]):
            yield p, (e1.split(":", 1)[1], e2.split(":", 1)[1])


# -- saddle twice --------------------------------------------------------------


def check_saddle_twice(p: CurvePattern, cd: ChunkDecomposition) -> list[dict]:
    """Arcs that run from an interior edge back to an edge of the same
    crossing arc while cutting off a disk."""
    validate_pattern(p, cd)
    sides, _ = _complexes(cd)
    out = []
    cls = cd.class_of
    for v in _violations(p, cd):
        if v["condition"] == 3 and sides[v["face"][0]].cells[v["cell"]].kind == "interior":
            out.append({"case": "same_edge", "arc": v["arc"], "face": v["face"], "cell": v["cell"]})
    if len(p.sides) != 1:
        return out
    side = next(iter(p.sides))
    sc = sides[side]
    pts = crossing_points(p, cd)
    n = len(pts)
    s_idx = [i for i, (_, c, _) in enumerate(pts) if sc.cells[c].kind == "interior"]
    for a, b in zip(s_idx, s_idx[1:] + s_idx[:1]):
        if a == b:
            continue
        between = [(j % n) for j in range(a + 1, a + 1 + (b - a) % n)]
        mids = between[:-1]
        if len(mids) != 2:
            continue
        t1, t2 = pts[mids[0]][1], pts[mids[1]][1]
        if sc.cells[t1].kind != "truncation" or sc.cells[t2].kind != "truncation":
            continue
        e1, e2 = pts[a][1], pts[b][1]
        if e1 == e2 or cls[e1] != cls[e2]:
            continue
        tile = p.arcs[(mids[0] + 1) % len(p.arcs)].face
        star = cls[e1]
        disk = _saddle_loop_is_disk(p, cd, sc, a, b, star, tile)
        if disk:
            out.append({"case": "same_class_across_tile", "cells": [e1, e2], "tile": tile, "crossing": star})
    return out


def _saddle_loop_is_disk(p, cd, sc, a, b, star, tile) -> bool:
    from .chunk import qface, tcell

    if tile == qface(sc.side, star):
        return True  # the whole loop sits next to one crossing
    pts = crossing_points(p, cd)
    n = len(pts)
    seg = [pts[(a + k) % n][1] for k in range((b - a) % n + 1)]
    d = cd.diagram
    x = d.crossings[d.index[star]]
    e2 = pts[b][1].split(":", 1)[1]
    slots = [k for k in range(4) if x.slots[k] == e2]
    for s2 in slots:
        for k2 in (s2 - 1, s2):
            k2 %= 4
            closing = [tcell(sc.side, star, k2), tcell(sc.side, star, (k2 + 2) % 4)]
            cells = seg + closing
            if len(set(cells)) != len(cells):
                continue
            for q in patterns_from_cells(sc, sc.side, cells):
                if bounds_disk_with_sides(q, sc)[0]:
                    return True
    return False


# -- normalization -----------------------------------------------------------


def _compact(p: CurvePattern, ctx) -> CurvePattern:
    """Renumber ranks on every cell to 0..m-1, keeping their order."""
    sides, _ = _complexes(ctx)
    n = len(p.arcs)
    if n == 0 or p.arcs[0].is_loop:
        return p
    per_cell: dict[tuple[str, str], list[int]] = {}
    for i, a in enumerate(p.arcs):
        per_cell.setdefault((a.side, _cell_at(sides, a.face, a.exit.pos)), []).append(a.exit.rank)
    remap = {k: {r: j for j, r in enumerate(sorted(set(v)))} for k, v in per_cell.items()}
    arcs = []
    for i, a in enumerate(p.arcs):
        prev = p.arcs[(i - 1) % n]
        key_in = (prev.side, _cell_at(sides, prev.face, prev.exit.pos))
        key_out = (a.side, _cell_at(sides, a.face, a.exit.pos))
        arcs.append(FaceArc(a.face, Point(a.entry.pos, remap[key_in][prev.exit.rank]),
                            Point(a.exit.pos, remap[key_out][a.exit.rank])))
    return CurvePattern(tuple(arcs))


def _reverse(p: CurvePattern) -> CurvePattern:
    return CurvePattern(tuple(FaceArc(a.face, a.exit, a.entry) for a in reversed(p.arcs)))


def _violation_key(p: CurvePattern, v: dict):
    a = p.arcs[v["arc"]]
    return (a.face, min(a.entry, a.exit) if a.entry else Point(-1))


def _remove_return(p: CurvePattern, ctx, i: int) -> CurvePattern:
    n = len(p.arcs)
    if n == 1:
        raise CurveError("a single arc returning to its own point is not embedded")
    prev, nxt = p.arcs[(i - 1) % n], p.arcs[(i + 1) % n]
    if n == 2:
        return loop_in_face(prev.face)
    merged = FaceArc(prev.face, prev.entry, nxt.exit)
    keep = [p.arcs[(i + 2 + k) % n] for k in range(n - 3)]
    res = CurvePattern(tuple([merged] + keep))
    return _compact(res, ctx)


def normalize(p: CurvePattern, ctx, max_moves: int = 10_000) -> tuple[CurvePattern, list[dict]]:
    """Remove normality violations, (2) before (3) before (4), each at the
    least position.  Every move records its weight change."""
    sides, cd = _complexes(ctx)
    validate_pattern(p, ctx)
    was_meridianal = meridianal_ok(p, ctx)[0] if p.arcs else True
    trace: list[dict] = []
    cur = p
    for _ in range(max_moves):
        if not cur.arcs:
            break
        viols = _violations(cur, ctx)
        if not viols:
            break
        w0 = weight(cur, ctx)
        v2 = [v for v in viols if v["condition"] == 2]
        v3 = [v for v in viols if v["condition"] == 3 and v["innermost"]]
        v4 = [v for v in viols if v["condition"] == 4 and _is_innermost_corner(cur, ctx, v)]
        if v2:
            v = v2[0]
            nxt = CurvePattern(())
            entry = {"condition": 2, "face": v["face"], "weight_delta": 0}
        elif v3:
            v = min(v3, key=lambda v: _violation_key(cur, v))
            nxt = _remove_return(cur, ctx, v["arc"])
            entry = {"condition": 3, "face": v["face"], "cell": v["cell"]}
        elif v4:
            v = min(v4, key=lambda v: _violation_key(cur, v))
            nxt = _corner_push(cur, ctx, v, trace)
            entry = {"condition": 4, "face": v["face"], "vertex": v["vertex"],
                     "interior_edge": v["interior_edge"]}
        else:
            raise CurveError("violations present but none innermost (pattern not embedded?)")
        if nxt.arcs:
            validate_pattern(nxt, ctx)
        entry["weight_delta"] = (weight(nxt, ctx) if nxt.arcs else 0) - w0
        trace.append(entry)
        if was_meridianal and nxt.arcs and not meridianal_ok(nxt, ctx)[0]:
            raise UnresolvableAtCurveLevel(
                {"reason": "sliding the corner breaks meridianal form; both sides are needed", **entry}, cur, trace)
        cur = nxt
    else:
        raise CurveError("normalization did not terminate")
    return (cur.canonical() if cur.arcs else cur), trace


def _corner_push(p: CurvePattern, ctx, v: dict, trace) -> CurvePattern:
    """Slide the arc cutting a corner between a truncation edge and an
    interior edge across that corner's vertex."""
    sides, _ = _complexes(ctx)
    i = v["arc"]
    if v["truncation_end"] == "exit":
        # orient so the arc runs from the truncation edge to the interior edge
        rev = _reverse(p)
        j = len(p.arcs) - 1 - i
        out = _corner_push(rev, ctx, {**v, "arc": j, "truncation_end": "entry"}, trace)
        return _reverse(out).canonical() if out.arcs and not out.arcs[0].is_loop else out
    n = len(p.arcs)
    a = p.arcs[i]
    prev, nxt = p.arcs[(i - 1) % n], p.arcs[(i + 1) % n]
    sc = sides[a.side]
    if prev.side != a.side:
        raise UnresolvableAtCurveLevel({"reason": "truncation face on the other side", **v}, p, trace)
    vtx = v["vertex"]
    # the other truncation edge at the cut vertex is in the quad, next to t
    q = sc.faces[prev.face]
    t_in_q = prev.exit.pos
    cand = [(t_in_q + 1) % 4, (t_in_q - 1) % 4]
    tq = None
    for c in cand:
        lo = t_in_q if c == (t_in_q + 1) % 4 else c
        if q.vertices[lo] == vtx:
            tq = c
    if tq is None:
        raise CurveError("corner vertex not found on the truncation face")
    t_new = q.word[tq]
    f2, p2 = sc.across(q.id, tq)
    if f2 != nxt.face:
        raise CurveError("interior faces around the vertex do not match")
    counts = _points_per_cell(p, ctx)
    m = counts[(a.side, t_new)]
    # the new point sits at the vertex end of t_new
    end_is_start = sc.cells[t_new].ends[0] == vtx
    rank = -1 if end_is_start else m
    new_prev = FaceArc(prev.face, prev.entry, Point(tq, rank))
    new_next = FaceArc(nxt.face, Point(p2, rank), nxt.exit)
    keep = [p.arcs[(i + 2 + k) % n] for k in range(n - 3)]
    return _compact(CurvePattern(tuple([new_prev, new_next] + keep)), ctx)
