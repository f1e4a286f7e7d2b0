"""Normal pieces glued into surface complexes, BBBB/BBSS collections and
canonical stripping."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import networkx as nx
from networkx.utils import UnionFind

from .chunk import ChunkDecomposition, SideComplex, other
from .curve import (CurveError, CurvePattern, FaceArc, LetterWord, Point, _compact, check_normal, format_pattern,
                    parse_pattern, validate_pattern)
from .diagram import is_string_of_bigons, representativity_value

ArcRef = tuple[str, int, int]  # piece id, boundary index, arc index


class SurfaceError(ValueError):
    pass


@dataclass(frozen=True)
class NormalPiece:
    """A piece of the surface inside one chunk.

    ``boundary`` patterns carry ranks that are global on their side: a rank
    orders the point among all points of the complex on that cell."""

    id: str
    side: str
    boundary: tuple[CurvePattern, ...]
    kind: str = "disk"  # disk | other
    genus: int = 0

    @property
    def euler_characteristic(self) -> int:
        return 2 - 2 * self.genus - len(self.boundary)

    def to_json(self):
        return {"id": self.id, "side": self.side, "kind": self.kind, "genus": self.genus,
                "boundary": [format_pattern(b) for b in self.boundary]}


@dataclass
class NormalSurfaceComplex:
    cd: ChunkDecomposition
    pieces: dict[str, NormalPiece]
    matching: tuple[tuple[ArcRef, ArcRef], ...]
    open_arcs: tuple[ArcRef, ...] = ()
    words: dict[str, tuple[str, ...]] = field(default_factory=dict)

    @property
    def closed(self) -> bool:
        return not self.open_arcs

    def partner(self) -> dict[ArcRef, ArcRef]:
        out = {}
        for a, b in self.matching:
            out[a], out[b] = b, a
        return out

    def arc(self, ref: ArcRef) -> FaceArc:
        pid, b, i = ref
        return self.pieces[pid].boundary[b].arcs[i]

    def piece_kind(self, pid: str) -> str | None:
        """``BBBB`` or ``BBSS`` for disks with that boundary word."""
        pc = self.pieces[pid]
        if pc.kind != "disk" or len(pc.boundary) != 1:
            return None
        w = self.words[pid][0]
        return w if w in ("BBBB", "BBSS") else None

    @property
    def euler_characteristic(self) -> int:
        return _complex_chi(self, set(self.pieces))

    def to_json(self):
        return {"diagram": self.cd.diagram.name, "closed": self.closed,
                "euler_characteristic": self.euler_characteristic,
                "pieces": [self.pieces[k].to_json() | {"words": list(self.words.get(k, ()))}
                           for k in sorted(self.pieces)],
                "matching": [[list(a), list(b)] for a, b in self.matching],
                "open_arcs": [list(a) for a in self.open_arcs]}


def boundary_word(p: CurvePattern, sc: SideComplex) -> str:
    """B/S reading: one letter per crossing point."""
    out = []
    for a in p.arcs:
        cell = sc.faces[a.face].word[a.exit.pos]
        out.append("S" if sc.cells[cell].kind == "interior" else "B")
    return LetterWord("".join(out)).canonical()


# -- embedding pieces disjointly ----------------------------------------------


def _points(patterns, sc: SideComplex):
    """``cell -> [(pattern index, arc index, rank)]`` for exit points."""
    pts: dict[str, list] = {}
    for k, p in enumerate(patterns):
        for i, a in enumerate(p.arcs):
            pts.setdefault(sc.faces[a.face].word[a.exit.pos], []).append((k, i, a.exit.rank))
    return pts


def _disjoint(patterns, sc: SideComplex) -> list[str]:
    """Problems with a family of globally ranked patterns on one side."""
    problems = []
    pts = _points(patterns, sc)
    for cell, lst in pts.items():
        ranks = sorted(r for _, _, r in lst)
        if ranks != list(range(len(ranks))):
            problems.append(f"{cell}: ranks {ranks} are not 0..{len(ranks) - 1}")
    if problems:
        return problems
    m = {c: len(v) for c, v in pts.items()}
    chords: dict[str, list] = {}
    for k, p in enumerate(patterns):
        for a in p.arcs:
            f = a.face

            def key(pt):
                off = pt.rank if sc.is_forward(f, pt.pos) else m[sc.faces[f].word[pt.pos]] - 1 - pt.rank
                return (pt.pos, off)

            chords.setdefault(f, []).append((key(a.entry), key(a.exit)))
    for f, lst in chords.items():
        for (a, b), (c, d) in itertools.combinations(lst, 2):
            lo, hi = min(a, b), max(a, b)
            if (lo < c < hi) != (lo < d < hi):
                problems.append(f"{f}: arcs of the pieces cross")
                break
    return problems


def embed_disjointly(patterns, sc: SideComplex, limit: int = 200_000) -> list[CurvePattern] | None:
    """Re-rank separately embedded curves on one side so that together they
    are disjoint, keeping each curve's own order on every cell.  Returns
    ``None`` if no such ranking exists within ``limit`` trials."""
    patterns = [_compact(p, sc) for p in patterns]
    pts = _points(patterns, sc)
    cells = sorted(pts)
    # each cell: all interleavings of the per-curve sequences
    options = []
    for c in cells:
        by_curve: dict[int, list] = {}
        for k, i, r in sorted(pts[c], key=lambda t: (t[0], t[2])):
            by_curve.setdefault(k, []).append((k, i))
        owners = [k for k, seq in by_curve.items() for _ in seq]
        merges = sorted(set(itertools.permutations(owners)))
        opts = []
        for order in merges:
            it = {k: iter(seq) for k, seq in by_curve.items()}
            opts.append([next(it[k]) for k in order])
        options.append(opts)
    tried = 0
    for choice in itertools.product(*options):
        tried += 1
        if tried > limit:
            return None
        rank = {}
        for seq in choice:
            for r, ki in enumerate(seq):
                rank[ki] = r
        out = [_rerank(p, k, rank) for k, p in enumerate(patterns)]
        if not _disjoint(out, sc):
            return out
    return None


def _rerank(p: CurvePattern, k: int, rank: dict) -> CurvePattern:
    n = len(p.arcs)
    arcs = []
    for i, a in enumerate(p.arcs):
        r_in = rank[(k, (i - 1) % n)]
        r_out = rank[(k, i)]
        arcs.append(FaceArc(a.face, Point(a.entry.pos, r_in), Point(a.exit.pos, r_out)))
    return CurvePattern(tuple(arcs))


# -- gluing --------------------------------------------------------------------


def glue_pieces(pieces, cd: ChunkDecomposition, allow_open: bool = False) -> NormalSurfaceComplex:
    """Match every interior-face arc with the arc on the other side of the
    glued face.  With ``allow_open`` the result may be a sub-complex whose
    unmatched interior arcs are listed instead of rejected."""
    pieces = list(pieces)
    by_id = {}
    words = {}
    for pc in pieces:
        if pc.id in by_id:
            raise SurfaceError(f"duplicate piece id {pc.id}")
        if pc.kind not in ("disk", "other"):
            raise SurfaceError(f"{pc.id}: kind must be disk or other")
        if pc.kind == "disk" and (pc.genus or len(pc.boundary) != 1):
            raise SurfaceError(f"{pc.id}: a disk has genus 0 and one boundary curve")
        sc = cd.sides.get(pc.side)
        if sc is None or not pc.boundary:
            raise SurfaceError(f"{pc.id}: needs a side and at least one boundary curve")
        ws = []
        for b in pc.boundary:
            if b.sides != {pc.side}:
                raise SurfaceError(f"{pc.id}: boundary leaves side {pc.side}")
            try:
                own = _compact(b, cd)
                validate_pattern(own, cd)
            except CurveError as e:
                raise SurfaceError(f"{pc.id}: {e}") from None
            rep = check_normal(own, cd)
            if not rep.ok:
                raise SurfaceError(f"{pc.id}: boundary is not normal ({rep.violations[0]})")
            ws.append(boundary_word(b, sc))
        by_id[pc.id] = pc
        words[pc.id] = tuple(ws)
    for s, sc in cd.sides.items():
        fam = [b for pc in pieces if pc.side == s for b in pc.boundary]
        bad = _disjoint(fam, sc)
        if bad:
            raise SurfaceError(f"pieces on side {s} are not disjoint: {bad[0]}")
    # group interior arcs by (face, endpoint positions); parallel arcs pair in order
    groups: dict[tuple, list] = {}
    for pc in pieces:
        sc = cd.sides[pc.side]
        cnt = {c: len(v) for c, v in _points([b for q in pieces if q.side == pc.side for b in q.boundary], sc).items()}
        for bi, b in enumerate(pc.boundary):
            for i, a in enumerate(b.arcs):
                if sc.faces[a.face].kind != "interior":
                    continue
                pos = tuple(sorted((a.entry.pos, a.exit.pos)))
                lo = a.entry if a.entry.pos == pos[0] else a.exit
                cell = sc.faces[a.face].word[lo.pos]
                off = lo.rank if sc.is_forward(a.face, lo.pos) else cnt[cell] - 1 - lo.rank
                groups.setdefault((a.face, pos), []).append((off, (pc.id, bi, i)))
    matching, open_arcs, done = [], [], set()
    for (face, pos), lst in sorted(groups.items()):
        if (face, pos) in done:
            continue
        side = face[0]
        g_face, p0 = cd.glue(side, face, pos[0])
        _, p1 = cd.glue(side, face, pos[1])
        gkey = (g_face, tuple(sorted((p0, p1))))
        mine = [r for _, r in sorted(lst)]
        theirs = [r for _, r in sorted(groups.get(gkey, []))]
        done.update({(face, pos), gkey})
        if len(mine) != len(theirs):
            if not allow_open:
                what = "no arc" if not theirs else f"{len(theirs)} arcs for {len(mine)}"
                raise SurfaceError(f"unmatched interior-face arc in {face} at {list(pos)}: {what} in {g_face}")
            if theirs and mine:
                raise SurfaceError(f"ambiguous partial matching between {face} and {g_face}")
            open_arcs.extend(mine + theirs)
            continue
        # the gluing is a rotation of the face word, so nesting order is kept
        matching.extend((a, b) if a < b else (b, a) for a, b in zip(mine, theirs))
    x = NormalSurfaceComplex(cd, by_id, tuple(sorted(matching)), tuple(sorted(open_arcs)), words)
    for a, b in x.matching:
        _check_endpoints(x, a, b)
    return x


def _check_endpoints(x: NormalSurfaceComplex, a: ArcRef, b: ArcRef) -> None:
    A, B = x.arc(a), x.arc(b)
    side = A.side
    if B.side != other(side):
        raise SurfaceError(f"arcs {a} and {b} are on the same side")
    sa, sb = x.cd.sides[side], x.cd.sides[B.side]
    img = {x.cd.glue(side, A.face, p.pos)[1] for p in (A.entry, A.exit)}
    if img != {B.entry.pos, B.exit.pos}:
        raise SurfaceError(f"endpoint mismatch under the face gluing between {a} and {b}")
    ka = sorted(sa.cells[sa.faces[A.face].word[p.pos]].kind for p in (A.entry, A.exit))
    kb = sorted(sb.cells[sb.faces[B.face].word[p.pos]].kind for p in (B.entry, B.exit))
    if ka != kb:
        raise SurfaceError(f"arc types differ between {a} and {b}")


def _endpoint_pairs(x: NormalSurfaceComplex, a: ArcRef, b: ArcRef):
    """Identify the endpoint vertices of two matched arcs.  A vertex is
    ``(piece, boundary, point)``; point ``i`` is the exit of arc ``i``."""
    A, B = x.arc(a), x.arc(b)
    na = len(x.pieces[a[0]].boundary[a[1]].arcs)
    nb = len(x.pieces[b[0]].boundary[b[1]].arcs)
    a_in, a_out = (a[0], a[1], (a[2] - 1) % na), (a[0], a[1], a[2])
    b_in, b_out = (b[0], b[1], (b[2] - 1) % nb), (b[0], b[1], b[2])
    g_in = x.cd.glue(A.side, A.face, A.entry.pos)[1]
    if g_in == B.entry.pos:
        return [(a_in, b_in), (a_out, b_out)]
    return [(a_in, b_out), (a_out, b_in)]


def _complex_chi(x: NormalSurfaceComplex, keep: set[str]) -> int:
    uf = UnionFind()
    v_before = 0
    for pid in keep:
        for bi, b in enumerate(x.pieces[pid].boundary):
            for i in range(len(b.arcs)):
                uf[(pid, bi, i)]
                v_before += 1
    pairs = [(a, b) for a, b in x.matching if a[0] in keep and b[0] in keep]
    for a, b in pairs:
        for u, v in _endpoint_pairs(x, a, b):
            uf.union(u, v)
    v_after = len({uf[v] for v in list(uf)})
    return sum(x.pieces[p].euler_characteristic for p in keep) - (v_before - v_after) + len(pairs)


# -- collections ---------------------------------------------------------------


@dataclass
class Collection:
    kind: str
    pieces: tuple[str, ...]
    graph: nx.MultiGraph
    verdict: str  # disk | annulus
    diagnostics: list[str] = field(default_factory=list)
    complex: NormalSurfaceComplex | None = field(default=None, repr=False)

    def to_json(self):
        return {"kind": self.kind, "pieces": list(self.pieces), "verdict": self.verdict,
                "edges": [[u, v, list(k[0]), list(k[1])] for u, v, k in self.graph.edges(keys=True)],
                "diagnostics": self.diagnostics}


def hypothesis_flags(cd: ChunkDecomposition, kind: str) -> list[str]:
    flags = []
    if is_string_of_bigons(cd.diagram):
        flags.append("hypothesis unmet: the diagram is a string of bigons")
    if kind == "BBBB":
        r = representativity_value(cd.diagram)
        if not r > 4:
            flags.append(f"hypothesis unmet: representativity {r} is not above 4")
    return flags


def maximal_collections(x: NormalSurfaceComplex, kind: str) -> list[Collection]:
    """Connected groups of ``kind`` disks glued along interior-face arcs."""
    if kind not in ("BBBB", "BBSS"):
        raise ValueError("kind must be BBBB or BBSS")
    members = sorted(p for p in x.pieces if x.piece_kind(p) == kind)
    uf = UnionFind(members)
    edges = [(a, b) for a, b in x.matching if a[0] in uf.parents and b[0] in uf.parents]
    for a, b in edges:
        uf.union(a[0], b[0])
    flags = hypothesis_flags(x.cd, kind)
    out = []
    for group in sorted((sorted(g) for g in uf.to_sets()), key=lambda g: g[0]):
        g = nx.MultiGraph()
        g.add_nodes_from(group)
        for a, b in edges:
            if a[0] in group:
                g.add_edge(a[0], b[0], key=(a, b))
        acyclic = nx.is_forest(nx.Graph(g)) and g.number_of_edges() == nx.Graph(g).number_of_edges()
        verdict = "disk" if acyclic else "annulus"
        diag = list(flags)
        if verdict == "annulus":
            bigons = is_string_of_bigons(x.cd.diagram)
            diag.append("string of bigons: a cyclic chain of " + kind + " disks closes up only around a"
                        f" string of bigons (diagram is_string_of_bigons={str(bigons).lower()})")
        out.append(Collection(kind, tuple(group), g, verdict, diag, x))
    return out


@dataclass
class MixReport:
    ok: bool
    offending: list[tuple[ArcRef, ArcRef]]

    def to_json(self):
        return {"ok": self.ok, "offending": [[list(a), list(b)] for a, b in self.offending]}


def check_no_mixed(x: NormalSurfaceComplex) -> MixReport:
    """No BBBB disk may share an arc with a BBSS disk."""
    bad = []
    for a, b in x.matching:
        kinds = {x.piece_kind(a[0]), x.piece_kind(b[0])}
        if kinds == {"BBBB", "BBSS"}:
            bad.append((a, b))
    return MixReport(not bad, bad)


def collection_boundary_word(c: Collection) -> LetterWord:
    """Trace the boundary circle of a disk collection."""
    if c.verdict != "disk":
        raise SurfaceError("boundary word needs a disk collection")
    x = c.complex
    group = set(c.pieces)
    uf = UnionFind()
    letter = {}
    for pid in group:
        sc = x.cd.sides[x.pieces[pid].side]
        p = x.pieces[pid].boundary[0]
        for i, a in enumerate(p.arcs):
            v = (pid, 0, i)
            uf[v]
            cell = sc.faces[a.face].word[a.exit.pos]
            letter[v] = "S" if sc.cells[cell].kind == "interior" else "B"
    internal = set()
    for _, _, (a, b) in c.graph.edges(keys=True):
        internal.update({a, b})
        for u, v in _endpoint_pairs(x, a, b):
            uf.union(u, v)
    # after gluing: a vertex lies inside the union when all arcs at it are internal
    adj: dict = {}
    for pid in group:
        n = len(x.pieces[pid].boundary[0].arcs)
        for i in range(n):
            if (pid, 0, i) in internal:
                continue
            u, v = uf[(pid, 0, (i - 1) % n)], uf[(pid, 0, i)]
            adj.setdefault(u, []).append(v)
            adj.setdefault(v, []).append(u)
    if any(len(nb) != 2 for nb in adj.values()):
        raise SurfaceError("collection boundary is not a single circle")
    rep_letter = {}
    for v, ch in letter.items():
        r = uf[v]
        if rep_letter.setdefault(r, ch) != ch:
            raise SurfaceError("identified points carry different letters")
    start = min(adj)
    seq, prev, cur = [start], None, start
    while True:
        nb = adj[cur]
        nxt = nb[0] if nb[0] != prev or nb[0] == nb[1] else nb[1]
        if nxt == start:
            break
        seq.append(nxt)
        prev, cur = cur, nxt
        if len(seq) > len(adj):
            raise SurfaceError("collection boundary is not a single circle")
    if len(seq) != len(adj):
        raise SurfaceError("collection boundary is not a single circle")
    w = LetterWord("".join(rep_letter[v] for v in seq))
    if c.kind == "BBBB":
        assert set(w.letters) == {"B"}, "BBBB collection with a non-B boundary letter"
    else:
        assert "S" in w.letters, "BBSS collection boundary without an S"
    return w


# -- stripping -----------------------------------------------------------------


@dataclass
class StrippedComplex:
    pieces: dict[str, NormalPiece]
    matching: tuple[tuple[ArcRef, ArcRef], ...]
    marked: dict[str, tuple[tuple[int, int], ...]]  # arcs left on the boundary of a removed collection
    removed: list[Collection]
    flags: list[str]
    euler_characteristic: int
    diagram: str = ""

    def graph(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        for pid, pc in self.pieces.items():
            curves = tuple(sorted(_anchor(b) for b in pc.boundary))
            g.add_node(pid, anchor=(pc.side, pc.kind, pc.genus, curves, self._marks(pid)))
        for a, b in self.matching:
            g.add_edge(a[0], b[0], arcs=tuple(sorted((self._arc_anchor(a), self._arc_anchor(b)))))
        return g

    def _arc_anchor(self, ref: ArcRef):
        a = self.pieces[ref[0]].boundary[ref[1]].arcs[ref[2]]
        return (a.face, tuple(sorted((a.entry.pos, a.exit.pos))))

    def _marks(self, pid: str):
        return tuple(sorted(self._arc_anchor((pid, b, i)) for b, i in self.marked.get(pid, ())))

    def to_json(self):
        return {"pieces": [self.pieces[k].to_json() for k in sorted(self.pieces)],
                "matching": [[list(a), list(b)] for a, b in self.matching],
                "marked_arcs": {k: [list(v) for v in vs] for k, vs in sorted(self.marked.items())},
                "removed_collections": [c.to_json() for c in self.removed],
                "flags": self.flags, "euler_characteristic": self.euler_characteristic}


def _anchor(p: CurvePattern) -> str:
    arcs = tuple(FaceArc(a.face, Point(a.entry.pos), Point(a.exit.pos)) for a in p.arcs)
    return CurvePattern(arcs).canonical().to_text()


def canonical_strip(x: NormalSurfaceComplex) -> StrippedComplex:
    """Drop every maximal BBBB or BBSS disk collection, remembering where
    the rest was attached to them."""
    removed = [c for k in ("BBBB", "BBSS") for c in maximal_collections(x, k) if c.verdict == "disk"]
    gone = {p for c in removed for p in c.pieces}
    keep = set(x.pieces) - gone
    matching = tuple((a, b) for a, b in x.matching if a[0] in keep and b[0] in keep)
    marked: dict[str, list] = {}
    for a, b in x.matching:
        for u, v in ((a, b), (b, a)):
            if u[0] in keep and v[0] in gone:
                marked.setdefault(u[0], []).append((u[1], u[2]))
    flags = []
    if is_string_of_bigons(x.cd.diagram):
        flags.append("hypothesis unmet: the diagram is a string of bigons")
    return StrippedComplex({p: x.pieces[p] for p in sorted(keep)}, matching,
                           {k: tuple(sorted(v)) for k, v in marked.items()}, removed, flags,
                           _complex_chi(x, keep), x.cd.diagram.name)


def complexes_equivalent(a, b) -> bool:
    """Equal after stripping, up to renaming pieces; pieces are compared by
    their anchored boundary curves and marked arcs."""
    sa = a if isinstance(a, StrippedComplex) else canonical_strip(a)
    sb = b if isinstance(b, StrippedComplex) else canonical_strip(b)
    if sa.diagram != sb.diagram:
        return False
    ga, gb = sa.graph(), sb.graph()
    return nx.is_isomorphic(ga, gb, node_match=lambda u, v: u["anchor"] == v["anchor"],
                            edge_match=lambda e, f: sorted(d["arcs"] for d in e.values())
                            == sorted(d["arcs"] for d in f.values()))


# -- file format ---------------------------------------------------------------


def pieces_from_json(data: dict) -> list[NormalPiece]:
    out = []
    for k, p in enumerate(data.get("pieces", [])):
        bnd = p.get("boundary")
        if isinstance(bnd, str):
            bnd = [bnd]
        out.append(NormalPiece(str(p.get("id", f"p{k}")), p["side"], tuple(parse_pattern(t) for t in bnd),
                               p.get("kind", "disk"), int(p.get("genus", 0))))
    return out


def complex_to_file(x: NormalSurfaceComplex, diagram_text: str | None = None) -> dict:
    out = {"format": "wga-complex 1", "allow_open": not x.closed,
           "pieces": [x.pieces[k].to_json() for k in sorted(x.pieces)]}
    if diagram_text is not None:
        out["wgad"] = diagram_text
    return out


def complex_from_file(data: dict, cd: ChunkDecomposition) -> NormalSurfaceComplex:
    return glue_pieces(pieces_from_json(data), cd, allow_open=bool(data.get("allow_open", False)))


__all__ = ["NormalPiece", "NormalSurfaceComplex", "Collection", "StrippedComplex", "MixReport", "SurfaceError",
           "glue_pieces", "maximal_collections", "check_no_mixed", "collection_boundary_word", "canonical_strip",
           "complexes_equivalent", "embed_disjointly", "boundary_word", "pieces_from_json", "complex_to_file",
           "complex_from_file", "hypothesis_flags"]
