"""Construction helpers shared by the tests."""

from __future__ import annotations

from functools import lru_cache

from wga_chunks.census import enumerate_records
from wga_chunks.chunk import build_chunks
from wga_chunks.fixtures import load_fixture
from wga_chunks.curve import CurveError, CurvePattern, FaceArc, Point, _compact, validate_pattern
from wga_chunks.surface import NormalPiece, embed_disjointly, glue_pieces


@lru_cache(maxsize=None)
def decomposition(name: str):
    return build_chunks(load_fixture(name), force=True)


@lru_cache(maxsize=None)
def bbbb_curves(name: str):
    cd = decomposition(name)
    return tuple(p for w, p, disk in enumerate_records(cd, 4) if w == "BBBB" and disk)


def _interior_arcs(cd, p):
    sc = cd.sides[next(iter(p.sides))]
    return [(a.face, frozenset((a.entry.pos, a.exit.pos))) for a in p.arcs if sc.faces[a.face].kind == "interior"]


def _image(cd, arc):
    face, pos = arc
    side = face[0]
    out = {cd.glue(side, face, q) for q in pos}
    (g,) = {f for f, _ in out}
    return (g, frozenset(q for _, q in out))


def _embeds(cd, curves):
    for side in "+-":
        fam = [p for p in curves if next(iter(p.sides)) == side]
        if fam and embed_disjointly(fam, cd.sides[side]) is None:
            return False
    return True


def bbbb_chains(name: str, k: int, cyclic: bool = False, limit: int = 1, starts=None):
    """Sequences of BBBB disk curves, consecutive ones sharing an
    interior-face arc through the gluing, each curve using its two arcs for
    its two neighbours."""
    cd = decomposition(name)
    pool = bbbb_curves(name)
    arcs = [_interior_arcs(cd, p) for p in pool]
    where: dict = {}
    for i, lst in enumerate(arcs):
        for a in lst:
            where.setdefault(a, []).append(i)
    found = []

    def extend(path, free_arc):
        if len(found) >= limit:
            return
        if len(path) == k:
            if not cyclic:
                found.append(list(path))
                return
            if _image(cd, free_arc) == start_used[0]:
                found.append(list(path))
            return
        for j in where.get(_image(cd, free_arc), []):
            if j in path:
                continue
            back = _image(cd, free_arc)
            nxt = [a for a in arcs[j] if a != back]
            if len(nxt) != 1:
                continue
            if not _embeds(cd, [pool[i] for i in path + [j]]):
                continue
            path.append(j)
            extend(path, nxt[0])
            path.pop()

    if starts is None:
        starts = [(s, a) for s in range(len(pool)) for a in arcs[s]]
    for s, a_free in starts:
        rest = [a for a in arcs[s] if a != a_free]
        if len(rest) != 1:
            continue
        start_used = rest
        extend([s], a_free)
        if len(found) >= limit:
            break
    return [[pool[i] for i in c] for c in found]


def interior_arcs(name: str, index: int):
    cd = decomposition(name)
    return _interior_arcs(cd, bbbb_curves(name)[index])


def attached_complex(name: str, x: int, arc: int, m: int, variant: int = 0):
    """A non-disk piece with BBBB boundary (curve ``x`` of the pool) and a
    chain of ``m`` BBBB disks leaving through its interior arc ``arc``."""
    free = interior_arcs(name, x)[arc]
    kinds = ["other"] + ["disk"] * m
    good = []
    for curves in bbbb_chains(name, m + 1, limit=variant + 8, starts=[(x, free)]):
        cx = glue_pieces(chain_pieces(name, curves, kinds), decomposition(name), allow_open=True)
        # keep chains that touch the non-disk piece only where they start
        if sum(1 for a, b in cx.matching if "q0" in (a[0], b[0])) == 1:
            good.append(cx)
        if len(good) > variant:
            return good[variant]
    return None


def chain_pieces(name: str, curves, kinds=None, prefix="q"):
    """Globally ranked pieces for a family of curves (two sides)."""
    cd = decomposition(name)
    ranked = {}
    for side in "+-":
        idx = [i for i, p in enumerate(curves) if next(iter(p.sides)) == side]
        emb = embed_disjointly([curves[i] for i in idx], cd.sides[side]) if idx else []
        for i, q in zip(idx, emb):
            ranked[i] = q
    kinds = kinds or ["disk"] * len(curves)
    return [NormalPiece(f"{prefix}{i}", next(iter(curves[i].sides)), (ranked[i],), kinds[i], 0 if kinds[i] == "disk" else 1)
            for i in range(len(curves))]


def chain_complex(name: str, k: int, cyclic: bool = False):
    chains = bbbb_chains(name, k, cyclic)
    if not chains:
        return None
    cd = decomposition(name)
    return glue_pieces(chain_pieces(name, chains[0]), cd, allow_open=not cyclic)


def finger_moves(p, cd, i):
    """Every way to push arc ``i`` across one edge of its face and straight
    back, giving a pattern with a removable return."""
    a = p.arcs[i]
    sc = cd.sides[a.side]
    f = sc.faces[a.face]
    out = []
    for q, cell in enumerate(f.word):
        g, q2 = sc.across(a.face, q)
        m = sum(1 for b in p.arcs if b.side == a.side and sc.faces[b.face].word[b.exit.pos] == cell)
        for k in range(m + 1):
            for r1, r2 in ((k - 0.3, k - 0.2), (k - 0.2, k - 0.3)):
                arcs = (list(p.arcs[:i])
                        + [FaceArc(a.face, a.entry, Point(q, r1)), FaceArc(g, Point(q2, r1), Point(q2, r2)),
                           FaceArc(a.face, Point(q, r2), a.exit)]
                        + list(p.arcs[i + 1:]))
                try:
                    new = _compact(CurvePattern(tuple(arcs)), cd)
                    validate_pattern(new, cd)
                except CurveError:
                    continue
                out.append(new)
    return out


def random_ps_walk(cd, side, rng, max_arcs=24):
    """A random closed walk whose truncation-face arcs all cut a corner.
    Returns the arcs as ``(face, entry, exit)`` or None if it ran too long."""
    sc = cd.sides[side]
    interior = sorted(f for f, v in sc.faces.items() if v.kind == "interior")
    face0 = rng.choice(interior)
    pin0 = rng.randrange(len(sc.faces[face0].word))
    face, pin = face0, pin0
    arcs = []
    for _ in range(max_arcs):
        f = sc.faces[face]
        n = len(f.word)
        if f.kind == "truncation":
            q = (pin + rng.choice((1, -1))) % n
        else:
            q = rng.choice([k for k in range(n) if k != pin])
        arcs.append((face, pin, q))
        nf, npos = sc.across(face, q)
        if (nf, npos) == (face0, pin0):
            return arcs
        face, pin = nf, npos
    return None
