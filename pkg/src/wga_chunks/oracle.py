"""Brute-force reference census.

Generates every cell-simple closed arc sequence within the size bound and
only then tests each one.  None of the predicates here are shared with the
pruned enumerator: embeddedness, normality, readings, word canonicalization,
the word rules and (on surfaces of genus at most one) the disk test are all
coded separately.
"""

from __future__ import annotations

from collections import deque

from .chunk import SIDES, ChunkDecomposition, SideComplex
from .curve import CurvePattern, FaceArc, Point, bounds_disk_with_sides
from .diagram import representativity_value
from .patterns import (TAG_B_PAIRS, TAG_NORMAL, TAG_PARITY, TAG_SADDLE_TWICE, TAG_SSSS, TAG_THREE_LETTER,
                       TAG_TWO_LETTER, check_tags)

ORACLE_MAX_CROSSINGS = 4
ORACLE_MAX_LETTERS = 6


def _canon_word(w: str) -> str:
    if not w:
        return w
    best = None
    for s in (w, w[::-1]):
        for k in range(len(s)):
            c = s[k:] + s[:k]
            if best is None or c < best:
                best = c
    return best


def _canon_arcs(arcs: tuple) -> tuple:
    n = len(arcs)
    return min(arcs[k:] + arcs[:k] for k in range(n))


def _generate(sc: SideComplex, max_letters: int):
    """All closed arc sequences, each cell crossed once, up to the bound;
    every rotation is produced and folded by a set."""
    faces = sc.faces
    kind = {c: v.kind for c, v in sc.cells.items()}
    other_occ = {}
    for c, v in sc.cells.items():
        other_occ[v.forward] = v.backward
        other_occ[v.backward] = v.forward
    seen = set()
    for c0, v0 in sc.cells.items():
        for start in (v0.forward, v0.backward):
            first = other_occ[start]
            stack = [(first, (), frozenset([c0]), 0)]
            while stack:
                (face, pin), arcs, used, size = stack.pop()
                word = faces[face].word
                tile = 1 if faces[face].kind == "truncation" else 0
                for q in range(len(word)):
                    if q == pin:
                        continue
                    # letters of the shortest reading: one per tile, one per interior edge
                    n = size + tile + (1 if kind[word[q]] == "interior" else 0)
                    if n > max_letters:
                        continue
                    new = arcs + ((face, pin, q),)
                    if (face, q) == start:
                        seen.add(_canon_arcs(new))
                        continue
                    cell = word[q]
                    if cell in used:
                        continue
                    stack.append((other_occ[(face, q)], new, used | {cell}, n))
    return sorted(seen)


def _embedded(arcs) -> bool:
    by_face: dict[str, list[tuple[int, int]]] = {}
    for f, i, j in arcs:
        by_face.setdefault(f, []).append((i, j))
    for chords in by_face.values():
        ends = sorted((pos, k) for k, ch in enumerate(chords) for pos in ch)
        stack = []
        for _, k in ends:
            if stack and stack[-1] == k:
                stack.pop()
            else:
                stack.append(k)
        if stack:
            return False
    return True


def _normal(sc: SideComplex, arcs) -> bool:
    for f, i, j in arcs:
        face = sc.faces[f]
        if face.kind != "interior":
            continue
        n = len(face.word)
        if not ((i + 1) % n == j or (j + 1) % n == i):
            continue
        ki, kj = sc.cells[face.word[i]].kind, sc.cells[face.word[j]].kind
        if ki != kj:
            return False
    return True


def _readings(sc: SideComplex, arcs) -> list[str]:
    word_p, word_b, admissible, tiles = [], [], True, 0
    for f, i, j in arcs:
        face = sc.faces[f]
        if face.kind == "truncation":
            tiles += 1
            word_p.append("P")
            if (i + 1) % 4 == j:
                corner = face.vertices[i]
            elif (j + 1) % 4 == i:
                corner = face.vertices[j]
            else:
                corner = None
            if corner is None or corner in sc.marked:
                admissible = False
        cell = face.word[j]
        if sc.cells[cell].kind == "interior":
            word_p.append("S")
            word_b.append("S")
        else:
            word_b.append("B")
    if not tiles:
        return ["".join(word_b)]
    return (["".join(word_p)] if admissible else []) + ["".join(word_b)]


def _word_forbidden(w: str, disk: bool, r: float, off) -> bool:
    letters = set(w)
    if "B" in letters:
        if "P" in letters or TAG_B_PAIRS in off:
            return False
        # each B must sit in a run of even length
        if len(w) == w.count("B"):
            return len(w) % 2 == 1
        k = w.index("S") if "S" in w else 0
        rot = w[k:] + w[:k]
        return any(len(run) % 2 for run in rot.split("S") if run)
    if not disk:
        return False
    n = len(w)
    if n == 2 and TAG_TWO_LETTER not in off:
        return True
    if n == 3 and TAG_THREE_LETTER not in off:
        return True
    if n % 2 == 1 and TAG_PARITY not in off:
        return True
    if w == "SSSS" and r > 4 and TAG_SSSS not in off:
        return True
    return False


def _genus_at_most_one(sc: SideComplex) -> bool:
    vs = {v for f in sc.faces.values() for v in f.vertices}
    chi = len(vs) - len(sc.cells) + len(sc.faces)
    return chi >= 0 and _connected(sc)


def _edges(sc: SideComplex):
    # endpoints from the face words: the cell at position i runs from
    # vertex i-1 to vertex i of its forward face
    out = {}
    for c, v in sc.cells.items():
        f, i = v.forward
        verts = sc.faces[f].vertices
        out[c] = (verts[i - 1], verts[i])
    return out


def _connected(sc: SideComplex) -> bool:
    edges = _edges(sc)
    adj: dict[str, set] = {}
    for a, b in edges.values():
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    if not adj:
        return True
    start = next(iter(adj))
    seen = {start}
    todo = deque([start])
    while todo:
        x = todo.popleft()
        for y in adj[x] - seen:
            seen.add(y)
            todo.append(y)
    return len(seen) == len(adj)


def _separating(sc: SideComplex, crossed: set[str]) -> bool:
    """2-color the vertices, switching color across crossed cells."""
    edges = _edges(sc)
    adj: dict[str, list] = {}
    for c, (a, b) in edges.items():
        flip = 1 if c in crossed else 0
        adj.setdefault(a, []).append((b, flip))
        adj.setdefault(b, []).append((a, flip))
    color: dict[str, int] = {}
    for s in adj:
        if s in color:
            continue
        color[s] = 0
        todo = deque([s])
        while todo:
            x = todo.popleft()
            for y, flip in adj[x]:
                want = color[x] ^ flip
                if y not in color:
                    color[y] = want
                    todo.append(y)
                elif color[y] != want:
                    return False
    return True


def _disk(sc: SideComplex, arcs, small_genus: bool) -> bool:
    crossed = {sc.faces[f].word[j] for f, _, j in arcs}
    if small_genus:
        # on a sphere or torus a simple closed curve bounds a disk exactly
        # when it separates
        return _separating(sc, crossed)
    p = CurvePattern(tuple(FaceArc(f, Point(i), Point(j)) for f, i, j in arcs))
    return bounds_disk_with_sides(p, sc)[0]


def _closing_loops(sc: SideComplex, cells: list[str]):
    """Arc sequences through ``cells`` in this cyclic order."""
    occ = {c: (sc.cells[c].forward, sc.cells[c].backward) for c in cells}
    other_occ = {}
    for c in cells:
        a, b = occ[c]
        other_occ[a], other_occ[b] = b, a
    n = len(cells)
    for start in occ[cells[0]]:
        face, pin = other_occ[start]
        arcs = []
        ok = True
        for k in range(1, n + 1):
            nxt = cells[k % n]
            target = [o for o in occ[nxt] if o[0] == face and o != (face, pin)]
            if k == n:
                target = [start] if start[0] == face else []
            if len(target) != 1:
                ok = False
                break
            q = target[0][1]
            arcs.append((face, pin, q))
            if k < n:
                face, pin = other_occ[target[0]]
        if ok:
            yield tuple(arcs)


def _saddle_twice(cd: ChunkDecomposition, sc: SideComplex, arcs, small_genus: bool) -> bool:
    """Two interior crossings of one crossing arc, separated by a single
    truncation-face traversal, that cut off a disk with that crossing."""
    cls = cd.class_of
    cross = [sc.faces[f].word[j] for f, _, j in arcs]
    n = len(cross)
    is_int = [sc.cells[c].kind == "interior" for c in cross]
    for a in range(n):
        if not is_int[a]:
            continue
        b = (a + 3) % n
        if not is_int[b] or is_int[(a + 1) % n] or is_int[(a + 2) % n]:
            continue
        if n < 4 and b == a:
            continue
        e1, e2 = cross[a], cross[b]
        if e1 == e2 or cls[e1] != cls[e2]:
            continue
        tile = arcs[(a + 2) % n][0]
        star = cls[e1]
        if tile == f"{sc.side}T:{star}":
            return True
        seg = [cross[(a + k) % n] for k in range(4)]
        label = e2.split(":", 1)[1]
        x = cd.diagram.crossings[cd.diagram.index[star]]
        for s2 in (k for k in range(4) if x.slots[k] == label):
            for k2 in ((s2 - 1) % 4, s2):
                loop = seg + [f"{sc.side}t:{star}:{k2}", f"{sc.side}t:{star}:{(k2 + 2) % 4}"]
                if len(set(loop)) != len(loop):
                    continue
                for cand in _closing_loops(sc, loop):
                    if _embedded(cand) and _disk(sc, cand, small_genus):
                        return True
    return False


class OracleLimitError(ValueError):
    pass


def oracle_census(cd: ChunkDecomposition, max_letters: int, disabled=(), allow_large: bool = False):
    from .census import assemble

    off = check_tags(disabled)
    if not allow_large and (len(cd.diagram.crossings) > ORACLE_MAX_CROSSINGS or max_letters > ORACLE_MAX_LETTERS):
        raise OracleLimitError(f"oracle limited to {ORACLE_MAX_CROSSINGS} crossings and "
                               f"{ORACLE_MAX_LETTERS} letters")
    r = representativity_value(cd.diagram)
    records = []
    for side in SIDES:
        sc = cd.sides[side]
        small = _genus_at_most_one(sc)
        for arcs in _generate(sc, max_letters):
            if not _embedded(arcs):
                continue
            if TAG_NORMAL not in off and not _normal(sc, arcs):
                continue
            words = [w for w in _readings(sc, arcs) if len(w) <= max_letters]
            if not words:
                continue
            disk = _disk(sc, arcs, small)
            if TAG_SADDLE_TWICE not in off and _saddle_twice(cd, sc, arcs, small):
                continue
            p = None
            for w in words:
                if _word_forbidden(_canon_word(w), disk, r, off):
                    continue
                if p is None:
                    p = CurvePattern(tuple(FaceArc(f, Point(i), Point(j)) for f, i, j in arcs))
                records.append((_canon_word(w), p, disk))
    name = cd.diagram.name or "diagram"
    return assemble(name, max_letters, off, r, records, "oracle")

