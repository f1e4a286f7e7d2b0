"""Exhaustive census of short boundary curves on chunk boundaries.

The census covers closed curves on one side that cross every cell at most
once.  Each curve is read two ways when it meets truncation faces: with a P
per truncation-face traversal (only if every traversal cuts off a single
unmarked corner) and with a B per truncation-edge crossing.  A curve that
meets no truncation face has a single all-S word.  Each reading within the
letter bound is a *record*; filters remove records, and the census groups
surviving records by canonical word.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

from .chunk import SIDES, ChunkDecomposition
from .curve import CurvePattern, FaceArc, LetterWord, Point, bounds_disk_with_sides, check_saddle_twice
from .diagram import representativity_value
from .patterns import (TAG_B_PAIRS, TAG_NORMAL, TAG_SADDLE_TWICE, TAGS, WORD_TAGS, WordClassification,
                       check_tags, classify_word)

MAX_LETTERS = 12


class GuardRailError(ValueError):
    pass


@dataclass
class CensusEntry:
    word: str
    count: int
    disk_count: int
    sample: CurvePattern | None
    classification: WordClassification

    def to_json(self):
        return {"word": self.word, "count": self.count, "disk_count": self.disk_count,
                "sample": self.sample.to_text() if self.sample else None,
                "classification": self.classification.to_json()}


@dataclass
class Census:
    diagram: str
    max_letters: int
    disabled: frozenset[str]
    representativity: float
    entries: list[CensusEntry] = field(default_factory=list)
    raw_records: int = 0
    source: str = "enumerate"

    @property
    def filters(self) -> dict[str, bool]:
        return {t: t not in self.disabled for t in TAGS}

    def counts(self) -> dict[str, int]:
        return {e.word: e.count for e in self.entries}

    def _body(self) -> dict:
        r = self.representativity
        return {"diagram": self.diagram, "max_letters": self.max_letters, "filters": self.filters,
                "representativity": "inf" if r == math.inf else r,
                "entries": [e.to_json() for e in self.entries]}

    @property
    def digest(self) -> str:
        blob = json.dumps(self._body(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def to_json(self) -> dict:
        out = self._body()
        out["source"] = self.source
        out["surviving_records"] = sum(e.count for e in self.entries)
        out["digest"] = self.digest
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Census":
        from .curve import parse_pattern

        r = data.get("representativity", "inf")
        disabled = frozenset(t for t, on in data.get("filters", {}).items() if not on)
        c = cls(data["diagram"], int(data["max_letters"]), disabled, math.inf if r == "inf" else r,
                source=data.get("source", "file"))
        for e in data.get("entries", []):
            cl = e["classification"]
            wc = WordClassification(cl["word"], cl["verdict"], [(x["tag"], x["note"]) for x in cl["reasons"]],
                                    math.inf if cl.get("representativity") == "inf" else cl.get("representativity"))
            c.entries.append(CensusEntry(e["word"], e["count"], e["disk_count"],
                                         parse_pattern(e["sample"]) if e.get("sample") else None, wc))
        return c


def guard(max_letters: int, limit: int = MAX_LETTERS, allow_large: bool = False) -> None:
    if max_letters < 0:
        raise ValueError("max_letters must be nonnegative")
    if max_letters > limit and not allow_large:
        raise GuardRailError(f"max_letters {max_letters} exceeds the guard rail of {limit}")


def readings(p: CurvePattern, cd: ChunkDecomposition) -> list[LetterWord]:
    """The P-reading (when admissible) and the B-reading of a one-sided
    pattern, or its single S-word when it meets no truncation face."""
    side = next(iter(p.sides))
    sc = cd.sides[side]
    p_letters, b_letters = [], []
    p_ok, tiles = True, 0
    for a in p.arcs:
        f = sc.faces[a.face]
        if f.kind == "truncation":
            tiles += 1
            i, j = a.entry.pos, a.exit.pos
            if (j - i) % 4 == 1:
                v = f.vertices[i]
            elif (i - j) % 4 == 1:
                v = f.vertices[j]
            else:
                v = None
            if v is None or v in sc.marked:
                p_ok = False
            p_letters.append("P")
        cell = f.word[a.exit.pos]
        if sc.cells[cell].kind == "interior":
            p_letters.append("S")
            b_letters.append("S")
        else:
            b_letters.append("B")
    if tiles == 0:
        return [LetterWord("".join(b_letters))]
    out = [LetterWord("".join(p_letters))] if p_ok else []
    out.append(LetterWord("".join(b_letters)))
    return out


def assemble(diagram: str, max_letters: int, disabled, r: float, records, source: str) -> Census:
    """Group surviving ``(word, pattern, is_disk)`` records by canonical word."""
    groups: dict[str, list] = {}
    for word, pattern, disk in records:
        groups.setdefault(word, []).append((pattern, disk))
    entries = []
    for word in sorted(groups):
        items = groups[word]
        disk_count = sum(1 for _, dk in items if dk)
        sample = min((p.canonical() for p, _ in items), key=lambda q: q.to_text())
        if disk_count:
            cl = classify_word(word, r, disabled)
        else:
            cl = WordClassification(word, "out-of-scope", [("no-disk", "no pattern with this word bounds a disk")], r)
        entries.append(CensusEntry(word, len(items), disk_count, sample, cl))
    c = Census(diagram, max_letters, frozenset(disabled), r, entries, len(records), source)
    return c


def _corner_violation(f, sc, i: int, j: int) -> bool:
    """Interior-face arc from a truncation edge to the adjacent interior edge."""
    if f.kind != "interior":
        return False
    n = len(f.word)
    if (j - i) % n not in (1, n - 1):
        return False
    kinds = {sc.cells[f.word[i]].kind, sc.cells[f.word[j]].kind}
    return kinds == {"interior", "truncation"}


def _interleaves(chords, i: int, j: int) -> bool:
    lo, hi = min(i, j), max(i, j)
    for a, b in chords:
        if (lo < a < hi) != (lo < b < hi):
            return True
    return False


def enumerate_curves(cd: ChunkDecomposition, max_letters: int, disabled=(), allow_large: bool = False) -> Census:
    """Depth-first census with prefix pruning of non-embedded and
    non-normal partial curves."""
    guard(max_letters, allow_large=allow_large)
    off = check_tags(disabled)
    r = representativity_value(cd.diagram)
    records = enumerate_records(cd, max_letters, off)
    name = cd.diagram.name or "diagram"
    return assemble(name, max_letters, off, r, records, "enumerate")


def enumerate_records(cd: ChunkDecomposition, max_letters: int, disabled=()) -> list[tuple[str, CurvePattern, bool]]:
    """Surviving ``(canonical word, pattern, bounds a disk)`` records, in
    search order."""
    off = check_tags(disabled)
    r = representativity_value(cd.diagram)
    records = []
    prune_normal = TAG_NORMAL not in off
    for side in SIDES:
        sc = cd.sides[side]
        order = {c: k for k, c in enumerate(sorted(sc.cells))}
        for c0 in sorted(sc.cells):
            cell0 = sc.cells[c0]
            occ = (cell0.forward, cell0.backward)
            for d in (0, 1):
                start_face, start_pos = occ[d]  # the curve returns here
                f1, p1 = occ[1 - d]
                used = {c0}
                arcs: list[tuple[str, int, int]] = []
                chords: dict[str, list[tuple[int, int]]] = {}

                def dfs(face, pin, n_s, n_t, p_ok):
                    f = sc.faces[face]
                    fchords = chords.setdefault(face, [])
                    for q, cell in enumerate(f.word):
                        if q == pin:
                            continue
                        closing = face == start_face and q == start_pos
                        if not closing and (cell in used or order[cell] < order[c0]):
                            continue
                        if _interleaves(fchords, pin, q):
                            continue
                        if prune_normal and _corner_violation(f, sc, pin, q):
                            continue
                        ok = p_ok
                        t = n_t
                        if f.kind == "truncation":
                            t += 1
                            if (q - pin) % 4 == 1:
                                v = f.vertices[pin]
                            elif (pin - q) % 4 == 1:
                                v = f.vertices[q]
                            else:
                                v = None
                            ok = ok and v is not None and v not in sc.marked
                        s = n_s + (1 if sc.cells[cell].kind == "interior" else 0)
                        best = s + t if ok else s + 2 * t
                        if best > max_letters:
                            continue
                        arcs.append((face, pin, q))
                        fchords.append((pin, q))
                        if closing:
                            _close(cd, sc, arcs, max_letters, off, r, records)
                        else:
                            used.add(cell)
                            nf, npos = sc.across(face, q)
                            dfs(nf, npos, s, t, ok)
                            used.discard(cell)
                        arcs.pop()
                        fchords.pop()

                dfs(f1, p1, 0, 0, True)
    return records


def _close(cd, sc, arcs, max_letters, off, r, records) -> None:
    p = CurvePattern(tuple(FaceArc(f, Point(i), Point(j)) for f, i, j in arcs))
    words = [w for w in readings(p, cd) if len(w.letters) <= max_letters]
    if not words:
        return
    disk = bounds_disk_with_sides(p, sc)[0]
    if TAG_SADDLE_TWICE not in off and check_saddle_twice(p, cd):
        return
    for w in words:
        if disk:
            cl = classify_word(w, r, off)
            if cl.verdict == "forbidden":
                continue
        elif "B" in w.letters and TAG_B_PAIRS not in off:
            if classify_word(w, r, set(WORD_TAGS) - {TAG_B_PAIRS}).verdict == "forbidden":
                continue
        records.append((w.canonical(), p, disk))


def oracle_enumerate(cd: ChunkDecomposition, max_letters: int, disabled=(), allow_large: bool = False) -> Census:
    from .oracle import oracle_census

    return oracle_census(cd, max_letters, disabled, allow_large)


@dataclass
class CensusDiff:
    only_a: dict[str, int]
    only_b: dict[str, int]
    changed: dict[str, tuple[int, int]]
    digests_equal: bool

    @property
    def empty(self) -> bool:
        return not (self.only_a or self.only_b or self.changed)

    def to_json(self):
        return {"empty": self.empty, "digests_equal": self.digests_equal, "only_in_a": self.only_a,
                "only_in_b": self.only_b, "count_changes": {k: list(v) for k, v in self.changed.items()}}


def compare(a: Census, b: Census, check_filters: bool = False) -> CensusDiff:
    if a.diagram != b.diagram or a.max_letters != b.max_letters:
        raise ValueError("censuses differ in diagram or letter bound")
    if check_filters and a.disabled != b.disabled:
        raise ValueError("censuses use different filter settings")
    ca, cb = a.counts(), b.counts()
    only_a = {k: v for k, v in ca.items() if k not in cb}
    only_b = {k: v for k, v in cb.items() if k not in ca}
    changed = {k: (ca[k], cb[k]) for k in ca if k in cb and ca[k] != cb[k]}
    return CensusDiff(only_a, only_b, changed, a.digest == b.digest)
