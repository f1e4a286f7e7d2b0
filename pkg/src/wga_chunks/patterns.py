"""Word classifiers for the forbidden-disk results and the SSSS zone check.

Each filter carries a tag; any subset of tags can be disabled so that
tests can confirm every hypothesis is actually used.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field

from .chunk import ChunkDecomposition, other
from .curve import CurveError, CurvePattern, LetterWord, bounds_disk_with_sides, check_b_pairs, label

TAG_NORMAL = "Def4.1"
TAG_B_PAIRS = "Prop7.1(3)"
TAG_SADDLE_TWICE = "Prop7.1(4)"
TAG_PARITY = "parity"
TAG_TWO_LETTER = "Thm9.1"
TAG_THREE_LETTER = "Thm9.2"
TAG_SSSS = "Thm8.1"

TAGS = (TAG_NORMAL, TAG_B_PAIRS, TAG_SADDLE_TWICE, TAG_PARITY, TAG_TWO_LETTER, TAG_THREE_LETTER, TAG_SSSS)
WORD_TAGS = (TAG_B_PAIRS, TAG_PARITY, TAG_TWO_LETTER, TAG_THREE_LETTER, TAG_SSSS)


def check_tags(tags) -> frozenset[str]:
    bad = set(tags) - set(TAGS)
    if bad:
        raise ValueError(f"unknown filter tag(s): {', '.join(sorted(bad))}; known: {', '.join(TAGS)}")
    return frozenset(tags)


def _as_word(w) -> LetterWord:
    return w if isinstance(w, LetterWord) else LetterWord(str(w))


def parity_invariant(w) -> bool:
    w = _as_word(w)
    if "B" in w.letters:
        raise ValueError("parity rule covers P/S words only; use the BB color rule for B letters")
    if set(w.letters) - {"P", "S"}:
        raise ValueError(f"unexpected letters in {w.letters!r}")
    return len(w.letters) % 2 == 0


@dataclass
class WordClassification:
    word: str
    verdict: str  # forbidden | candidate | out-of-scope
    reasons: list[tuple[str, str]] = field(default_factory=list)
    representativity_used: float | str = math.inf

    def to_json(self):
        r = self.representativity_used
        return {"word": self.word, "verdict": self.verdict,
                "reasons": [{"tag": t, "note": n} for t, n in self.reasons],
                "representativity": "inf" if r == math.inf else r}


def classify_word(w, r: float = math.inf, disabled=()) -> WordClassification:
    w = _as_word(w)
    off = check_tags(disabled)
    canon = w.canonical()
    s = set(canon)
    reasons: list[tuple[str, str]] = []

    def add(tag, note):
        if tag not in off:
            reasons.append((tag, note))

    if not canon:
        return WordClassification(canon, "candidate", [], r)
    if "B" in s and "P" in s:
        return WordClassification(canon, "out-of-scope", [("mixed", "B and P on one boundary curve")], r)
    if "B" in s:
        if not check_b_pairs(w):
            add(TAG_B_PAIRS, "truncation edges are not met in pairs")
        return WordClassification(canon, "forbidden" if reasons else "candidate", reasons, r)
    n = len(canon)
    if n == 2:
        add(TAG_TWO_LETTER, "no disk with a two-letter boundary word")
    if n == 3:
        add(TAG_THREE_LETTER, "no disk with a three-letter boundary word")
    if n % 2:
        add(TAG_PARITY, "each P or S flips the face color, so the count must be even")
    notes = []
    if canon == "SSSS":
        if r > 4:
            add(TAG_SSSS, "no SSSS disk when representativity exceeds 4")
        else:
            notes.append(("Thm8.1", "compressing disk for the projection surface meeting the diagram four times"))
    if reasons:
        return WordClassification(canon, "forbidden", reasons, r)
    return WordClassification(canon, "candidate", notes, r)


def is_pisj(word: str) -> tuple[int, int] | None:
    """``(i, j)`` if the cyclic word is ``P^i S^j`` with ``i, j > 0``."""
    w = LetterWord(word).canonical()
    m = re.fullmatch(r"(P+)(S+)", w)
    if m:
        return len(m.group(1)), len(m.group(2))
    return None


def search_pisj(census) -> list[dict]:
    """Surviving candidate words of the form ``P^i S^j``.

    These are reported as candidates, which says nothing about whether
    such disks exist."""
    out = []
    for e in census.entries:
        ij = is_pisj(e.word)
        if ij and e.classification.verdict == "candidate":
            out.append({"word": e.word, "i": ij[0], "j": ij[1], "count": e.count,
                        "status": "candidate", "witness": e.sample.to_text() if e.sample else None})
    return out


# -- SSSS zone argument --------------------------------------------------------

ZONES = ("a", "b", "c", "d")
# cyclic positions: 1, a, 2, b, 3, c, 4, d
_POSITION = {1: 0, "a": 1, 2: 2, "b": 3, 3: 4, "c": 5, 4: 6, "d": 7}


@dataclass
class ZoneVerdict:
    consistent_extension: dict | None
    cases_checked: int
    zones: dict[str, str]
    met: dict[int, list[str]]
    transferred: list[dict]

    @property
    def verdict(self) -> str:
        return "no consistent extension" if self.consistent_extension is None else "consistent extension found"

    def to_json(self):
        return {"verdict": self.verdict, "extension": self.consistent_extension, "cases_checked": self.cases_checked,
                "zones": self.zones, "met": {str(k): v for k, v in self.met.items()},
                "transferred_arcs": self.transferred}


def _chords_cross(p, q) -> bool:
    a, b = sorted(p)
    c, d = sorted(q)
    if len({a, b, c, d}) < 4:
        return False
    return (a < c < b) != (a < d < b)


def _chord(i, target) -> tuple[int, int]:
    return (_POSITION[i], _POSITION[target])


def zone_extensions(met: dict[int, set[str]], zone_class: dict[str, str], use_constraints: bool = True):
    """Yield every legal way for arcs 1-4 to leave the disk: each either
    exits through a zone or connects to another arc, all disjointly."""
    options = {i: list(ZONES) + [j for j in (1, 2, 3, 4) if j != i] for i in (1, 2, 3, 4)}
    checked = 0
    for choice in itertools.product(*(options[i] for i in (1, 2, 3, 4))):
        checked += 1
        assign = dict(zip((1, 2, 3, 4), choice))
        ok = True
        for i, t in assign.items():
            if isinstance(t, int) and assign[t] != i:
                ok = False  # connections must be mutual
                break
            if use_constraints:
                if isinstance(t, str) and zone_class[t] in met[i]:
                    ok = False
                    break
                if isinstance(t, int) and met[i] & met[t]:
                    ok = False
                    break
        if not ok:
            yield checked, None
            continue
        # exits into one zone share that zone and never conflict
        chords = list({tuple(sorted(_chord(i, t))) for i, t in assign.items()})
        crossing = any(_chords_cross(p, q) for p, q in itertools.combinations(chords, 2))
        yield checked, (None if crossing else assign)


def check_ssss_zones(p: CurvePattern, cd: ChunkDecomposition, disabled=()) -> ZoneVerdict:
    """Mechanical form of the SSSS zone contradiction for one disk-bounding
    SSSS curve on a chunk boundary."""
    off = check_tags(disabled)
    w = label(p, cd)
    if w.letters != "SSSS" or len(p.arcs) != 4:
        raise CurveError(f"expected an SSSS curve of four arcs, got {w.letters!r}")
    side = next(iter(p.sides))
    sc = cd.sides[side]
    disk, _ = bounds_disk_with_sides(p, sc)
    if not disk:
        raise CurveError("precondition unmet: the SSSS curve does not bound a disk on its side")
    arcs = list(p.arcs)
    # start so that the arc after the first saddle lies in a white face
    k0 = next((k for k in range(4) if cd.face_color(arcs[k].face) == "white"), 0)
    arcs = arcs[k0:] + arcs[:k0]
    ecells = [sc.faces[a.face].word[a.entry.pos] for a in arcs]  # e1..e4: entry of A, B, C, D
    cls = cd.class_of
    transferred = []
    for k, a in enumerate(arcs):
        fo, pin = cd.glue(side, a.face, a.entry.pos)
        _, pout = cd.glue(side, a.face, a.exit.pos)
        word = cd.sides[other(side)].faces[fo].word
        src = (sc.faces[a.face].word[a.entry.pos], sc.faces[a.face].word[a.exit.pos])
        img = (word[pin], word[pout])
        for s_cell, i_cell in zip(src, img):
            if cls[s_cell] != cls[i_cell]:
                raise AssertionError(f"gluing moved {s_cell} off its crossing arc")
        transferred.append({"arc": "ABCD"[k], "face": fo, "from": img[0], "to": img[1],
                            "classes": [cls[img[0]], cls[img[1]]]})
    K = [cls[c] for c in ecells]  # K[0] = class of e1
    zone_class = {"a": K[1], "b": K[2], "c": K[3], "d": K[0]}
    # arcs entering at the open junctions next to A', B', C', D'
    met = {1: {K[0], K[1]}, 2: {K[1], K[2]}, 3: {K[2], K[3]}, 4: {K[3], K[0]}}
    use = TAG_SADDLE_TWICE not in off
    found = None
    checked = 0
    for checked, assign in zone_extensions(met, zone_class, use):
        if assign is not None:
            found = {str(i): (t if isinstance(t, str) else f"arc {t}") for i, t in assign.items()}
            break
    return ZoneVerdict(found, checked, zone_class, {i: sorted(v) for i, v in met.items()}, transferred)
