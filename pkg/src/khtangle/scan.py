"""Crossing-by-crossing computation of reduced complexes (the scanning engine).

A diagram is cut open at its basepoint and built up one crossing at a time
as a complex over the dotted cobordism category.  After each crossing, loops
are removed by delooping and isomorphisms by Gaussian elimination, so the
intermediate complexes stay close to the size of the tangle homology.

The twist tower runs the same procedure on a tangle followed by its twist
region and keeps, for every added positive twist crossing, the projection
onto the 0-resolution, pushed through each simplification.  Closing every
level then gives the reduced complexes of the closures T(i) together with
chain maps C(T(i+1)) -> C(T(i)).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import bncat
from .bncat import IDENTITY, BNComplex, Obj, TrackedMap, matching
from .diagram import PlanarDiagram, SuturedTangle, twisted_closure, validate
from .f2la import BitMatrix
from .khcomplex import GradedComplex, Generator

SLOT_LABEL = {"b0": -4, "b1": -3, "t0": -2, "t1": -1}
_TWIST_BASE = 10**6


def _crossing_piece(labels: Sequence[int]):
    p0, p1, p2, p3 = labels
    rho0 = matching([(p0, p1), (p2, p3)])
    rho1 = matching([(p0, p3), (p1, p2)])
    return [(rho0, 0, 0), (rho1, 1, 1)], {(0, 1): IDENTITY}


class Scanner:
    """Grows a complex by gluing crossings along shared boundary points."""

    def __init__(self, start: Optional[bncat.Matching] = None):
        self.c = BNComplex()
        self.c.add_obj(Obj(start or (), 0, 0))
        self.open: set[int] = set(bncat.points(start or ()))

    def glue_strand(self, x: int, y: int) -> None:
        self._tensor([(matching([(x, y)]), 0, 0)], {})

    def add_crossing(self, labels: Sequence[int]) -> None:
        piece, d = _crossing_piece(labels)
        self._tensor(piece, d)
        bncat.simplify(self.c)

    def _tensor(self, piece, d):
        pts = bncat.points(piece[0][0])
        self.c, _ = bncat.tensor(self.c, piece, d)
        self.open ^= set(pts)


def _diagram_order(crossings: Sequence[Sequence[int]], first: int = 0) -> list[int]:
    """Greedy order keeping the open boundary small."""
    remaining = set(range(len(crossings)))
    open_pts: set[int] = set()
    order = []
    while remaining:
        def score(i):
            shared = sum(1 for a in crossings[i] if a in open_pts)
            return (-shared, i != first, i)

        i = min(remaining, key=score)
        remaining.remove(i)
        order.append(i)
        for a in crossings[i]:
            open_pts ^= {a}
    return order


def _close_to_graded(c: BNComplex, n_plus: int, n_minus: int, name: str = "",
                     extra_loops: int = 0) -> tuple[GradedComplex, dict[int, tuple[int, int]]]:
    """Read off the reduced complex from a complex over the cut-open arc.

    The dot on the basepoint arc is set to zero, so each arrow contributes its
    undotted coefficient.
    """
    gens: dict[int, list[Generator]] = defaultdict(list)
    where: dict[int, tuple[int, int]] = {}
    for x in c.ids():
        o = c.objs[x]
        if len(o.match) != 1:
            raise AssertionError("closed complex must live on a single arc")
        u = o.r - n_minus
        q = Fraction(o.s + n_plus - 2 * n_minus, 2)
        where[x] = (u, len(gens[u]))
        gens[u].append(Generator(u, q, ("obj", x)))
    entries: dict[int, list] = defaultdict(list)
    for x in c.ids():
        ux, jx = where[x]
        for y, m in c.out[x].items():
            if frozenset() in m:
                uy, iy = where[y]
                entries[ux].append((iy, jx))
    d = {u: BitMatrix.from_entries(len(gens[u + 1]), len(gens[u]), entries.get(u, [])) for u in gens if u + 1 in gens}
    gc = GradedComplex(dict(gens), d, name=name)
    for _ in range(extra_loops):
        gc = _times_unknot(gc)
    return gc, where


def _times_unknot(gc: GradedComplex) -> GradedComplex:
    """Disjoint union with an unknotted circle: two copies shifted q by +-1/2."""
    gens = {}
    d = {}
    for u, gs in gc.gens.items():
        gens[u] = [Generator(u, g.q + Fraction(1, 2), g.meta) for g in gs] + [
            Generator(u, g.q - Fraction(1, 2), g.meta) for g in gs
        ]
    for u, m in gc.d.items():
        a, b = m.shape
        ent = [(i, j) for i, j in m.nonzero()] + [(i + a, j + b) for i, j in m.nonzero()]
        d[u] = BitMatrix.from_entries(2 * a, 2 * b, ent)
    return GradedComplex(gens, d, name=gc.name)


def scan_diagram(d: PlanarDiagram) -> GradedComplex:
    """Reduced complex of a closed diagram via the scanning engine."""
    n = len(d.crossings)
    if n == 0:
        loops = max(d.free_loops, 1)
        gc = GradedComplex({0: [Generator(0, Fraction(0), None)]}, {}, name=d.name)
        for _ in range(loops - 1):
            gc = _times_unknot(gc)
        return gc
    fresh = max(d.arcs()) + 1
    labels = [list(c) for c in d.crossings]
    strands = defaultdict(list)
    seen_base = False
    for i, c in enumerate(labels):
        for k, a in enumerate(c):
            if a == d.basepoint:
                if seen_base:
                    c[k] = fresh
                    fresh += 1
                seen_base = True
        for k in range(4):
            for k2 in range(k + 1, 4):
                if c[k] == c[k2] and c[k] != d.basepoint:
                    strands[i].append((c[k], fresh))
                    c[k2] = fresh
                    fresh += 1
    order = _diagram_order(labels, first=next(i for i, c in enumerate(d.crossings) if d.basepoint in c))
    sc = Scanner()
    for i in order:
        for x, y in strands[i]:
            sc.glue_strand(x, y)
        sc.add_crossing(labels[i])
    gc, _ = _close_to_graded(sc.c, d.n_plus, d.n_minus, d.name, d.free_loops)
    return gc


# ---------------------------------------------------------------------------
# twist tower


def _tangle_labels(t: SuturedTangle):
    """Point labels for the crossings of a tangle, plus initial strands."""
    slot_of = defaultdict(list)
    for s, a in zip(("b0", "b1", "t0", "t1"), t.boundary):
        slot_of[a].append(s)
    fresh = max(t.arcs()) + 1
    labels = []
    strands = defaultdict(list)
    start = []
    for a, slots in slot_of.items():
        if len(slots) == 2:
            start.append((SLOT_LABEL[slots[0]], SLOT_LABEL[slots[1]]))
    for i, c in enumerate(t.crossings):
        lab = []
        for k, a in enumerate(c):
            if a in slot_of:
                lab.append(SLOT_LABEL[slot_of[a][0]])
            else:
                lab.append(a)
        for k in range(4):
            for k2 in range(k + 1, 4):
                if lab[k] == lab[k2] and lab[k] >= 0:
                    strands[i].append((lab[k], fresh))
                    lab[k2] = fresh
                    fresh += 1
        labels.append(lab)
    return labels, strands, matching(start)


def _twist_labels(sign: int, k: int):
    tl, tr = (_TWIST_BASE + 2 * k, _TWIST_BASE + 2 * k + 1) if k > 0 else (SLOT_LABEL["t0"], SLOT_LABEL["t1"])
    ntl, ntr = _TWIST_BASE + 2 * (k + 1), _TWIST_BASE + 2 * (k + 1) + 1
    if sign > 0:
        return (tr, ntr, ntl, tl), (ntl, ntr)
    return (tl, tr, ntr, ntl), (ntl, ntr)


def _top_labels(k: int) -> tuple[int, int]:
    if k == 0:
        return SLOT_LABEL["t0"], SLOT_LABEL["t1"]
    return _TWIST_BASE + 2 * k, _TWIST_BASE + 2 * k + 1


def base_signs(n: int) -> list[int]:
    """Signs of the twist region of the lowest level of a window starting at n."""
    return [-1] * (-n) if n < 0 else [1] * n


def level_signs(n_low: int, i: int) -> list[int]:
    """Twist signs of level i in a window whose lowest level is n_low (i >= n_low).

    Above the lowest level only positive crossings are appended, so for a
    negative lowest level the diagram at level i is T(n_low) followed by
    i - n_low positive twists, which is isotopic to T(i).
    """
    return base_signs(n_low) + [1] * (i - n_low)


@dataclass
class TowerLevel:
    level: int
    diagram: PlanarDiagram
    complex: GradedComplex


@dataclass
class TwistTower:
    tangle: SuturedTangle
    low: int
    high: int
    levels: dict[int, TowerLevel]
    maps: dict[int, dict[int, BitMatrix]]  # i -> per-u blocks C(level i+1) -> C(level i)


def _close_level(K: BNComplex, k: int, diagram: PlanarDiagram):
    tl, tr = _top_labels(k)
    cap = (matching([(tr, SLOT_LABEL["b1"])]), 0, 0)
    closed, index = bncat.tensor(K, [cap], {})
    gc, where = _close_to_graded(closed, diagram.n_plus, diagram.n_minus, diagram.name, diagram.free_loops)
    return closed, index, gc, where


def twist_tower(t: SuturedTangle, low: int, high: int, check: bool = False) -> TwistTower:
    """Closed complexes of levels low..high and the chain maps between consecutive levels."""
    if high < low:
        raise ValueError("need low <= high")
    validate(t)
    labels, strands, start = _tangle_labels(t)
    order = _diagram_order(labels)
    sc = Scanner(start)
    for i in order:
        for x, y in strands[i]:
            sc.glue_strand(x, y)
        sc.add_crossing(labels[i])
    k = 0
    for s in base_signs(low):
        lab, _ = _twist_labels(s, k)
        sc.add_crossing(lab)
        k += 1
    K = sc.c
    levels: dict[int, TowerLevel] = {}
    maps: dict[int, dict[int, BitMatrix]] = {}
    diag = twisted_closure(t, level_signs(low, low), name=f"{t.name}({low})")
    prev_closed = _close_level(K, k, diag)
    levels[low] = TowerLevel(low, diag, prev_closed[2])
    for i in range(low, high):
        lab, _ = _twist_labels(1, k)
        piece, pd = _crossing_piece(lab)
        T, tidx = bncat.tensor(K, [piece[0]], {})
        S, sidx = bncat.tensor(K, piece, pd)
        G = TrackedMap(S, T)
        for x in K.ids():
            (sid, _), = sidx[(x, 0)]
            (tid, _), = tidx[(x, 0)]
            G.add(sid, tid, IDENTITY)
        bncat.simplify(S, [G])
        if check:
            S.check()
            G.check()
        k += 1
        diag = twisted_closure(t, level_signs(low, i + 1), name=f"{t.name}({i + 1})")
        closed_S, s_index, gc_S, where_S = _close_level(S, k, diag)
        # target: level i complex with the new top labels; close it the same way
        prev_diag = levels[i].diagram
        closed_T, t_index, gc_T, where_T = _close_level(T, k, prev_diag)
        _assert_same(gc_T, levels[i].complex)
        tl, tr = _top_labels(k)
        cap = (matching([(tr, SLOT_LABEL["b1"])]), 0, 0)
        Gc = bncat.tensor_map(G, cap, s_index, t_index, closed_S, closed_T)
        blocks: dict[int, list] = defaultdict(list)
        for x, row in Gc.comp.items():
            us, js = where_S[x]
            for y, m in row.items():
                if frozenset() in m:
                    ut, it = where_T[y]
                    assert ut == us, "twist maps preserve u"
                    blocks[us].append((it, js))
        mats = {}
        for u in gc_S.us:
            mats[u] = BitMatrix.from_entries(gc_T.dim(u), gc_S.dim(u), blocks.get(u, []))
        maps[i] = mats
        levels[i + 1] = TowerLevel(i + 1, diag, gc_S)
        K = S
    return TwistTower(t, low, high, levels, maps)


def _assert_same(a: GradedComplex, b: GradedComplex) -> None:
    assert a.us == b.us or (not a.us and not b.us)
    for u in a.us:
        assert [(g.u, g.q) for g in a.gens[u]] == [(g.u, g.q) for g in b.gens[u]], "level complexes disagree"
        assert a.diff(u) == b.diff(u)
