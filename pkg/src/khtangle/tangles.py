"""Small constructors for the tangles shipped in the dataset.

Four-ended tangles are assembled from vertical twist boxes and rational
pieces, added side by side, and then turned into sutured tangles by removing
one column of a Montesinos diagram: the removed column is exactly the twist
region of the closures T(n).

Every crossing is written counterclockwise starting from an under-strand.
A crossing is of type +1 when the strand joining its top-left and
bottom-right corners passes under; on a pair of upward strands this is a
positive half twist.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .diagram import SuturedTangle, validate


@dataclass
class FourTangle:
    """Crossings plus the arcs ending at the NW, NE, SW, SE corners."""

    crossings: list
    nw: int
    ne: int
    sw: int
    se: int
    joins: list = field(default_factory=list)  # pairs of arc ids to identify


class _Ids:
    def __init__(self, start: int = 1):
        self.c = itertools.count(start)

    def __call__(self) -> int:
        return next(self.c)


def _vertical_crossing(l, r, l2, r2, kind: int):
    """Top corners l, r; bottom corners l2, r2.  Type +1: l-r2 passes under."""
    if kind > 0:
        return (l, l2, r2, r)
    return (l2, r2, r, l)


def _horizontal_crossing(l, r, l2, r2, kind: int):
    """Left corners l (top), l2 (bottom); right corners r (top), r2 (bottom).

    Type +1: the strand from top-left to bottom-right passes under.
    """
    if kind > 0:
        return (l, l2, r2, r)
    return (l2, r2, r, l)


def vertical_box(k: int, kind: int, ids: _Ids) -> FourTangle:
    """|k| half twists stacked vertically; the two strands run top to bottom."""
    nw, ne = ids(), ids()
    l, r = nw, ne
    crossings = []
    for _ in range(abs(k)):
        l2, r2 = ids(), ids()
        crossings.append(_vertical_crossing(l, r, l2, r2, kind if k > 0 else -kind))
        l, r = l2, r2
    return FourTangle(crossings, nw, ne, l, r)


def add_vertical_twists(t: FourTangle, k: int, kind: int, ids: _Ids) -> FourTangle:
    """Twist the bottom pair of endpoints |k| times."""
    l, r = t.sw, t.se
    crossings = list(t.crossings)
    for _ in range(abs(k)):
        l2, r2 = ids(), ids()
        crossings.append(_vertical_crossing(l, r, l2, r2, kind if k > 0 else -kind))
        l, r = l2, r2
    return FourTangle(crossings, t.nw, t.ne, l, r, list(t.joins))


def add_horizontal_twists(t: FourTangle, k: int, kind: int, ids: _Ids) -> FourTangle:
    """Twist the right pair of endpoints |k| times."""
    top, bot = t.ne, t.se
    crossings = list(t.crossings)
    for _ in range(abs(k)):
        top2, bot2 = ids(), ids()
        crossings.append(_horizontal_crossing(top, top2, bot, bot2, kind if k > 0 else -kind))
        top, bot = top2, bot2
    return FourTangle(crossings, t.nw, top, t.sw, bot, list(t.joins))


def rational_box(terms: Sequence[int], kind: int, ids: _Ids) -> FourTangle:
    """Rational tangle from a continued fraction, starting with a vertical box.

    ``terms = [a0, a1, a2, ...]`` applies a0 vertical twists, then a1
    horizontal, then a2 vertical, alternately.
    """
    t = vertical_box(terms[0], kind, ids)
    for j, a in enumerate(terms[1:], start=1):
        if j % 2:
            t = add_horizontal_twists(t, a, kind, ids)
        else:
            t = add_vertical_twists(t, a, kind, ids)
    return t


def tangle_sum(a: FourTangle, b: FourTangle) -> FourTangle:
    joins = list(a.joins) + list(b.joins) + [(a.ne, b.nw), (a.se, b.sw)]
    return FourTangle(a.crossings + b.crossings, a.nw, b.ne, a.sw, b.se, joins)


def _resolve(crossings, joins, ends):
    parent: dict[int, int] = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for x, y in joins:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)
    mapping: dict[int, int] = {}

    def new(x):
        r = find(x)
        if r not in mapping:
            mapping[r] = len(mapping) + 1
        return mapping[r]

    cr = [tuple(new(a) for a in c) for c in crossings]
    return cr, [new(e) for e in ends]


def column_complement(core: FourTangle, name: str = "") -> SuturedTangle:
    """Sutured tangle left after deleting the column to the right of ``core``.

    In the closed Montesinos diagram N(core + column), the column's top
    corners meet core.NE and core.NW (the latter over the top), its bottom
    corners core.SE and core.SW.  The twist region of T(n) plays the column,
    so the column's top corners become b0, b1 and its bottom corners t0, t1.
    """
    cr, (b0, b1, t0, t1) = _resolve(core.crossings, core.joins, [core.ne, core.nw, core.se, core.sw])
    t = SuturedTangle.make(cr, (b0, b1, t0, t1), name)
    validate(t)
    return t


def stack_twists(t: SuturedTangle, signs: Sequence[int], name: str = "") -> SuturedTangle:
    """The tangle with half twists of the given signs stacked on t0, t1."""
    b0, b1, t0, t1 = t.boundary
    nxt = max(t.arcs()) + 1
    crossings = list(t.crossings)
    cur_l, cur_r = t0, t1
    for s in signs:
        out_l, out_r = nxt, nxt + 1
        nxt += 2
        if s > 0:
            crossings.append((cur_r, out_r, out_l, cur_l))
        else:
            crossings.append((cur_l, cur_r, out_r, out_l))
        cur_l, cur_r = out_l, out_r
    out = SuturedTangle.make(crossings, (b0, b1, cur_l, cur_r), name or t.name)
    validate(out)
    return out


def unknot_tangle() -> SuturedTangle:
    """One crossing; strands b0 -> t1 and b1 -> t0.  Closures T(n) are T(2, n - 1) torus links."""
    return SuturedTangle.make([(1, 2, 3, 4)], {"b0": 1, "b1": 2, "t0": 4, "t1": 3}, "unknot")


def montesinos_tangle(boxes: Sequence[Sequence[int]], kinds: Sequence[int], baked: int = 0,
                      baked_sign: int = -1, name: str = "") -> SuturedTangle:
    """Column complement of a Montesinos diagram with rational boxes, plus baked twists.

    ``boxes`` holds continued-fraction terms per box; ``kinds`` the crossing
    type used in each box.
    """
    ids = _Ids()
    core = None
    for terms, kind in zip(boxes, kinds):
        box = rational_box(terms, kind, ids)
        core = box if core is None else tangle_sum(core, box)
    t = column_complement(core, name)
    if baked:
        t = stack_twists(t, [baked_sign] * baked, name)
    return t
