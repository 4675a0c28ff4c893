"""Quotient tangles of strongly invertible plats.

A four-strand plat whose left end is capped by nested caps (2-3 inside
1-4), whose right end is capped by (1-2) and (3-4), and whose crossings are
either between positions 2 and 3 or come in mirror pairs between positions
1-2 and 3-4, is symmetric under the rotation by pi about the horizontal
axis between positions 2 and 3.  The rotation meets the knot in the two
points where the left caps cross the axis, so it is a strong inversion.

The quotient of the upper half is an arc k with both ends on the image A of
the axis.  A crossing between positions 1 and 2 stays a crossing of k with
itself.  A crossing between positions 2 and 3 becomes a hook of k around A,
entering over A and leaving under it (or the reverse, by the sign).
Dragging one end of k along k until k is tiny replaces k by a pair of
parallel strands; the complement of a small ball around k is the quotient
tangle, whose capping closure is A itself.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Sequence

from .diagram import PlanarDiagram, SuturedTangle, _UF, diagram_from_pd, validate

Letter = tuple[int, int]  # (1 or 2, sign): crossing between positions (1,2)+(3,4) or (2,3)


class _Labels:
    def __init__(self):
        self.n = 0

    def __call__(self):
        self.n += 1
        return ("a", self.n)


def _pair_crossing(a, b, c, d, e):
    """Upper-left a, lower-left b, upper-right c, lower-right d; e = +1 puts the strand a-d over."""
    return (b, d, c, a) if e > 0 else (a, b, d, c)


def plat_diagram(word: Sequence[Letter], name: str = "") -> PlanarDiagram:
    """The symmetric plat as a closed diagram."""
    lab = _Labels()
    uf = _UF()
    pos = {p: lab() for p in range(1, 5)}
    start = dict(pos)
    crossings = []
    for gen, e in word:
        pairs = [(1, 2), (3, 4)] if gen == 1 else [(2, 3)]
        for i, j in pairs:
            c, d = lab(), lab()
            crossings.append(_pair_crossing(pos[i], pos[j], c, d, e))
            pos[i], pos[j] = c, d
    for x, y in ((start[2], start[3]), (start[1], start[4]), (pos[1], pos[2]), (pos[3], pos[4])):
        uf.union(x, y)
    ids: dict = {}
    out = []
    for c in crossings:
        out.append(tuple(ids.setdefault(uf.find(a), len(ids) + 1) for a in c))
    return diagram_from_pd(out, name=name, oriented=False)


def _quotient_graph(word: Sequence[Letter]):
    """Crossings of A and k, with k's first and last arcs and the arcs of A at both fixed points."""
    lab = _Labels()
    uf = _UF()
    k_start, k_end = lab(), lab()
    pos = {2: k_start, 1: k_end}
    a_mid, a_west = lab(), lab()  # A between the fixed points, and A to the left of both
    a_cur = a_right = lab()  # A to the right of the inner fixed point
    crossings = []
    for gen, e in word:
        if gen == 1:
            c, d = lab(), lab()
            crossings.append(_pair_crossing(pos[1], pos[2], c, d, e))
            pos[1], pos[2] = c, d
        else:
            b = pos[2]
            m, d = lab(), lab()
            a1, a2 = lab(), lab()
            # entry: k runs south across A; exit: k runs north across A
            if e > 0:
                crossings.append((a1, b, a_cur, m))  # k over
                crossings.append((m, a2, d, a1))  # k under
            else:
                crossings.append((m, a1, b, a_cur))
                crossings.append((a2, d, a1, m))
            a_cur = a2
            pos[2] = d
    uf.union(pos[1], pos[2])
    uf.union(a_cur, a_west)
    return crossings, uf, k_start, k_end, a_mid, a_west, a_right


def _k_visits(crossings, uf, k_start, k_end):
    """Ordered (crossing, entry slot) visits of the path k."""
    where = defaultdict(list)
    for ci, c in enumerate(crossings):
        for s, a in enumerate(c):
            where[uf.find(a)].append((ci, s))
    visits = []
    arc = uf.find(k_start)
    prev = None
    end = uf.find(k_end)
    while arc != end:
        nxt = [x for x in where[arc] if x != prev]
        ci, s = nxt[0]
        visits.append((ci, s))
        prev = (ci, (s + 2) % 4)
        arc = uf.find(crossings[ci][(s + 2) % 4])
    return visits


def quotient_tangle(word: Sequence[Letter], name: str = "") -> SuturedTangle:
    """Quotient tangle of the symmetric plat; its capping closure is the axis."""
    crossings, uf, k_start, k_end, a_mid, a_west, a_right = _quotient_graph(word)
    visits = _k_visits(crossings, uf, k_start, k_end)
    by_crossing = defaultdict(list)
    for ci, s in visits:
        by_crossing[ci].append(s)
    k_arcs = {uf.find(k_start), uf.find(k_end)}
    for ci, ss in by_crossing.items():
        for s in ss:
            k_arcs.add(uf.find(crossings[ci][s]))
            k_arcs.add(uf.find(crossings[ci][(s + 2) % 4]))

    def arc(a, side=None):
        r = uf.find(a)
        return (r, side) if r in k_arcs else r

    out = []
    for ci, c in enumerate(crossings):
        ss = by_crossing.get(ci, [])
        if not ss:
            out.append(tuple(arc(a) for a in c))
            continue
        s = ss[0]
        x_under = s % 2 == 0
        S, E, N, W = (c[(s + j) % 4] for j in range(4))
        # k runs south to north; its right-hand copy lies on the east side
        x_r = (arc(S, "R"), ("xr", ci), arc(N, "R"))
        x_l = (arc(S, "L"), ("xl", ci), arc(N, "L"))
        if len(ss) == 1:
            mid = ("mid", ci)
            quads = [(x_r[0], arc(E), x_r[2], mid), (x_l[0], mid, x_l[2], arc(W))]
        else:
            if (ss[1] - s) % 4 == 1:  # second pass runs east to west
                y_n = (arc(E, "R"), ("yn", ci), arc(W, "R"))
                y_s = (arc(E, "L"), ("ys", ci), arc(W, "L"))
            else:
                y_n = (arc(E, "L"), ("yn", ci), arc(W, "L"))
                y_s = (arc(E, "R"), ("ys", ci), arc(W, "R"))
            quads = [
                (x_r[0], y_s[0], x_r[1], y_s[1]),
                (x_l[0], y_s[1], x_l[1], y_s[2]),
                (x_r[1], y_n[0], x_r[2], y_n[1]),
                (x_l[1], y_n[1], x_l[2], y_n[2]),
            ]
        for q in quads:
            out.append(q if x_under else q[1:] + q[:1])
    # at the inner fixed point the two sides of A continue as the two copies of k
    alias = {arc(k_start, "L"): arc(a_mid), arc(k_start, "R"): arc(a_right)}
    ids: dict = {}

    def num(a):
        return ids.setdefault(alias.get(a, a), len(ids) + 1)

    cr = [tuple(num(a) for a in q) for q in out]
    boundary = {
        "b0": num(arc(a_mid)),
        "t0": num(arc(k_end, "L")),
        "t1": num(arc(k_end, "R")),
        "b1": num(arc(a_west)),
    }
    t = SuturedTangle.make(cr, boundary, name)
    validate(t)
    return t
