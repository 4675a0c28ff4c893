"""Unreduced Khovanov homology straight from the cube, with dense matrices.

Deliberately simple and independent of the reduced engines: no basepoint,
no scanning, its own elimination over F2.  Used as an oracle on small
diagrams, where Kh = Kh~ (x) V over F2.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from fractions import Fraction

import numpy as np

from .diagram import PlanarDiagram


def _rank_mod2(m: np.ndarray) -> int:
    a = (m % 2).astype(np.uint8).copy()
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        piv = np.nonzero(a[r:, c])[0]
        if len(piv) == 0:
            continue
        p = r + piv[0]
        a[[r, p]] = a[[p, r]]
        below = np.nonzero(a[:, c])[0]
        for i in below:
            if i != r:
                a[i] ^= a[r]
        r += 1
        if r == rows:
            break
    return r


def _circles(crossings, v):
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            x = parent[x]
        return x

    for i, (a, b, c, d) in enumerate(crossings):
        pairs = ((a, d), (b, c)) if (v >> i) & 1 else ((a, b), (c, d))
        for x, y in pairs:
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[rx] = ry
    return {x: find(x) for x in parent}


def unreduced_homology(d: PlanarDiagram, limit: int = 8) -> dict[tuple[int, Fraction], int]:
    """(u, q) -> dim over F2, q in the half-integer normalization used throughout."""
    n = len(d.crossings)
    if n > limit:
        raise ValueError(f"naive cube limited to {limit} crossings")
    n_plus, n_minus = d.n_plus, d.n_minus
    extra = d.free_loops
    gens = {}  # (v, labels) -> (u, q2)
    states = []
    for v in range(1 << n):
        comp = _circles(d.crossings, v) if n else {}
        circ = sorted(set(comp.values())) + [("loop", j) for j in range(extra)]
        states.append((comp, circ))
        r = bin(v).count("1")
        for labels in itertools.product((1, -1), repeat=len(circ)):
            q2 = sum(labels) + r + n_plus - 2 * n_minus
            gens[(v, labels)] = (r - n_minus, q2)
    index = defaultdict(list)
    for g, key in gens.items():
        index[key].append(g)
    pos = {g: i for key, gs in index.items() for i, g in enumerate(gs)}

    def image(v, labels, i):
        """Terms of d applied along the edge that changes crossing i."""
        comp, circ = states[v]
        w = v | (1 << i)
        wcomp, wcirc = states[w]
        lab = dict(zip(circ, labels))
        a, b, c, _ = d.crossings[i]
        out = []
        # circles not touching crossing i keep their labels by arc membership
        touched_v = {comp[a], comp[c], comp[b]}
        touched_w = {wcomp[a], wcomp[b], wcomp[c]}
        base = {}
        for k in wcirc:
            if k in touched_w:
                continue
            if isinstance(k, tuple):
                base[k] = lab[k]
            else:
                (src,) = {comp[x] for x, y in wcomp.items() if y == k}
                base[k] = lab[src]
        if len(touched_v) == 2:  # merge
            x, y = [lab[k] for k in touched_v]
            (m,) = touched_w
            if x == 1 and y == 1:
                out.append({**base, m: 1})
            elif x + y == 0:
                out.append({**base, m: -1})
        else:  # split
            (s,) = touched_v
            p, q = sorted(touched_w, key=str)
            if lab[s] == 1:
                out.append({**base, p: 1, q: -1})
                out.append({**base, p: -1, q: 1})
            else:
                out.append({**base, p: -1, q: -1})
        return [(w, tuple(t[k] for k in wcirc)) for t in out]

    result = {}
    ranks = {}
    for (u, q2), gs in index.items():
        tgt = index.get((u + 1, q2), [])
        if not tgt:
            ranks[(u, q2)] = 0
            continue
        m = np.zeros((len(tgt), len(gs)), dtype=np.uint8)
        for j, (v, labels) in enumerate(gs):
            for i in range(n):
                if (v >> i) & 1:
                    continue
                for g in image(v, labels, i):
                    m[pos[g], j] ^= 1
        ranks[(u, q2)] = _rank_mod2(m)
    for (u, q2), gs in index.items():
        h = len(gs) - ranks[(u, q2)] - ranks.get((u - 1, q2), 0)
        if h:
            result[(u, Fraction(q2, 2))] = h
    return dict(sorted(result.items()))


def tensor_with_v(reduced) -> dict[tuple[int, Fraction], int]:
    """Reduced homology tensored with the two-dimensional unknot space."""
    out = defaultdict(int)
    for (u, q), k in reduced.items():
        out[(u, q + Fraction(1, 2))] += k
        out[(u, q - Fraction(1, 2))] += k
    return dict(sorted((key, k) for key, k in out.items() if k))
