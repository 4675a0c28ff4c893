"""Reduced Khovanov complexes over F2 and their homology.

Gradings follow the half-quantum convention: for a generator at cube height
``r`` with circle labels of total degree ``deg``,

    u = r - n_-,    q = (deg + 1 + r + n_+ - 2 n_-) / 2,

where the reduced complex keeps the basepoint circle labelled ``x`` (degree
-1) and the ``+1`` recentres the unknot at (0, 0).  The diagonal grading is
``delta = u - q``.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Optional

import numpy as np

from . import f2la
from .diagram import PlanarDiagram
from .f2la import BitMatrix

DEFAULT_CAP = 24
CUBE_LIMIT = 14


class ResourceCapError(RuntimeError):
    """A diagram exceeds the configured crossing cap."""


def half(x) -> Fraction:
    return Fraction(x)


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _num(x: Fraction):
    return int(x) if x.denominator == 1 else float(x)


# ---------------------------------------------------------------------------
# graded vector spaces


class GradedVectorSpace(Mapping):
    """Finitely supported table (u, q) -> dimension with q a half-integer."""

    def __init__(self, table: Optional[Mapping] = None):
        clean = {}
        for (u, q), n in (table or {}).items():
            if n < 0:
                raise ValueError("dimensions must be non-negative")
            if n:
                key = (int(u), Fraction(q))
                clean[key] = clean.get(key, 0) + int(n)
        self._t = dict(sorted(clean.items()))

    def __getitem__(self, key):
        u, q = key
        return self._t.get((int(u), Fraction(q)), 0)

    def __iter__(self):
        return iter(self._t)

    def __len__(self):
        return len(self._t)

    def __eq__(self, other):
        if isinstance(other, GradedVectorSpace):
            return self._t == other._t
        if isinstance(other, Mapping):
            return self == GradedVectorSpace(other)
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self._t.items()))

    def __repr__(self):
        cells = ", ".join(f"({u},{_fmt(q)}):{n}" for (u, q), n in self._t.items())
        return f"GradedVectorSpace({{{cells}}})"

    @property
    def total(self) -> int:
        return sum(self._t.values())

    def by_u(self) -> dict[int, int]:
        out: dict[int, int] = defaultdict(int)
        for (u, _), n in self._t.items():
            out[u] += n
        return dict(sorted(out.items()))

    def by_delta(self) -> dict[Fraction, int]:
        out: dict[Fraction, int] = defaultdict(int)
        for (u, q), n in self._t.items():
            out[u - q] += n
        return dict(sorted(out.items()))

    def delta_table(self) -> dict[tuple[int, int], int]:
        """(u, 2 delta) -> dimension."""
        return {(u, int(2 * (u - q))): n for (u, q), n in self._t.items()}

    def reflect(self) -> "GradedVectorSpace":
        return GradedVectorSpace({(-u, -q): n for (u, q), n in self._t.items()})

    def shift(self, du: int = 0, dq=0) -> "GradedVectorSpace":
        return GradedVectorSpace({(u + du, q + Fraction(dq)): n for (u, q), n in self._t.items()})

    def to_json(self) -> dict:
        return {
            "entries": [{"u": u, "q": _num(q), "dim": n} for (u, q), n in self._t.items()],
            "total": self.total,
        }

    def to_tsv(self) -> str:
        """Rows 2 delta (descending), columns u (ascending)."""
        return grid_tsv(self.delta_table(), "2delta")

    def uq_tsv(self) -> str:
        """Rows q (descending), columns u (ascending)."""
        return grid_tsv({(u, q): n for (u, q), n in self._t.items()}, "q", fmt=_fmt)


def grid_tsv(table: Mapping[tuple, int], row_label: str, fmt=str) -> str:
    if not table:
        return f"{row_label}\\u\n"
    us = sorted({u for u, _ in table})
    rows = sorted({r for _, r in table}, reverse=True)
    cols = list(range(us[0], us[-1] + 1))
    lines = ["\t".join([f"{row_label}\\u"] + [str(u) for u in cols])]
    for r in rows:
        lines.append("\t".join([fmt(r)] + [str(table.get((u, r), 0) or ".") for u in cols]))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# complexes


@dataclass(frozen=True)
class Generator:
    u: int
    q: Fraction
    meta: Any = None


@dataclass
class GradedComplex:
    """Complex of F2 vector spaces with (u, q)-graded generators.

    ``d[u]`` has shape (#gens at u+1, #gens at u) and preserves q.
    """

    gens: dict[int, list[Generator]]
    d: dict[int, BitMatrix]
    name: str = ""
    _blocks: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.gens = {u: list(g) for u, g in sorted(self.gens.items()) if g}
        for u in list(self.gens):
            if u + 1 in self.gens and u not in self.d:
                self.d[u] = BitMatrix.zeros(len(self.gens[u + 1]), len(self.gens[u]))

    @property
    def us(self) -> list[int]:
        return sorted(self.gens)

    def dim(self, u: int) -> int:
        return len(self.gens.get(u, ()))

    def size(self) -> int:
        return sum(len(g) for g in self.gens.values())

    def diff(self, u: int) -> BitMatrix:
        m = self.d.get(u)
        if m is None:
            return BitMatrix.zeros(self.dim(u + 1), self.dim(u))
        return m

    def q_blocks(self, u: int) -> dict[Fraction, list[int]]:
        if u not in self._blocks:
            out: dict[Fraction, list[int]] = defaultdict(list)
            for i, g in enumerate(self.gens.get(u, ())):
                out[g.q].append(i)
            self._blocks[u] = dict(out)
        return self._blocks[u]

    def check(self) -> None:
        """Assert d o d = 0 and q-homogeneity."""
        for u, m in self.d.items():
            assert m.shape == (self.dim(u + 1), self.dim(u)), f"bad shape at u={u}"
            src, tgt = self.gens.get(u, []), self.gens.get(u + 1, [])
            for i, j in m.nonzero():
                assert tgt[i].q == src[j].q, "differential does not preserve q"
            if u + 1 in self.d:
                assert (self.d[u + 1] @ m).is_zero(), f"d o d != 0 at u={u}"

    def euler_q(self) -> dict[Fraction, int]:
        out: dict[Fraction, int] = defaultdict(int)
        for u, gs in self.gens.items():
            for g in gs:
                out[g.q] += (-1) ** (u % 2)
        return {q: c for q, c in sorted(out.items()) if c}


@dataclass
class Reduction:
    """Deformation retraction of a complex onto representatives of its homology."""

    source: GradedComplex
    reduced: dict[int, list[Generator]]
    inclusion: dict[int, BitMatrix]   # per u: source dim x reduced dim
    projection: dict[int, BitMatrix]  # per u: reduced dim x source dim

    def space(self) -> GradedVectorSpace:
        t: dict = defaultdict(int)
        for u, gs in self.reduced.items():
            for g in gs:
                t[(u, g.q)] += 1
        return GradedVectorSpace(t)

    def check(self) -> None:
        c = self.source
        for u in c.us:
            inc, proj = self.inclusion[u], self.projection[u]
            k = len(self.reduced.get(u, []))
            assert (proj @ inc) == BitMatrix.identity(k)
            assert (c.diff(u) @ inc).is_zero()
            if u - 1 in c.gens:
                assert (proj @ c.diff(u - 1)).is_zero()


def _block(m: BitMatrix, rows: list[int], cols: list[int]) -> BitMatrix:
    return m.select_rows(rows).select_cols(cols)


def reduce_with_transfer(c: GradedComplex) -> Reduction:
    """Full reduction over F2 with explicit inclusion and projection, block by block in (u, q)."""
    reduced: dict[int, list[Generator]] = {}
    inclusion: dict[int, BitMatrix] = {}
    projection: dict[int, BitMatrix] = {}
    for u in c.us:
        n = c.dim(u)
        reps_cols: list[np.ndarray] = []
        proj_rows: list[np.ndarray] = []
        gens_out: list[Generator] = []
        blocks_u = c.q_blocks(u)
        up = c.q_blocks(u + 1)
        down = c.q_blocks(u - 1)
        for q, idx in blocks_u.items():
            dq_out = _block(c.diff(u), up.get(q, []), idx) if q in up else BitMatrix.zeros(0, len(idx))
            dq_in = _block(c.diff(u - 1), idx, down.get(q, [])) if q in down else BitMatrix.zeros(len(idx), 0)
            B = f2la.image_basis(dq_in).basis.to_dense()
            Z = f2la.kernel_basis(dq_out).basis.to_dense()
            k = len(idx)
            if Z.shape[0] == B.shape[0]:
                continue
            stack = np.vstack([B.reshape(-1, k), Z.reshape(-1, k)])
            piv = f2la.independent_columns(BitMatrix.from_dense(stack.T))
            nb = B.shape[0]
            reps = stack[[p for p in piv if p >= nb]]
            full = f2la.extend_to_basis(BitMatrix.from_dense(np.vstack([B.reshape(-1, k), reps])), k)
            inv = f2la.inverse(full.transpose())  # coordinates in the new basis
            coords = inv.to_dense()[nb : nb + reps.shape[0]]
            for r, pr in zip(reps, coords):
                col = np.zeros(n, dtype=np.uint8)
                col[idx] = r
                reps_cols.append(col)
                row = np.zeros(n, dtype=np.uint8)
                row[idx] = pr
                proj_rows.append(row)
                gens_out.append(Generator(u, q, None))
        h = len(gens_out)
        reduced[u] = gens_out
        inclusion[u] = BitMatrix.from_dense(np.array(reps_cols, dtype=np.uint8).reshape(h, n).T) if h else BitMatrix.zeros(n, 0)
        projection[u] = BitMatrix.from_dense(np.array(proj_rows, dtype=np.uint8).reshape(h, n)) if h else BitMatrix.zeros(0, n)
    return Reduction(c, reduced, inclusion, projection)


def homology(c: GradedComplex) -> GradedVectorSpace:
    return reduce_with_transfer(c).space()


def homology_by_rank(c: GradedComplex) -> GradedVectorSpace:
    """dim H = dim C - rank d_out - rank d_in, per (u, q) block."""
    t = {}
    for u in c.us:
        up = c.q_blocks(u + 1)
        down = c.q_blocks(u - 1)
        for q, idx in c.q_blocks(u).items():
            r_out = f2la.rank(_block(c.diff(u), up[q], idx)) if q in up else 0
            r_in = f2la.rank(_block(c.diff(u - 1), idx, down[q])) if q in down else 0
            t[(u, q)] = len(idx) - r_out - r_in
    return GradedVectorSpace(t)


# ---------------------------------------------------------------------------
# cube of resolutions


def _resolution_circles(d: PlanarDiagram, v: int) -> dict[int, int]:
    """arc -> circle key (smallest arc on the circle) at cube vertex v."""
    parent: dict[int, int] = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    for i, (a, b, c, e) in enumerate(d.crossings):
        if (v >> i) & 1:
            union(a, e)
            union(b, c)
        else:
            union(a, b)
            union(c, e)
    return {a: find(a) for a in parent}


def cube_complex(d: PlanarDiagram, cap: int = CUBE_LIMIT) -> GradedComplex:
    """Reduced complex straight from the cube of resolutions."""
    n = len(d.crossings)
    if n > cap:
        raise ResourceCapError(f"cube of {n} crossings exceeds the cube limit {cap}")
    n_plus, n_minus = d.n_plus, d.n_minus
    loops = [-(k + 1) for k in range(d.free_loops)]
    if n == 0:
        base = loops[0] if loops else None
    else:
        base = d.basepoint
    vert = []
    for v in range(1 << n):
        comp = _resolution_circles(d, v) if n else {}
        keys = sorted(set(comp.values())) + loops
        bkey = comp[base] if (n and base is not None) else base
        vert.append((comp, keys, bkey))
    gens: dict[int, list[Generator]] = defaultdict(list)
    index: dict = {}
    for v, (comp, keys, bkey) in enumerate(vert):
        r = bin(v).count("1")
        free = [k for k in keys if k != bkey]
        u = r - n_minus
        for mask in range(1 << len(free)):
            plus = frozenset(k for j, k in enumerate(free) if (mask >> j) & 1)
            deg = 2 * len(plus) - len(free)
            q = Fraction(deg + r + n_plus - 2 * n_minus, 2)
            index[(v, plus)] = (u, len(gens[u]))
            gens[u].append(Generator(u, q, (v, plus)))
    entries: dict[int, list] = defaultdict(list)
    for v, (comp, keys, bkey) in enumerate(vert):
        free = [k for k in keys if k != bkey]
        for i, (a, b, c, e) in enumerate(d.crossings):
            if (v >> i) & 1:
                continue
            w = v | (1 << i)
            wcomp, wkeys, wbkey = vert[w]
            ca, cc = comp[a], comp[c]
            for mask in range(1 << len(free)):
                plus = frozenset(k for j, k in enumerate(free) if (mask >> j) & 1)
                src = index[(v, plus)]
                # labels of untouched circles carry over by arc membership
                if ca != cc:
                    # merge
                    lab_a = "b" if ca == bkey else ("+" if ca in plus else "-")
                    lab_c = "b" if cc == bkey else ("+" if cc in plus else "-")
                    rest = {k for k in plus if k not in (ca, cc)}
                    merged = wcomp[a]
                    outs = []
                    if "b" in (lab_a, lab_c):
                        other = lab_c if lab_a == "b" else lab_a
                        if other == "+":
                            outs.append(frozenset(rest))
                    else:
                        if lab_a == "+" and lab_c == "+":
                            outs.append(frozenset(rest | {merged}))
                        elif "+" in (lab_a, lab_c):
                            outs.append(frozenset(rest))
                else:
                    # split
                    na, nc = wcomp[a], wcomp[c]
                    rest = {k for k in plus if k != ca}
                    outs = []
                    if ca == bkey:
                        # basepoint circle splits: x -> x (x) x
                        outs.append(frozenset(rest))
                    elif ca in plus:
                        outs.append(frozenset(rest | {na}))
                        outs.append(frozenset(rest | {nc}))
                    else:
                        outs.append(frozenset(rest))
                for tplus in outs:
                    tgt = index[(w, tplus)]
                    entries[src[0]].append((tgt[1], src[1]))
    d_out = {}
    for u in gens:
        if u + 1 in gens:
            d_out[u] = BitMatrix.from_entries(len(gens[u + 1]), len(gens[u]), _xor_entries(entries.get(u, [])))
    c = GradedComplex(dict(gens), d_out, name=d.name)
    c.index = index  # type: ignore[attr-defined]
    return c


def _xor_entries(entries):
    acc: dict = defaultdict(int)
    for e in entries:
        acc[e] ^= 1
    return [e for e, v in acc.items() if v]


def build_reduced_complex(d: PlanarDiagram, cap: int = DEFAULT_CAP, method: str = "auto") -> GradedComplex:
    """Reduced complex of ``d``: the cube for small diagrams, the scanning engine otherwise."""
    n = len(d.crossings)
    if n > cap:
        raise ResourceCapError(f"diagram has {n} crossings; cap is {cap}")
    if method == "auto":
        method = "cube" if n <= 8 else "scan"
    if method == "cube":
        c = cube_complex(d, cap=max(cap, CUBE_LIMIT) if n <= cap else cap)
    elif method == "scan":
        from .scan import scan_diagram

        c = scan_diagram(d)
    else:
        raise ValueError(f"unknown method {method!r}")
    c.check()
    return c


def khovanov(d: PlanarDiagram, cap: int = DEFAULT_CAP, method: str = "auto") -> GradedVectorSpace:
    return homology(build_reduced_complex(d, cap, method))


# ---------------------------------------------------------------------------
# derived invariants


def jones_polynomial(v: GradedVectorSpace) -> dict[Fraction, int]:
    """Coefficient of t^q is the u-Euler characteristic of the q-column."""
    out: dict[Fraction, int] = defaultdict(int)
    for (u, q), n in v.items():
        out[q] += (-1) ** (u % 2) * n
    return {q: c for q, c in sorted(out.items(), reverse=True) if c}


def format_laurent(p: Mapping[Fraction, int], var: str = "t") -> str:
    if not p:
        return "0"
    terms = []
    for e, c in sorted(p.items(), key=lambda kv: -kv[0]):
        mag = abs(c)
        sign = "-" if c < 0 else "+"
        if e == 0:
            body = str(mag)
        else:
            body = ("" if mag == 1 else f"{mag}*") + (var if e == 1 else f"{var}^{_fmt(Fraction(e))}")
        terms.append((sign, body))
    s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        s += f" {sign} {body}"
    return s


def determinant(v: GradedVectorSpace) -> int:
    """|sum over delta of (-1)^delta dim|.

    For links the delta gradings may be half-integers, but they all agree
    modulo 1, so signs are taken relative to the lowest diagonal.
    """
    deltas = v.by_delta()
    if not deltas:
        return 0
    low = min(deltas)
    total = 0
    for delta, n in deltas.items():
        step = delta - low
        if step.denominator != 1:
            raise ValueError("delta gradings do not agree modulo 1")
        total += (-1) ** (int(step) % 2) * n
    return abs(total)


def is_thin(v: GradedVectorSpace) -> bool:
    return len(v.by_delta()) <= 1


def summary(v: GradedVectorSpace) -> dict:
    return {
        "homology": v.to_json(),
        "jones": format_laurent(jones_polynomial(v)),
        "determinant": determinant(v),
        "thin": is_thin(v),
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True)
