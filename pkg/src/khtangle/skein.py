"""Chain maps of the twist family and the skein exact triangle.

Resolving a positive twist crossing to its oriented (0-) resolution gives a
chain map C(T(i+1)) -> C(T(i)) that preserves u and lowers q by 1/2.  For a
window whose lowest level n is negative, the level-m diagram is T(n) with
m - n positive twists appended (isotopic to T(m)), so that every quotient
map is literally a projection onto a face of the cube.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import f2la
from .diagram import (
    _UF,
    _renumber,
    OrientationError,
    PlanarDiagram,
    SuturedTangle,
    c_T,
    closure_infinity,
    twisted_closure,
    validate,
)
from .f2la import BitMatrix
from .khcomplex import (
    DEFAULT_CAP,
    GradedComplex,
    GradedVectorSpace,
    Reduction,
    ResourceCapError,
    cube_complex,
    homology,
    khovanov,
    reduce_with_transfer,
)
from .scan import level_signs, twist_tower


@dataclass
class ChainMap:
    source: GradedComplex
    target: GradedComplex
    blocks: dict[int, BitMatrix]  # per u: target dim x source dim
    q_shift: Fraction

    def block(self, u: int) -> BitMatrix:
        m = self.blocks.get(u)
        if m is None:
            return BitMatrix.zeros(self.target.dim(u), self.source.dim(u))
        return m

    def check(self) -> None:
        """Assert that the map commutes with the differentials and shifts q uniformly."""
        S, T = self.source, self.target
        for u in set(S.us) | set(T.us):
            m = self.block(u)
            assert m.shape == (T.dim(u), S.dim(u)), f"block shape mismatch at u={u}"
            for i, j in m.nonzero():
                assert T.gens[u][i].q == S.gens[u][j].q + self.q_shift, "map is not q-homogeneous"
            lhs = T.diff(u) @ m
            rhs = self.block(u + 1) @ S.diff(u)
            assert lhs == rhs, f"not a chain map at u={u}"

    def then(self, other: "ChainMap") -> "ChainMap":
        """other o self."""
        if other.source is not self.target and not _same_generators(other.source, self.target):
            raise ValueError("maps do not compose")
        blocks = {u: other.block(u) @ self.block(u) for u in self.source.us}
        return ChainMap(self.source, other.target, blocks, self.q_shift + other.q_shift)


def _same_generators(a: GradedComplex, b: GradedComplex) -> bool:
    if sorted(a.us) != sorted(b.us):
        return False
    return all([(g.q, g.meta) for g in a.gens[u]] == [(g.q, g.meta) for g in b.gens[u]] for u in a.us)


class MismatchError(ValueError):
    pass


def _arc_correspondence(t: SuturedTangle, low: int, m: int) -> tuple[PlanarDiagram, PlanarDiagram, dict[int, int]]:
    """Source/target diagrams of the quotient map and the arc map induced by 0-resolving."""

    base = level_signs(low, low)
    signs = level_signs(low, m)
    src = twisted_closure(t, signs)
    tgt = twisted_closure(t, base)
    # rebuild raw arcs: same construction as twisted_closure
    b0, b1, t0, t1 = t.boundary
    nxt = max(t.arcs()) + 1
    raw = list(t.crossings)
    cur_l, cur_r = t0, t1
    tops = []
    for s in signs:
        out_l, out_r = nxt, nxt + 1
        nxt += 2
        raw.append((cur_r, out_r, out_l, cur_l) if s > 0 else (cur_l, cur_r, out_r, out_l))
        tops.append((cur_l, cur_r, out_l, out_r))
        cur_l, cur_r = out_l, out_r
    uf_s = _UF()
    for c in raw:
        for a in c:
            uf_s.find(a)
    for a in t.boundary:
        uf_s.find(a)
    uf_s.union(cur_l, b0)
    uf_s.union(cur_r, b1)
    new_s, map_s, _ = _renumber(raw, uf_s, extra=list(t.boundary) + [cur_l, cur_r])
    k = len(base)
    top_l, top_r = (tops[k - 1][2], tops[k - 1][3]) if k else (t0, t1)
    uf_t = _UF()
    for c in raw[: len(t.crossings) + k]:
        for a in c:
            uf_t.find(a)
    for a in t.boundary:
        uf_t.find(a)
    uf_t.union(top_l, b0)
    uf_t.union(top_r, b1)
    new_t, map_t, _ = _renumber(raw[: len(t.crossings) + k], uf_t, extra=list(t.boundary) + [top_l, top_r])
    # 0-resolution of the extra positive twists joins each input to the output above it
    uf_q = _UF()
    for c in raw:
        for a in c:
            uf_q.find(a)
    for a in t.boundary:
        uf_q.find(a)
    for cl, cr, ol, orr in tops[k:]:
        uf_q.union(cl, ol)
        uf_q.union(cr, orr)
    uf_q.union(cur_l, b0)
    uf_q.union(cur_r, b1)
    target_raw = {a for c in raw[: len(t.crossings) + k] for a in c} | set(t.boundary)
    rep_t: dict = {}
    for a in target_raw:
        rep_t.setdefault(uf_q.find(a), a)
    arc_map: dict[int, int] = {}
    for a in uf_s.p:
        sid = map_s.get(uf_s.find(a))
        if sid is None:
            continue
        ra = rep_t.get(uf_q.find(a))
        if ra is None:
            continue
        tid = map_t[uf_t.find(ra)]
        prev = arc_map.setdefault(sid, tid)
        if prev != tid:
            raise MismatchError("inconsistent arc correspondence")
    return src, tgt, arc_map


def cube_quotient_map(t: SuturedTangle, m: int, n: int) -> ChainMap:
    """Projection of the cube of the level-m diagram onto the face where the extra twists are 0-resolved."""
    src, tgt, arc_map = _arc_correspondence(t, n, m)
    cs = cube_complex(src)
    ct = cube_complex(tgt)
    ntgt = len(tgt.crossings)
    extra_mask = ((1 << len(src.crossings)) - 1) ^ ((1 << ntgt) - 1)
    from .khcomplex import _resolution_circles

    entries: dict[int, list] = defaultdict(list)
    circ_cache: dict[int, dict] = {}
    for (v, plus), (u, j) in cs.index.items():
        if v & extra_mask:
            continue
        if v not in circ_cache:
            comp_s = _resolution_circles(src, v)
            comp_t = _resolution_circles(tgt, v) if ntgt else {}
            circ_cache[v] = {k: comp_t[arc_map[k]] for k in set(comp_s.values())}
        key_map = circ_cache[v]
        tplus = frozenset(key_map[k] if k >= 0 else k for k in plus)
        ut, it = ct.index[(v, tplus)]
        assert ut == u
        entries[u].append((it, j))
    blocks = {u: BitMatrix.from_entries(ct.dim(u), cs.dim(u), entries.get(u, [])) for u in cs.us}
    phi = ChainMap(cs, ct, blocks, Fraction(-(m - n), 2))
    phi.check()
    return phi


def twist_quotient_map(t: SuturedTangle, m: int, n: int, method: str = "auto", cap: int = DEFAULT_CAP) -> ChainMap:
    """Chain map C(T(m)) -> C(T(n)) resolving the m - n extra twist crossings to 0."""
    if m <= n:
        raise ValueError("twist_quotient_map needs m > n")
    if not validate(t).braid_like:
        raise OrientationError("twist maps need a braid-like tangle")
    size = len(t.crossings) + len(level_signs(n, m))
    if method == "auto":
        method = "cube" if size <= 8 else "scan"
    if method == "cube":
        return cube_quotient_map(t, m, n)
    _check_cap(t, n, m, cap)
    tw = twist_tower(t, n, m)
    phi = None
    for i in range(m - 1, n - 1, -1):
        step = ChainMap(tw.levels[i + 1].complex, tw.levels[i].complex, tw.maps[i], Fraction(-1, 2))
        phi = step if phi is None else phi.then(step)
    phi.check()
    return phi


def _check_cap(t: SuturedTangle, n: int, m: int, cap: int) -> None:
    worst = len(t.crossings) + max(abs(n), abs(m))
    if worst > cap:
        raise ResourceCapError(f"closures up to {worst} crossings exceed the cap {cap}")


def induced_on_homology(phi: ChainMap, r_src: Reduction, r_tgt: Reduction) -> dict[int, BitMatrix]:
    """projection_tgt o phi o inclusion_src, per u."""
    if r_src.source is not phi.source or r_tgt.source is not phi.target:
        raise MismatchError("reductions do not belong to the map's complexes")
    out = {}
    for u in sorted(set(r_src.reduced) | set(r_tgt.reduced)):
        hs = len(r_src.reduced.get(u, []))
        ht = len(r_tgt.reduced.get(u, []))
        if hs == 0 or ht == 0:
            out[u] = BitMatrix.zeros(ht, hs)
            continue
        out[u] = r_tgt.projection[u] @ phi.block(u) @ r_src.inclusion[u]
    return out


def rank_by_u(blocks: dict[int, BitMatrix]) -> dict[int, int]:
    return {u: f2la.rank(m) for u, m in sorted(blocks.items())}


def dump_blocks(blocks: dict[int, BitMatrix]) -> str:
    """TSV dump of induced matrices per u."""
    lines = []
    for u, m in sorted(blocks.items()):
        lines.append(f"u\t{u}\t{m.rows}x{m.cols}\trank\t{f2la.rank(m)}")
        for row in m.to_dense():
            lines.append("\t".join(str(int(x)) for x in row))
    return "\n".join(lines) + "\n"


@dataclass
class TriangleReport:
    level: int
    dim_upper: int
    dim_lower: int
    kernel: dict[int, int]
    cokernel: dict[int, int]
    third: dict[int, int]
    shift: int
    ok_total: bool
    ok_per_u: bool
    failures: list

    @property
    def ok(self) -> bool:
        return self.ok_total and self.ok_per_u


def triangle_check(t: SuturedTangle, i: int, step: Optional[dict] = None,
                   upper: Optional[GradedVectorSpace] = None, lower: Optional[GradedVectorSpace] = None,
                   unknot_side: Optional[GradedVectorSpace] = None) -> TriangleReport:
    """Exactness bookkeeping for f_i: A_{i+1} -> A_i.

    With B = Kh(T(1/0)) shifted up in u by c = c_T + i + 1, exactness of
    B^u -> A_{i+1}^u -> A_i^u -> B^{u+1} gives dim B^u = coker f^{u-1} + ker f^u.
    ``step``, ``upper`` and ``lower`` may be supplied from an existing window.
    """
    if step is None:
        tw = twist_tower(t, i, i + 1)
        r_up = reduce_with_transfer(tw.levels[i + 1].complex)
        r_lo = reduce_with_transfer(tw.levels[i].complex)
        phi = ChainMap(tw.levels[i + 1].complex, tw.levels[i].complex, tw.maps[i], Fraction(-1, 2))
        step = induced_on_homology(phi, r_up, r_lo)
        upper, lower = r_up.space(), r_lo.space()
    if unknot_side is None:
        unknot_side = khovanov(closure_infinity(t))
    up_u, lo_u = upper.by_u(), lower.by_u()
    us = sorted(set(up_u) | set(lo_u))
    ker, coker = {}, {}
    for u in us:
        r = f2la.rank(step[u]) if u in step else 0
        ker[u] = up_u.get(u, 0) - r
        coker[u] = lo_u.get(u, 0) - r
    shift = c_T(t) + i + 1
    third = {u + shift: n for u, n in unknot_side.by_u().items()}
    failures = []
    total = sum(ker.values()) + sum(coker.values())
    ok_total = total == unknot_side.total
    if not ok_total:
        failures.append(f"ker + coker = {total}, Kh(T(1/0)) has dimension {unknot_side.total}")
    ok_u = True
    for u in sorted(set(third) | set(us) | {x + 1 for x in us}):
        lhs = third.get(u, 0)
        rhs = coker.get(u - 1, 0) + ker.get(u, 0)
        if lhs != rhs:
            ok_u = False
            failures.append(f"u={u}: third term {lhs} != coker {coker.get(u - 1, 0)} + ker {ker.get(u, 0)}")
    return TriangleReport(i, upper.total, lower.total, ker, coker, third, shift, ok_total, ok_u, failures)
