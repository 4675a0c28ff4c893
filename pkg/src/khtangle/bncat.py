"""Dotted cobordisms over F2 with dot^2 = 0, and complexes built from them.

Objects are crossingless matchings of a finite set of integer boundary
points, carrying a homological degree ``r`` and a quantum shift ``s``.  A
morphism between matchings ``a`` and ``b`` is an F2 sum of basis surfaces:
one disk per circle of ``a`` glued to ``b``, each disk carrying at most one
dot.  A basis surface is stored as the frozenset of dotted circle keys (the
smallest boundary point on the circle), and a morphism as a frozenset of
such patterns.

Closed loops produced by gluing are removed at once by delooping:
a loop with shift ``s`` splits into copies with shifts ``s + 1`` and
``s - 1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

Matching = tuple[tuple[int, int], ...]
Pattern = frozenset
Morphism = frozenset

ZERO: Morphism = frozenset()
IDENTITY: Morphism = frozenset({frozenset()})


def matching(pairs: Iterable[tuple[int, int]]) -> Matching:
    return tuple(sorted(tuple(sorted(p)) for p in pairs))


def points(a: Matching) -> frozenset:
    return frozenset(x for p in a for x in p)


def add(m1: Morphism, m2: Morphism) -> Morphism:
    return m1 ^ m2


class _UF:
    __slots__ = ("p",)

    def __init__(self, items=()):
        self.p = {x: x for x in items}

    def find(self, x):
        p = self.p
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.p[rb] = ra


def circle_keys(*ms: Matching) -> dict:
    """Map each point to the smallest point on its circle in the union of ``ms``."""
    uf = _UF(points(ms[0]))
    for m in ms:
        for x, y in m:
            uf.union(x, y)
    groups: dict = {}
    for x in uf.p:
        groups.setdefault(uf.find(x), []).append(x)
    out = {}
    for members in groups.values():
        k = min(members)
        for x in members:
            out[x] = k
    return out


def glue_match(a: Matching, b: Matching) -> tuple[Matching, tuple[int, ...]]:
    """Join two matchings along their common points.

    Returns the matching on the symmetric difference of the point sets and
    the keys (smallest point) of the closed loops formed.
    """
    pa, pb = points(a), points(b)
    shared = pa & pb
    adj: dict = {}
    for e, (x, y) in enumerate(a + b):
        adj.setdefault(x, []).append((y, e))
        adj.setdefault(y, []).append((x, e))
    seen = set()

    def walk(x):
        members = [x]
        cur, via = x, None
        while True:
            nxt = next((y, e) for y, e in adj[cur] if e != via)
            cur, via = nxt
            if cur == x or cur not in shared:
                return cur, members
            members.append(cur)

    pairs = []
    for x in sorted((pa | pb) - shared):
        if x in seen:
            continue
        end, members = walk(x)
        seen.update(members)
        seen.add(end)
        pairs.append((x, end))
    loops = []
    for x in sorted(shared):
        if x in seen:
            continue
        _, members = walk(x)
        seen.update(members)
        loops.append(min(members))
    return matching(pairs), tuple(sorted(loops))


# ---------------------------------------------------------------------------
# surface evaluation


def _component_options(k_circles: tuple, dots: int) -> Optional[list[frozenset]]:
    """Basis expansion of a connected genus-0 surface with ``dots`` dots."""
    if dots >= 2:
        return None
    if dots == 1:
        return [frozenset(k_circles)]
    if not k_circles:
        return None  # undotted sphere
    full = frozenset(k_circles)
    return [full - {c} for c in k_circles]


def _evaluate(comps, dots_per_comp) -> list[frozenset]:
    options = []
    for (circles, dead), dots in zip(comps, dots_per_comp):
        if dead:
            return []
        opt = _component_options(circles, dots)
        if opt is None:
            return []
        options.append(opt)
    if len(options) == 1:
        return options[0]
    return [frozenset().union(*combo) for combo in itertools.product(*options)]


@dataclass(frozen=True)
class _Plan:
    comps: tuple  # per component: (boundary circle keys, dead flag)
    f_comp: dict  # f-disk key -> component index
    g_comp: dict  # g-disk key -> component index


def _build_plan(nodes_f, nodes_g, joins, boundary_circles):
    """Common bookkeeping for composition and horizontal gluing.

    ``joins`` lists (f key, g key) pairs glued along an interval;
    ``boundary_circles`` lists (circle key, ('f'|'g', disk key)).
    """
    uf = _UF([("f", k) for k in nodes_f] + [("g", k) for k in nodes_g])
    for kf, kg in joins:
        uf.union(("f", kf), ("g", kg))
    roots = sorted({uf.find(n) for n in uf.p}, key=repr)
    index = {r: i for i, r in enumerate(roots)}
    n_disks = [0] * len(roots)
    n_joins = [0] * len(roots)
    circles: list[list] = [[] for _ in roots]
    for n in uf.p:
        n_disks[index[uf.find(n)]] += 1
    for kf, _ in joins:
        n_joins[index[uf.find(("f", kf))]] += 1
    for key, node in boundary_circles:
        circles[index[uf.find(node)]].append(key)
    comps = []
    for i in range(len(roots)):
        chi = n_disks[i] - n_joins[i]
        k = len(circles[i])
        g2 = 2 - chi - k
        if g2 < 0 or g2 % 2:
            raise AssertionError("inconsistent surface topology")
        comps.append((tuple(circles[i]), g2 > 0))
    f_comp = {k: index[uf.find(("f", k))] for k in nodes_f}
    g_comp = {k: index[uf.find(("g", k))] for k in nodes_g}
    return _Plan(tuple(comps), f_comp, g_comp)


@lru_cache(maxsize=1 << 18)
def _compose_plan(a: Matching, b: Matching, c: Matching) -> _Plan:
    cab = circle_keys(a, b)
    cbc = circle_keys(b, c)
    cac = circle_keys(a, c)
    joins = [(cab[x], cbc[x]) for x, _ in b]
    bcs = {}
    for x, k in cac.items():
        bcs.setdefault(k, ("f", cab[x]))
    return _build_plan(set(cab.values()), set(cbc.values()), joins, sorted(bcs.items()))


def _combine(plan: _Plan, f: Morphism, g: Morphism) -> Morphism:
    if not f or not g:
        return ZERO
    if any(dead for _, dead in plan.comps):
        return ZERO
    ncomp = len(plan.comps)
    acc: dict = {}
    for pf in f:
        base = [0] * ncomp
        for k in pf:
            base[plan.f_comp[k]] += 1
        for pg in g:
            dots = list(base)
            for k in pg:
                dots[plan.g_comp[k]] += 1
            for pat in _evaluate(plan.comps, dots):
                acc[pat] = acc.get(pat, 0) ^ 1
    return frozenset(p for p, v in acc.items() if v)


def compose(a: Matching, b: Matching, c: Matching, f: Morphism, g: Morphism) -> Morphism:
    """g o f for f: a -> b and g: b -> c."""
    return _combine(_compose_plan(a, b, c), f, g)


@lru_cache(maxsize=1 << 18)
def _glue_plan(a: Matching, b: Matching, pa: Matching, pb: Matching):
    P = points(a)
    Q = points(pa)
    S = P & Q
    cab = circle_keys(a, b) if a else {}
    cg = circle_keys(pa, pb) if pa else {}
    joins = [(cab[x], cg[x]) for x in sorted(S)]

    def tv(x):
        return ("t", x) if x in S else x

    def bv(x):
        return ("b", x) if x in S else x

    verts = [x for x in (P | Q) - S] + [("t", x) for x in S] + [("b", x) for x in S]
    uf = _UF(verts)
    for m in (a, pa):
        for x, y in m:
            uf.union(tv(x), tv(y))
    for m in (b, pb):
        for x, y in m:
            uf.union(bv(x), bv(y))
    groups: dict = {}
    for v in verts:
        groups.setdefault(uf.find(v), []).append(v)
    bcs = []
    for members in groups.values():
        ints = [v for v in members if not isinstance(v, tuple)]
        if ints:
            key = min(ints)
            p = key
            node = ("f", cab[p]) if p in P else ("g", cg[p])
        else:
            side = members[0][0]
            p = min(v[1] for v in members)
            key = (side, p)
            node = ("f", cab[p])
        bcs.append((key, node))
    bcs.sort(key=repr)
    plan = _build_plan(set(cab.values()), set(cg.values()), joins, bcs)
    top, top_loops = glue_match(a, pa)
    bot, bot_loops = glue_match(b, pb)
    return plan, top, top_loops, bot, bot_loops


def glue(a: Matching, b: Matching, pa: Matching, pb: Matching, f: Morphism, g: Morphism):
    """Horizontal gluing of f: a -> b with g: pa -> pb along common points.

    Returns (top matching, top loops, bottom matching, bottom loops, patterns);
    loop circles appear in patterns as ('t', key) and ('b', key).
    """
    plan, top, tl, bot, bl = _glue_plan(a, b, pa, pb)
    return top, tl, bot, bl, _combine(plan, f, g)


def eps_choices(loops: tuple) -> list[tuple[int, ...]]:
    return list(itertools.product((1, -1), repeat=len(loops)))


def deloop(pats: Morphism, src_loops, src_eps, tgt_loops, tgt_eps) -> Morphism:
    """Component of a morphism between delooped summands.

    A source loop in the +1 summand keeps its dotted terms; in the -1 summand
    its undotted terms.  For target loops the roles are exchanged.
    """
    if not src_loops and not tgt_loops:
        return pats
    out = []
    for p in pats:
        ok = True
        for key, e in zip(src_loops, src_eps):
            if (("t", key) in p) != (e == 1):
                ok = False
                break
        if ok:
            for key, e in zip(tgt_loops, tgt_eps):
                if (("b", key) in p) != (e == -1):
                    ok = False
                    break
        if ok:
            out.append(frozenset(k for k in p if not isinstance(k, tuple)))
    return frozenset(out)


def morphism_degree(a: Matching, b: Matching, pat: Pattern) -> int:
    """Quantum degree of a basis surface: circles - points/2 - 2 dots."""
    nc = len(set(circle_keys(a, b).values())) if a else 0
    return nc - len(a) - 2 * len(pat)


# ---------------------------------------------------------------------------
# complexes


@dataclass(frozen=True)
class Obj:
    match: Matching
    r: int
    s: int


class BNComplex:
    """Complex over the dotted cobordism category, stored sparsely by object id."""

    def __init__(self):
        self.objs: dict[int, Obj] = {}
        self.out: dict[int, dict[int, Morphism]] = {}
        self.inn: dict[int, dict[int, Morphism]] = {}
        self._next = 0

    def __len__(self):
        return len(self.objs)

    def add_obj(self, obj: Obj) -> int:
        i = self._next
        self._next += 1
        self.objs[i] = obj
        self.out[i] = {}
        self.inn[i] = {}
        return i

    def add_arrow(self, x: int, y: int, m: Morphism) -> None:
        if not m:
            return
        cur = self.out[x].get(y, ZERO) ^ m
        if cur:
            self.out[x][y] = cur
            self.inn[y][x] = cur
        else:
            self.out[x].pop(y, None)
            self.inn[y].pop(x, None)

    def remove(self, i: int) -> None:
        for y in self.out.pop(i):
            self.inn[y].pop(i, None)
        for x in self.inn.pop(i):
            self.out[x].pop(i, None)
        del self.objs[i]

    def ids(self) -> list[int]:
        return sorted(self.objs)

    def check(self) -> None:
        """Assert d o d = 0 and that every arrow raises r by one and is q-homogeneous."""
        for x, outs in self.out.items():
            ox = self.objs[x]
            for y, m in outs.items():
                oy = self.objs[y]
                assert oy.r == ox.r + 1, "arrow must raise homological degree"
                for p in m:
                    assert morphism_degree(ox.match, oy.match, p) == ox.s - oy.s, "inhomogeneous arrow"
            acc: dict = {}
            for y, m in outs.items():
                for z, m2 in self.out[y].items():
                    acc[z] = acc.get(z, ZERO) ^ compose(ox.match, self.objs[y].match, self.objs[z].match, m, m2)
            assert not any(acc.values()), "d o d != 0"


class TrackedMap:
    """Chain map from a BNComplex (the one being simplified) to a fixed target."""

    def __init__(self, source: BNComplex, target: BNComplex):
        self.source = source
        self.target = target
        self.comp: dict[int, dict[int, Morphism]] = {}

    def add(self, x: int, t: int, m: Morphism) -> None:
        if not m:
            return
        row = self.comp.setdefault(x, {})
        cur = row.get(t, ZERO) ^ m
        if cur:
            row[t] = cur
        else:
            row.pop(t, None)

    def check(self) -> None:
        """Assert d_T G = G d_S."""
        S, T = self.source, self.target
        for x in S.objs:
            ox = S.objs[x]
            acc: dict = {}
            for t, m in self.comp.get(x, {}).items():
                for t2, m2 in T.out[t].items():
                    acc[t2] = acc.get(t2, ZERO) ^ compose(ox.match, T.objs[t].match, T.objs[t2].match, m, m2)
            for y, m in S.out[x].items():
                for t2, m2 in self.comp.get(y, {}).items():
                    acc[t2] = acc.get(t2, ZERO) ^ compose(ox.match, S.objs[y].match, T.objs[t2].match, m, m2)
            assert not any(acc.values()), "tracked map is not a chain map"


def _is_iso(c: BNComplex, x: int, y: int, m: Morphism) -> bool:
    ox, oy = c.objs[x], c.objs[y]
    return m == IDENTITY and ox.match == oy.match and ox.s == oy.s


def eliminate(c: BNComplex, i: int, j: int, maps: Iterable[TrackedMap] = ()) -> None:
    """Gaussian elimination of the isomorphism i -> j."""
    ins_j = [(x, m) for x, m in c.inn[j].items() if x != i]
    outs_i = [(y, m) for y, m in c.out[i].items() if y != j]
    mid = c.objs[i].match
    for x, mx in ins_j:
        ax = c.objs[x].match
        for y, my in outs_i:
            c.add_arrow(x, y, compose(ax, mid, c.objs[y].match, mx, my))
    for g in maps:
        row_i = g.comp.get(i, {})
        if row_i:
            for x, mx in ins_j:
                ax = c.objs[x].match
                for t, mt in row_i.items():
                    g.add(x, t, compose(ax, mid, g.target.objs[t].match, mx, mt))
        g.comp.pop(i, None)
        g.comp.pop(j, None)
    c.remove(i)
    c.remove(j)


def simplify(c: BNComplex, maps: Iterable[TrackedMap] = ()) -> int:
    """Eliminate isomorphism arrows until none remain; returns the count removed."""
    maps = list(maps)
    removed = 0
    pending = sorted(c.objs)
    while pending:
        nxt = set()
        for x in pending:
            if x not in c.objs:
                continue
            for y, m in sorted(c.out[x].items()):
                if _is_iso(c, x, y, m):
                    touched = set(c.inn[y]) | set(c.out[x])
                    eliminate(c, x, y, maps)
                    removed += 1
                    nxt |= {z for z in touched if z in c.objs}
                    break
        pending = sorted(nxt)
    return removed


def tensor(c: BNComplex, piece: list[tuple[Matching, int, int]], piece_d: dict) -> tuple[BNComplex, dict]:
    """Tensor a complex with a small piece complex, gluing along common points, then deloop.

    ``piece`` lists (matching, r, s); ``piece_d`` maps (i, j) to morphisms.
    Returns the new complex and a map (old id, piece index) -> list of (new id, eps).
    """
    out = BNComplex()
    index: dict = {}
    info: dict = {}
    for x in c.ids():
        ox = c.objs[x]
        for pi, (pm, pr, ps) in enumerate(piece):
            top, loops = glue_match(ox.match, pm)
            info[(x, pi)] = loops
            lst = []
            for eps in eps_choices(loops):
                nid = out.add_obj(Obj(top, ox.r + pr, ox.s + ps + sum(eps)))
                lst.append((nid, eps))
            index[(x, pi)] = lst
    for x in c.ids():
        ax = c.objs[x].match
        for y, m in c.out[x].items():
            ay = c.objs[y].match
            for pi, (pm, _, _) in enumerate(piece):
                _, tl, _, bl, pats = glue(ax, ay, pm, pm, m, IDENTITY)
                _spread(out, pats, index[(x, pi)], tl, index[(y, pi)], bl)
        for (pi, pj), pmor in piece_d.items():
            _, tl, _, bl, pats = glue(ax, ax, piece[pi][0], piece[pj][0], IDENTITY, pmor)
            _spread(out, pats, index[(x, pi)], tl, index[(x, pj)], bl)
    return out, index


def _spread(out: BNComplex, pats, src_list, tl, tgt_list, bl):
    if not pats:
        return
    for sid, se in src_list:
        for tid, te in tgt_list:
            out.add_arrow(sid, tid, deloop(pats, tl, se, bl, te))


def tensor_map(g: TrackedMap, piece: tuple[Matching, int, int], src_index: dict, tgt_index: dict,
               new_source: BNComplex, new_target: BNComplex) -> TrackedMap:
    """Apply (- glued with the identity of a one-object piece) to a tracked map."""
    res = TrackedMap(new_source, new_target)
    pm = piece[0]
    for x, row in g.comp.items():
        ax = g.source.objs[x].match
        for t, m in row.items():
            at = g.target.objs[t].match
            _, tl, _, bl, pats = glue(ax, at, pm, pm, m, IDENTITY)
            if not pats:
                continue
            for sid, se in src_index[(x, 0)]:
                for tid, te in tgt_index[(t, 0)]:
                    res.add(sid, tid, deloop(pats, tl, se, bl, te))
    return res


def relabel(c: BNComplex, mapping: dict[int, int]) -> BNComplex:
    """Rename boundary points; circle keys are recomputed."""
    out = BNComplex()
    ids = {}
    for x in c.ids():
        o = c.objs[x]
        ids[x] = out.add_obj(Obj(matching((mapping.get(p, p), mapping.get(q, q)) for p, q in o.match), o.r, o.s))
    for x in c.ids():
        for y, m in c.out[x].items():
            out.add_arrow(ids[x], ids[y], _rekey(c.objs[x].match, c.objs[y].match, m, mapping))
    return out


def _rekey(a: Matching, b: Matching, m: Morphism, mapping: dict) -> Morphism:
    keys = circle_keys(a, b) if a else {}
    new_key = {}
    for x, k in keys.items():
        v = mapping.get(x, x)
        if k not in new_key or v < new_key[k]:
            new_key[k] = v
    return frozenset(frozenset(new_key[k] for k in p) for p in m)
