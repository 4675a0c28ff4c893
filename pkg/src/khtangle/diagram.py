"""Sutured tangles, closed link diagrams, and the twist-closure family.

Crossings are 4-tuples of arc identifiers listed counterclockwise; the
strand through slots 0 and 2 passes under, the strand through slots 1 and 3
passes over.  A tangle additionally names the arcs that end on its four
boundary slots: bottom-left ``b0``, bottom-right ``b1``, top-left ``t0``,
top-right ``t1``.

The closure ``T(n)`` stacks ``|n|`` half twists on top of ``t0, t1`` and then
runs the two free ends back down the sides to ``b0`` (left) and ``b1``
(right).  ``T(1/0)`` caps ``b0`` to ``b1`` and ``t0`` to ``t1`` instead.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

Crossing = tuple[int, int, int, int]
HalfEdge = tuple[int, int]  # (crossing index, slot)

SLOTS = ("b0", "b1", "t0", "t1")
# counterclockwise order of the boundary slots as seen from outside the disk
_OUTER_ROTATION = ("b0", "t0", "t1", "b1")


class TangleError(ValueError):
    """Malformed tangle or diagram input; ``arcs`` lists the offending arc ids."""

    def __init__(self, message: str, arcs: Sequence[int] = ()):
        super().__init__(message)
        self.arcs = tuple(arcs)


class OrientationError(TangleError):
    pass


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class SuturedTangle:
    crossings: tuple[Crossing, ...]
    boundary: tuple[int, int, int, int]  # arcs at b0, b1, t0, t1
    name: str = ""

    @classmethod
    def make(cls, crossings: Iterable[Sequence[int]], boundary, name: str = "") -> "SuturedTangle":
        if isinstance(boundary, dict):
            boundary = tuple(int(boundary[s]) for s in SLOTS)
        return cls(tuple(tuple(int(a) for a in c) for c in crossings), tuple(int(b) for b in boundary), name)

    @property
    def slots(self) -> dict[str, int]:
        return dict(zip(SLOTS, self.boundary))

    def arcs(self) -> list[int]:
        return sorted({a for c in self.crossings for a in c} | set(self.boundary))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "crossings": [list(c) for c in self.crossings],
            "boundary": self.slots,
        }


@dataclass(frozen=True)
class ValidationReport:
    endpoint_count: int
    planar: bool
    genus: int
    braid_like: bool
    strands: tuple[tuple[str, str], ...]
    closed_components: int

    @property
    def ok(self) -> bool:
        return self.endpoint_count == 4 and self.planar


@dataclass(frozen=True)
class PlanarDiagram:
    """Closed oriented diagram.

    Crossings are normalized so that slot 0 is the incoming under-strand; the
    over-strand then runs 3 -> 1 at a positive crossing and 1 -> 3 at a
    negative one.
    """

    crossings: tuple[Crossing, ...]
    signs: tuple[int, ...]
    basepoint: Optional[int]
    distinguished: tuple[int, ...] = ()
    free_loops: int = 0
    side_arcs: Optional[tuple[int, int]] = None
    name: str = ""

    @property
    def sign_counts(self) -> tuple[int, int]:
        return crossing_signs(self)

    @property
    def n_plus(self) -> int:
        return sum(1 for s in self.signs if s > 0)

    @property
    def n_minus(self) -> int:
        return sum(1 for s in self.signs if s < 0)

    def __len__(self) -> int:
        return len(self.crossings)

    def arcs(self) -> list[int]:
        return sorted({a for c in self.crossings for a in c})

    @property
    def orientation(self) -> dict[int, tuple[HalfEdge, HalfEdge]]:
        """arc -> (tail, head) half-edges."""
        tails: dict[int, HalfEdge] = {}
        heads: dict[int, HalfEdge] = {}
        for i, (c, s) in enumerate(zip(self.crossings, self.signs)):
            ins = (0, 3) if s > 0 else (0, 1)
            for k in range(4):
                (heads if k in ins else tails)[c[k]] = (i, k)
        return {a: (tails[a], heads[a]) for a in heads}

    def components(self) -> list[list[int]]:
        """Arc cycles of the link, each listed in orientation order."""
        orient = self.orientation
        seen: set[int] = set()
        comps = []
        for a in sorted(orient):
            if a in seen:
                continue
            cyc = []
            cur = a
            while cur not in seen:
                seen.add(cur)
                cyc.append(cur)
                ci, k = orient[cur][1]
                cur = self.crossings[ci][(k + 2) % 4]
            comps.append(cyc)
        return comps

    def to_json(self) -> dict:
        out = {"name": self.name, "crossings": [list(c) for c in self.crossings], "basepoint": self.basepoint}
        if self.distinguished:
            out["distinguished"] = list(self.distinguished)
        if self.free_loops:
            out["free_loops"] = self.free_loops
        return out


# ---------------------------------------------------------------------------
# helpers


def _halfedges(crossings: Sequence[Crossing]) -> dict[int, list[HalfEdge]]:
    he: dict[int, list[HalfEdge]] = defaultdict(list)
    for i, c in enumerate(crossings):
        for k, a in enumerate(c):
            he[a].append((i, k))
    return he


def _arc_counts(t: SuturedTangle) -> dict[int, int]:
    count: dict[int, int] = defaultdict(int)
    for c in t.crossings:
        for a in c:
            count[a] += 1
    for a in t.boundary:
        count[a] += 1
    return count


def _check_arcs(t: SuturedTangle) -> None:
    bad = sorted(a for a, n in _arc_counts(t).items() if n != 2)
    nonpos = sorted({a for c in t.crossings for a in c} | set(t.boundary))
    nonpos = [a for a in nonpos if a <= 0]
    if nonpos:
        raise TangleError(f"arc identifiers must be positive integers: {nonpos}", nonpos)
    if any(len(c) != 4 for c in t.crossings):
        raise TangleError("every crossing needs exactly four arcs")
    if bad:
        counts = _arc_counts(t)
        detail = ", ".join(f"{a} (x{counts[a]})" for a in bad)
        raise TangleError(f"arcs must occur exactly twice counting boundary slots; offending: {detail}", bad)


def _genus(vertices: dict, edges: list[tuple]) -> tuple[int, int]:
    """Genus and component count of a graph with a rotation system.

    ``vertices`` maps vertex -> degree (darts are (vertex, k) in counterclockwise
    order); ``edges`` pairs up darts.
    """
    alpha = {}
    for d1, d2 in edges:
        alpha[d1] = d2
        alpha[d2] = d1
    darts = [(v, k) for v, deg in vertices.items() for k in range(deg)]
    missing = [d for d in darts if d not in alpha]
    if missing:
        raise TangleError(f"unmatched arc ends at {missing[:4]}")
    seen = set()
    faces = 0
    for d in darts:
        if d in seen:
            continue
        faces += 1
        cur = d
        while cur not in seen:
            seen.add(cur)
            v, k = alpha[cur]
            cur = (v, (k + 1) % vertices[v])
    parent = {v: v for v in vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (v1, _), (v2, _) in edges:
        parent[find(v1)] = find(v2)
    comps = len({find(v) for v in vertices})
    chi_sum = len(vertices) - len(edges) + faces
    return (2 * comps - chi_sum) // 2, comps


def _trace(crossings: Sequence[Crossing], he: dict[int, list[HalfEdge]], arc: int, entry: HalfEdge):
    """Walk a strand that enters the crossing set at half-edge ``entry``.

    Returns the incoming half-edges met along the way and the arc on which the
    walk leaves the crossing set (None when it closes up).
    """
    visited_in = []
    cur = entry
    while True:
        visited_in.append(cur)
        ci, k = cur
        out_arc = crossings[ci][(k + 2) % 4]
        out_he = (ci, (k + 2) % 4)
        nxt = [h for h in he[out_arc] if h != out_he]
        if not nxt:
            return visited_in, out_arc
        cur = nxt[0]
        if cur == entry:
            return visited_in, None


def _first_traversal_ins(crossings: Sequence[Crossing], he, done: set[HalfEdge]) -> set[HalfEdge]:
    """Orient every component not yet touched by ``done``; returns incoming half-edges."""
    ins: set[HalfEdge] = set()
    covered = set(done)
    for ci, k in list(done):
        covered.add((ci, (k + 2) % 4))
    for a in sorted(he):
        hs = sorted(he[a])
        if len(hs) != 2 or hs[0] in covered or hs[1] in covered:
            continue
        visited, _ = _trace(crossings, he, a, hs[0])
        for ci, k in visited:
            ins.add((ci, k))
            covered.add((ci, k))
            covered.add((ci, (k + 2) % 4))
    return ins


def _normalize(crossings: Sequence[Crossing], ins: set[HalfEdge]) -> tuple[tuple[Crossing, ...], tuple[int, ...]]:
    out = []
    signs = []
    for i, c in enumerate(crossings):
        under_in = (i, 0) in ins
        under_out = (i, 2) in ins
        over_3 = (i, 3) in ins
        over_1 = (i, 1) in ins
        if under_in == under_out or over_1 == over_3:
            raise OrientationError(f"crossing {i} {tuple(c)} does not see two incoming strands", c)
        if under_in:
            nc = tuple(c)
            pos = over_3
        else:
            nc = (c[2], c[3], c[0], c[1])
            pos = over_1
        out.append(nc)
        signs.append(1 if pos else -1)
    return tuple(out), tuple(signs)


class _UF:
    def __init__(self):
        self.p: dict[int, int] = {}

    def find(self, x):
        self.p.setdefault(x, x)
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.p[max(ra, rb)] = min(ra, rb)


def _renumber(crossings: Sequence[Crossing], uf: _UF, extra: Iterable[int] = ()):
    """Relabel union-find classes 1..k in order of first appearance."""
    mapping: dict[int, int] = {}
    for c in crossings:
        for a in c:
            r = uf.find(a)
            if r not in mapping:
                mapping[r] = len(mapping) + 1
    loops = set()
    for a in extra:
        r = uf.find(a)
        if r not in mapping:
            loops.add(r)
    new = tuple(tuple(mapping[uf.find(a)] for a in c) for c in crossings)
    return new, mapping, len(loops)


# ---------------------------------------------------------------------------
# tangle operations


def _strands(t: SuturedTangle):
    """Open strands as (start slot, end slot, incoming half-edges) plus closed-component half-edges."""
    he = _halfedges(t.crossings)
    slot_of = {}
    for s, a in zip(SLOTS, t.boundary):
        slot_of.setdefault(a, []).append(s)
    strands = []
    ins: set[HalfEdge] = set()
    used_slots: set[str] = set()
    for s in ("b0", "b1", "t0", "t1"):
        if s in used_slots:
            continue
        a = t.slots[s]
        used_slots.add(s)
        if not he.get(a):
            other = [x for x in slot_of[a] if x != s]
            end = other[0]
            used_slots.add(end)
            strands.append((s, end, ()))
            continue
        entry = he[a][0]
        visited, out_arc = _trace(t.crossings, he, a, entry)
        end = [x for x in slot_of.get(out_arc, []) if x not in used_slots]
        if not end:
            raise TangleError("strand does not reach the boundary", [a])
        used_slots.add(end[0])
        strands.append((s, end[0], tuple(visited)))
        ins.update(visited)
    closed = _first_traversal_ins(t.crossings, he, ins)
    return strands, ins, closed


def validate(t: SuturedTangle) -> ValidationReport:
    """Check arc multiplicities, planarity, and braid-like admissibility."""
    _check_arcs(t)
    he = _halfedges(t.crossings)
    vertices = {i: 4 for i in range(len(t.crossings))}
    vertices["B"] = 4
    darts_of: dict[int, list] = defaultdict(list)
    for a, hs in he.items():
        darts_of[a].extend(hs)
    for k, s in enumerate(_OUTER_ROTATION):
        darts_of[t.slots[s]].append(("B", k))
    edges = [tuple(ds) for ds in darts_of.values()]
    genus, _ = _genus(vertices, edges)
    strands, _, closed = _strands(t)
    braid = all(a[0] == "b" and b[0] == "t" or a[0] == "t" and b[0] == "b" for a, b, _ in strands)
    n_closed = 0
    visited: set[HalfEdge] = set()
    for h in sorted(closed):
        if h in visited:
            continue
        n_closed += 1
        vis, _ = _trace(t.crossings, he, t.crossings[h[0]][h[1]], h)
        visited.update(vis)
    return ValidationReport(4, genus == 0, genus, braid, tuple((a, b) for a, b, _ in strands), n_closed)


def _braid_ins(t: SuturedTangle) -> set[HalfEdge]:
    strands, ins, closed = _strands(t)
    out = set(closed)
    for start, end, visited in strands:
        if start[0] == "b" and end[0] == "t":
            out.update(visited)
        elif start[0] == "t" and end[0] == "b":
            out.update((ci, (k + 2) % 4) for ci, k in visited)
        else:
            raise OrientationError(f"tangle {t.name or ''} is not braid-like: strand {start}-{end}")
    return out


def oriented_form(t: SuturedTangle) -> SuturedTangle:
    """The same tangle with every crossing listed from its incoming under-strand (braid-like orientation)."""
    ins = _braid_ins(t)
    out = []
    for i, c in enumerate(t.crossings):
        out.append(tuple(c) if (i, 0) in ins else (c[2], c[3], c[0], c[1]))
    return SuturedTangle(tuple(out), t.boundary, t.name)


def is_braid_like(t: SuturedTangle) -> bool:
    return validate(t).braid_like


def twist_signs(n: int) -> list[int]:
    return [1 if n > 0 else -1] * abs(n)


def twisted_closure(t: SuturedTangle, signs: Sequence[int], name: str = "") -> PlanarDiagram:
    """Closure with a column of half twists of the given signs stacked on t0, t1.

    Signs refer to the braid-like orientation: +1 is a positive crossing with
    both strands running upward.
    """
    validate(t)
    ins = _braid_ins(t)
    crossings = list(t.crossings)
    b0, b1, t0, t1 = t.boundary
    next_id = max(t.arcs()) + 1
    cur_l, cur_r = t0, t1
    distinguished = []
    for s in signs:
        out_l, out_r = next_id, next_id + 1
        next_id += 2
        i = len(crossings)
        if s > 0:
            # slots: bottom-right in, top-right out, top-left out, bottom-left in
            crossings.append((cur_r, out_r, out_l, cur_l))
            ins.update({(i, 0), (i, 3)})
        else:
            # slots: bottom-left in, bottom-right in, top-right out, top-left out
            crossings.append((cur_l, cur_r, out_r, out_l))
            ins.update({(i, 0), (i, 1)})
        distinguished.append(i)
        cur_l, cur_r = out_l, out_r
    uf = _UF()
    for c in crossings:
        for a in c:
            uf.find(a)
    for a in t.boundary:
        uf.find(a)
    uf.union(cur_l, b0)
    uf.union(cur_r, b1)
    new, mapping, loops = _renumber(crossings, uf, extra=list(t.boundary) + [cur_l, cur_r])
    norm, signs_out = _normalize(new, ins)
    base = mapping.get(uf.find(b0))
    side = (mapping.get(uf.find(b0)), mapping.get(uf.find(b1)))
    return PlanarDiagram(
        norm,
        signs_out,
        base,
        tuple(distinguished),
        free_loops=loops,
        side_arcs=side if None not in side else None,
        name=name or f"{t.name}({sum(signs)})",
    )


def closure(t: SuturedTangle, n: int) -> PlanarDiagram:
    """T(n): |n| half twists of sign sgn(n) on top of t0, t1, then closed along the sides."""
    return twisted_closure(t, twist_signs(n), name=f"{t.name}({n})")


def closure_infinity(t: SuturedTangle) -> PlanarDiagram:
    """T(1/0): cap b0 to b1 and t0 to t1 with crossingless arcs."""
    validate(t)
    b0, b1, t0, t1 = t.boundary
    uf = _UF()
    for c in t.crossings:
        for a in c:
            uf.find(a)
    for a in t.boundary:
        uf.find(a)
    uf.union(b0, b1)
    uf.union(t0, t1)
    new, mapping, loops = _renumber(t.crossings, uf, extra=t.boundary)
    he = _halfedges(new)
    ins = _first_traversal_ins(new, he, set())
    norm, signs = _normalize(new, ins)
    return PlanarDiagram(norm, signs, mapping.get(uf.find(b0)), (), loops, None, f"{t.name}(1/0)")


def crossing_signs(d: PlanarDiagram) -> tuple[int, int]:
    return d.n_plus, d.n_minus


def c_T(t: SuturedTangle) -> int:
    """n_-(T(1/0)) - n_-(T(0)); T(1/0) carries the orientation with one arc of the tangle reversed."""
    if not validate(t).braid_like:
        raise OrientationError("c_T needs a braid-like tangle")
    return closure_infinity(t).n_minus - closure(t, 0).n_minus


def mirror(x: Union[SuturedTangle, PlanarDiagram]):
    """Exchange over and under at every crossing."""
    if isinstance(x, SuturedTangle):
        return SuturedTangle(tuple((c[1], c[2], c[3], c[0]) for c in x.crossings), x.boundary, _mirror_name(x.name))
    new = []
    for c, s in zip(x.crossings, x.signs):
        a, b, cc, d = c
        new.append((d, a, b, cc) if s > 0 else (b, cc, d, a))
    return PlanarDiagram(
        tuple(new), tuple(-s for s in x.signs), x.basepoint, x.distinguished, x.free_loops, x.side_arcs, _mirror_name(x.name)
    )


def _mirror_name(name: str) -> str:
    if name.startswith("mirror(") and name.endswith(")"):
        return name[7:-1]
    return f"mirror({name})" if name else ""


def diagram_from_pd(crossings: Iterable[Sequence[int]], basepoint: Optional[int] = None, name: str = "",
                    oriented: bool = True) -> PlanarDiagram:
    """Closed diagram from a PD code whose slot 0 is the incoming under-strand.

    Components that never pass under are oriented by first traversal.  With
    ``oriented=False`` slot 0 is only required to be an under-strand and every
    component is oriented by first traversal.
    """
    cr = [tuple(int(a) for a in c) for c in crossings]
    counts: dict[int, int] = defaultdict(int)
    for c in cr:
        for a in c:
            counts[a] += 1
    bad = sorted(a for a, n in counts.items() if n != 2)
    if bad:
        raise TangleError(f"arcs must occur exactly twice in a closed diagram; offending: {bad}", bad)
    if not cr:
        return PlanarDiagram((), (), None, (), 1, None, name)
    he = _halfedges(cr)
    ins: set[HalfEdge] = set()
    for i in range(len(cr) if oriented else 0):
        if (i, 0) in ins:
            continue
        visited, _ = _trace(cr, he, cr[i][0], (i, 0))
        for h in visited:
            if (h[0], (h[1] + 2) % 4) in ins:
                raise OrientationError(f"PD code orientation is inconsistent at crossing {h[0]}", cr[h[0]])
        ins.update(visited)
    ins |= _first_traversal_ins(cr, he, ins)
    norm, signs = _normalize(cr, ins)
    if basepoint is None:
        basepoint = min(counts)
    return PlanarDiagram(norm, signs, basepoint, (), 0, None, name)


def diagram_is_planar(d: PlanarDiagram) -> bool:
    if not d.crossings:
        return True
    he = _halfedges(d.crossings)
    vertices = {i: 4 for i in range(len(d.crossings))}
    edges = [tuple(hs) for hs in he.values()]
    genus, _ = _genus(vertices, edges)
    return genus == 0


def canonical_form(d: PlanarDiagram) -> tuple:
    """Crossing list with arcs renumbered by first appearance; signs attached."""
    mapping: dict[int, int] = {}
    out = []
    for c in d.crossings:
        for a in c:
            mapping.setdefault(a, len(mapping) + 1)
        out.append(tuple(mapping[a] for a in c))
    return tuple(out), d.signs, d.free_loops


# ---------------------------------------------------------------------------
# file formats


def tangle_from_json(obj: dict) -> SuturedTangle:
    try:
        crossings = obj["crossings"]
        boundary = obj["boundary"]
    except (KeyError, TypeError) as exc:
        raise TangleError(f"tangle file is missing field {exc}") from None
    if not isinstance(boundary, dict) or set(boundary) != set(SLOTS):
        raise TangleError(f"boundary must name exactly the slots {SLOTS}")
    try:
        t = SuturedTangle.make(crossings, boundary, obj.get("name", ""))
    except (TypeError, ValueError) as exc:
        raise TangleError(f"could not read tangle: {exc}") from None
    validate(t)
    return t


def load_tangle(path: Union[str, Path]) -> SuturedTangle:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise TangleError(f"{path}: not valid JSON ({exc})") from None
    return tangle_from_json(obj)


def save_tangle(t: SuturedTangle, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(t.to_json(), indent=1) + "\n")


def load_input(path: Union[str, Path]):
    """A tangle file (with "boundary") or a closed PD file (without)."""
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise TangleError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(obj, dict):
        raise TangleError(f"{path}: expected a JSON object")
    if "boundary" in obj:
        return tangle_from_json(obj)
    if "crossings" not in obj:
        raise TangleError(f"{path}: missing field 'crossings'")
    return diagram_from_pd(obj["crossings"], obj.get("basepoint"), obj.get("name", ""))
