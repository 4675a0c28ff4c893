"""The inverse system over a window of twist levels and the invariant kappa.

For a braid-like tangle with trivial T(1/0), the groups A_i = Kh(T(i)) and
the resolution maps f_i: A_{i+1} -> A_i form an inverse system.  Over a
finite window [N, M] the eventual image is the image of the long composite
A_M -> A_N; once the window is wide enough it no longer changes, and its
u-graded dimensions are kappa.  The second grading of kappa is pinned down
by putting the diagonal on which A_i keeps growing at 2 delta = +1.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import f2la
from .diagram import SuturedTangle, closure_infinity, mirror, validate
from .f2la import BitMatrix
from .khcomplex import (
    DEFAULT_CAP,
    GradedVectorSpace,
    Reduction,
    ResourceCapError,
    grid_tsv,
    khovanov,
    reduce_with_transfer,
)
from .scan import twist_tower
from .skein import ChainMap, induced_on_homology


class KappaError(ValueError):
    """The tangle does not define kappa (T(1/0) is not trivial, or it is not braid-like)."""


class UnstableTopError(RuntimeError):
    pass


class UnstabilizedError(RuntimeError):
    """Window policy ran into the crossing cap before the eventual image settled."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


@dataclass
class InverseWindow:
    tangle: SuturedTangle
    range: tuple[int, int]
    spaces: dict[int, GradedVectorSpace]
    composite: dict[int, BitMatrix]  # per u, A_M -> A_N
    step_ranks: dict[int, dict[int, int]]  # i -> per-u rank of f_i
    steps: dict[int, dict[int, BitMatrix]] = field(default_factory=dict, repr=False)
    reductions: dict[int, Reduction] = field(default_factory=dict, repr=False)

    @property
    def low(self) -> int:
        return self.range[0]

    @property
    def high(self) -> int:
        return self.range[1]

    def dims(self) -> dict[int, int]:
        return {i: v.total for i, v in sorted(self.spaces.items())}

    def composite_between(self, n: int, m: int) -> dict[int, BitMatrix]:
        """Product of the induced step maps, A_m -> A_n."""
        out = None
        for i in range(m - 1, n - 1, -1):
            step = self.steps[i]
            if out is None:
                out = dict(step)
            else:
                out = {u: step[u] @ out[u] for u in out if u in step}
        return out or {}

    def sub(self, n: int, m: int) -> "InverseWindow":
        if not (self.low <= n < m <= self.high):
            raise ValueError("sub-window must lie inside the window")
        return InverseWindow(
            self.tangle,
            (n, m),
            {i: self.spaces[i] for i in range(n, m + 1)},
            self.composite_between(n, m),
            {i: self.step_ranks[i] for i in range(n, m)},
            {i: self.steps[i] for i in range(n, m)},
            {i: self.reductions[i] for i in range(n, m + 1)},
        )


@dataclass
class KappaInvariant:
    table: dict[tuple[int, int], int]  # (u, 2 delta) -> dim
    stabilization: dict = field(default_factory=dict)

    def __post_init__(self):
        self.table = {k: v for k, v in sorted(self.table.items()) if v}
        assert all(td % 2 for _, td in self.table), "2 delta must be odd"

    @property
    def total_dim(self) -> int:
        return sum(self.table.values())

    def by_u(self) -> dict[int, int]:
        out: dict[int, int] = defaultdict(int)
        for (u, _), n in self.table.items():
            out[u] += n
        return dict(sorted(out.items()))

    def is_zero(self) -> bool:
        return not self.table

    def to_tsv(self) -> str:
        return grid_tsv(self.table, "2d")

    def to_json(self) -> dict:
        return {
            "entries": [{"u": u, "two_delta": td, "dim": n} for (u, td), n in sorted(self.table.items())],
            "total": self.total_dim,
            "stabilization": self.stabilization,
        }

    def __eq__(self, other):
        return isinstance(other, KappaInvariant) and self.table == other.table


def check_admissible(t: SuturedTangle) -> None:
    rep = validate(t)
    if not rep.braid_like:
        raise KappaError(f"tangle {t.name} is not braid-like")
    if rep.closed_components:
        raise KappaError(f"tangle {t.name} has {rep.closed_components} closed components")
    dim = khovanov(closure_infinity(t)).total
    if dim != 1:
        raise KappaError(f"T(1/0) of {t.name} has reduced homology of dimension {dim}, not 1")


def _check_cap(t: SuturedTangle, n: int, m: int, cap: int) -> None:
    worst = len(t.crossings) + max(abs(n), abs(m))
    if worst > cap:
        raise ResourceCapError(f"window [{n}, {m}] needs closures with {worst} crossings, cap is {cap}")


def compute_window(t: SuturedTangle, n: int, m: int, cap: int = DEFAULT_CAP, admissible: bool = True) -> InverseWindow:
    """Homology of T(n..m), the step maps on homology, and the long composite."""
    if n >= m:
        raise ValueError("window needs n < m")
    if admissible:
        check_admissible(t)
    _check_cap(t, n, m, cap)
    tw = twist_tower(t, n, m)
    reds = {i: reduce_with_transfer(lv.complex) for i, lv in tw.levels.items()}
    spaces = {i: r.space() for i, r in reds.items()}
    steps, step_ranks = {}, {}
    chain = None
    for i in range(m - 1, n - 1, -1):
        phi = ChainMap(tw.levels[i + 1].complex, tw.levels[i].complex, tw.maps[i], Fraction(-1, 2))
        steps[i] = induced_on_homology(phi, reds[i + 1], reds[i])
        step_ranks[i] = {u: f2la.rank(b) for u, b in steps[i].items()}
        chain = phi if chain is None else chain.then(phi)
    chain.check()
    composite = induced_on_homology(
        ChainMap(tw.levels[m].complex, tw.levels[n].complex, chain.blocks, chain.q_shift), reds[m], reds[n]
    )
    w = InverseWindow(t, (n, m), spaces, composite, step_ranks, steps, reds)
    # the chain-level composite and the product of the induced steps must agree in rank
    prod = w.composite_between(n, m)
    for u, b in composite.items():
        if u in prod:
            assert f2la.rank(b) == f2la.rank(prod[u]), f"composite rank mismatch at u={u}"
    return w


def _ranks(blocks: dict[int, BitMatrix]) -> dict[int, int]:
    return {u: r for u, r in ((u, f2la.rank(b)) for u, b in sorted(blocks.items())) if r}


@dataclass
class EventualImage:
    ranks: dict[int, int]
    stable: bool
    notes: list


def eventual_image(w: InverseWindow) -> EventualImage:
    """Per-u rank of A_M -> A_N, and whether the window looks saturated."""
    n, m = w.range
    ranks = _ranks(w.composite)
    notes = []
    stable = True
    if m - n >= 2:
        for a, b in ((n, m - 1), (n + 1, m)):
            r = _ranks(w.composite_between(a, b))
            if r != ranks:
                stable = False
                notes.append(f"sub-window [{a}, {b}] has ranks {r}")
    top = w.step_ranks[m - 1]
    if sum(top.values()) != w.spaces[m - 1].total:
        stable = False
        notes.append(f"f_{m - 1} is not surjective")
    bottom = w.step_ranks[n]
    if sum(bottom.values()) != w.spaces[n + 1].total:
        stable = False
        notes.append(f"f_{n} is not injective")
    return EventualImage(ranks, stable, notes)


def growth_cell(w: InverseWindow, i: Optional[int] = None) -> tuple[int, Fraction]:
    """(u, q) of the generator gained from A_{i-1} to A_i, with q matched across the map's shift."""
    i = w.high if i is None else i
    a, b = w.spaces[i], w.spaces[i - 1]
    diff = defaultdict(int)
    for (u, q), k in a.items():
        diff[(u, q)] += k
    for (u, q), k in b.items():
        diff[(u, q + Fraction(1, 2))] -= k
    cells = {c: k for c, k in diff.items() if k}
    if len(cells) != 1 or next(iter(cells.values())) != 1:
        raise UnstableTopError(f"A_{i} is not A_{i - 1} plus one generator: differences {sorted(cells.items())}")
    return next(iter(cells))


def absolute_delta_lift(w: InverseWindow) -> dict[tuple[int, int], int]:
    """kappa as a (u, 2 delta) table, with the growing diagonal of A_M placed at 2 delta = +1."""
    n, m = w.range
    table: dict[tuple[int, int], int] = defaultdict(int)
    red = w.reductions[m]
    cols_by_uq: dict[tuple[int, Fraction], list[int]] = defaultdict(list)
    for u, gens in red.reduced.items():
        for j, g in enumerate(gens):
            cols_by_uq[(u, g.q)].append(j)
    pieces = {}
    for (u, q), cols in cols_by_uq.items():
        r = f2la.rank(w.composite[u].select_cols(cols)) if u in w.composite else 0
        if r:
            pieces[(u, q)] = r
    if not pieces:
        return {}
    gu, gq = growth_cell(w)
    d_star = gu - gq
    for (u, q), r in pieces.items():
        two = 2 * ((u - q) - d_star) + 1
        assert two.denominator == 1
        table[(u, int(two))] += r
    return dict(table)


@dataclass
class WindowPolicy:
    start: int = 4
    step: int = 2
    agree: int = 3
    cap: int = DEFAULT_CAP
    window: Optional[tuple[int, int]] = None  # fixed window, no widening


def _kappa_on(w: InverseWindow) -> tuple[EventualImage, dict]:
    ev = eventual_image(w)
    return ev, absolute_delta_lift(w) if ev.ranks else {}


def compute_kappa(t: SuturedTangle, policy: Optional[WindowPolicy] = None) -> KappaInvariant:
    """Widen the window until the last few windows give the same table and the ends behave."""
    policy = policy or WindowPolicy()
    check_admissible(t)
    if policy.window is not None:
        n, m = policy.window
        w = compute_window(t, n, m, policy.cap, admissible=False)
        try:
            ev, table = _kappa_on(w)
        except UnstableTopError as e:
            ev, table = eventual_image(w), None
            ev.stable = False
            ev.notes.append(str(e))
        cert = {"window": [n, m], "agreeing_windows": 1, "end_conditions": ev.stable, "notes": ev.notes,
                "eventual_ranks": ev.ranks}
        if not ev.stable:
            raise UnstabilizedError(f"window [{n}, {m}] is not stable: {'; '.join(ev.notes)}",
                                    KappaInvariant(table or {}, cert))
        return KappaInvariant(table, cert)
    k = policy.agree - 1
    last = None
    while True:
        half = policy.start + policy.step * k
        n, m = -half, half
        try:
            _check_cap(t, n, m, policy.cap)
        except ResourceCapError as e:
            raise UnstabilizedError(f"no stable window below the cap: {e}", last) from None
        w = compute_window(t, n, m, policy.cap, admissible=False)
        results = []
        for j in range(policy.agree):
            h = half - policy.step * j
            sw = w if j == 0 else w.sub(-h, h)
            try:
                results.append(_kappa_on(sw))
            except UnstableTopError as e:
                results.append((EventualImage({}, False, [str(e)]), None))
        ev, table = results[0]
        cert = {
            "window": [n, m],
            "agreeing_windows": sum(1 for _, tb in results if tb == table),
            "compared": [[-(half - policy.step * j), half - policy.step * j] for j in range(policy.agree)],
            "end_conditions": ev.stable,
            "notes": ev.notes,
        }
        last = KappaInvariant(table or {}, cert)
        if ev.stable and table is not None and all(tb == table for _, tb in results):
            return last
        k += 1


def mirror_reflect(k: KappaInvariant) -> KappaInvariant:
    return KappaInvariant({(-u, -td): n for (u, td), n in k.table.items()}, dict(k.stabilization))


@dataclass
class AmphicheiralityVerdict:
    verdict: str  # "OBSTRUCTED" or "SILENT"
    kappa: KappaInvariant
    reflected: KappaInvariant
    differing_u: list


def amphicheirality_check(t: SuturedTangle, partner: Optional[SuturedTangle] = None,
                          policy: Optional[WindowPolicy] = None) -> AmphicheiralityVerdict:
    """Compare kappa(t) with the reflection of kappa of the mirror (or of ``partner``) as u-graded spaces.

    By the mirror rule the reflection of kappa(t) is kappa of the mirrored
    tangle; when the strong inversion is unique, an amphicheiral knot would
    have kappa(t) equal to it.
    """
    k = compute_kappa(t, policy)
    other = compute_kappa(partner, policy) if partner is not None else k
    r = mirror_reflect(other)
    a, b = k.by_u(), r.by_u()
    diff = sorted(u for u in set(a) | set(b) if a.get(u, 0) != b.get(u, 0))
    return AmphicheiralityVerdict("OBSTRUCTED" if diff else "SILENT", k, r, diff)


V_PATTERN = (0, 2, 3, 5)


def structure_report(k: KappaInvariant) -> dict:
    """Total dimension mod 4 and a greedy tiling of each diagonal by translates of V."""
    rows: dict[int, dict[int, int]] = defaultdict(dict)
    for (u, td), n in k.table.items():
        rows[td][u] = n
    tiles = []
    ok = True
    for td, row in sorted(rows.items()):
        rest = dict(row)
        while rest:
            u0 = min(rest)
            if not all(rest.get(u0 + s, 0) > 0 for s in V_PATTERN):
                ok = False
                break
            for s in V_PATTERN:
                rest[u0 + s] -= 1
                if not rest[u0 + s]:
                    del rest[u0 + s]
            tiles.append((u0, td))
    return {"total": k.total_dim, "mod4": k.total_dim % 4, "tiled": ok, "tiles": tiles}


@dataclass
class LimitProfile:
    levels: dict[int, dict[int, int]]  # level i -> per-u rank of A_M -> A_i
    certified: dict[int, int]          # per-u dimensions of the inverse limit
    certified_below: int               # certified for u below this bound


def limit_profile(w: InverseWindow) -> LimitProfile:
    """Stable images inside each A_i, and the part of the inverse limit the window certifies.

    With f_{M-1} surjective the stable image at level M-1 is all of A_{M-1};
    every grading below the one where A_M gains its new generator is already
    saturated, so those dimensions are the inverse limit's.
    """
    n, m = w.range
    levels = {m: dict(w.spaces[m].by_u())}
    for i in range(m - 1, n - 1, -1):
        levels[i] = _ranks(w.composite_between(i, m))
    ev = eventual_image(w)
    if not ev.stable:
        raise UnstabilizedError("profile needs a stable window: " + "; ".join(ev.notes))
    gu, _ = growth_cell(w)
    certified = {u: d for u, d in levels[m - 1].items() if u < gu}
    return LimitProfile(levels, certified, gu)


def kappa_of_mirror(t: SuturedTangle, policy: Optional[WindowPolicy] = None) -> KappaInvariant:
    return compute_kappa(mirror(t), policy)
