"""The acceptance checks, runnable from the CLI and from pytest.

Each check returns a :class:`CheckResult`.  Hard checks decide the exit
status of ``khtangle verify``; soft checks are diagnostics only.  Mismatch
details name the first differing cell so a corrupted data file is easy to
locate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import dataset, f2la
from .diagram import closure, closure_infinity, mirror
from .f2la import BitMatrix
from .khcomplex import (
    GradedComplex,
    format_laurent,
    homology,
    homology_by_rank,
    jones_polynomial,
    khovanov,
    reduce_with_transfer,
)
from .limit import (
    KappaInvariant,
    WindowPolicy,
    compute_kappa,
    compute_window,
    limit_profile,
    mirror_reflect,
    structure_report,
)
from .naive import tensor_with_v, unreduced_homology
from .scan import twist_tower
from .skein import ChainMap, induced_on_homology, triangle_check

EXTENDED_CAP = 48
# dims of A_1..A_9 as listed by the acceptance criterion; the zero steps 3->4->5
# contradict the criterion's own |step| = 1 clause, so this check cannot pass
WINDOW_TREFOIL_DIMS = {1: 7, 2: 6, 3: 5, 4: 5, 5: 5, 6: 6, 7: 7, 8: 8, 9: 9}
# what the tower actually has; frozen by the test suite
WINDOW_TREFOIL_COMPUTED = {1: 7, 2: 6, 3: 5, 4: 6, 5: 5, 6: 6, 7: 7, 8: 8, 9: 9}


@dataclass
class CheckResult:
    number: int
    title: str
    ok: bool
    detail: str
    hard: bool = True

    def line(self) -> str:
        tag = "PASS" if self.ok else ("FAIL" if self.hard else "WARN")
        return f"[{tag}] {self.number:>2} {self.title}: {self.detail}"


def first_mismatch(got: dict, want: dict) -> Optional[str]:
    """Describe the first cell (in sorted order) where two tables differ."""
    for key in sorted(set(got) | set(want)):
        a, b = got.get(key, 0), want.get(key, 0)
        if a != b:
            return f"cell {key}: got {a}, expected {b}"
    return None


class Context:
    """Shared state for one run: data location, seed, and cached kappa values."""

    def __init__(self, root=None, seed: int = 0, cap: int = EXTENDED_CAP):
        self.root = root
        self.seed = seed
        self.policy = WindowPolicy(cap=cap)
        self._kappa: dict[str, KappaInvariant] = {}

    def tangle(self, name):
        return dataset.load(name, self.root)

    def golden(self, name) -> KappaInvariant:
        return KappaInvariant(dataset.read_grid(dataset.golden_path(name, self.root)))

    def kappa(self, name: str) -> KappaInvariant:
        if name not in self._kappa:
            if name.startswith("mirror:"):
                t = mirror(self.tangle(name[7:]))
            else:
                t = self.tangle(name)
            self._kappa[name] = compute_kappa(t, self.policy)
        return self._kappa[name]

    def computed(self) -> dict[str, KappaInvariant]:
        return dict(self._kappa)


def _kappa_against(ctx: Context, name: str, golden: str, reflect: bool = False) -> tuple[bool, str]:
    k = ctx.kappa(name)
    want = ctx.golden(golden)
    if reflect:
        want = mirror_reflect(want)
    bad = first_mismatch(k.table, want.table)
    if bad:
        return False, f"{name}: {bad} (keys are (u, 2delta))"
    return True, f"{name}: {k.total_dim} generators, window {k.stabilization.get('window')}"


# ---------------------------------------------------------------------------


def check_kh_anchor(ctx: Context) -> CheckResult:
    got = dict(khovanov(closure(ctx.tangle("trefoil"), 1)).items())
    want = {(u, q): n for u, q, n in dataset.read_rows(dataset.golden_path("kh_10_124", ctx.root))}
    bad = first_mismatch(got, want)
    return CheckResult(1, "Kh anchor", bad is None, bad or f"T(1) matches the 10_124 table ({sum(got.values())} generators)")


def check_jones(ctx: Context) -> CheckResult:
    v = khovanov(closure(ctx.tangle("trefoil"), 1))
    got = jones_polynomial(v)
    want = {-4: 1, -6: 1, -10: -1}
    ok = got == want
    return CheckResult(2, "Jones anchor", ok, format_laurent(got))


def check_unknot(ctx: Context) -> CheckResult:
    t = ctx.tangle("unknot")
    for n, m in ((0, 2), (-2, 3)):
        w = compute_window(t, n, m)
        nonzero = [u for u, b in w.composite.items() if not b.is_zero()]
        if nonzero:
            return CheckResult(3, "Unknot", False, f"composite over [{n}, {m}] is nonzero at u = {nonzero}")
    k = ctx.kappa("unknot")
    if not k.is_zero():
        return CheckResult(3, "Unknot", False, f"kappa = {k.table}")
    return CheckResult(3, "Unknot", True, "composites over [0,2] and [-2,3] vanish; kappa = 0")


def check_torus_links(ctx: Context) -> CheckResult:
    t = ctx.tangle("unknot")
    dims = []
    for n in range(-5, 6):
        d = closure(t, n)
        red = khovanov(d)
        naive = unreduced_homology(d)
        bad = first_mismatch(tensor_with_v(dict(red.items())), naive)
        if bad:
            return CheckResult(4, "Torus-link closures", False, f"T({n}): {bad} against the naive cube")
        dims.append(red.total)
    return CheckResult(4, "Torus-link closures", True, f"n=-5..5 reduced dims {dims}, naive cube agrees")


def check_trefoil_kappa(ctx: Context) -> CheckResult:
    ok, detail = _kappa_against(ctx, "trefoil", "kappa_trefoil")
    k = ctx.kappa("trefoil")
    if ok:
        n, m = k.stabilization["window"]
        need = len(ctx.tangle("trefoil").crossings) + max(abs(n), abs(m))
        if need > 24:
            ok, detail = False, f"stabilized at {need} crossings, above the default cap 24"
        else:
            detail += f", largest closure {need} crossings"
    return CheckResult(5, "Trefoil kappa", ok, detail)


def check_window_dims(ctx: Context) -> CheckResult:
    w = compute_window(ctx.tangle("trefoil"), 1, 9)
    got = w.dims()
    steps = [got[i + 1] - got[i] for i in range(1, 9)]
    problems = []
    bad = first_mismatch(got, WINDOW_TREFOIL_DIMS)
    if bad:
        problems.append(bad)
    if any(abs(s) != 1 for s in steps):
        problems.append(f"steps {steps} are not all +-1")
    listed = list(WINDOW_TREFOIL_DIMS.values())
    if any(abs(b - a) != 1 for a, b in zip(listed, listed[1:])):
        problems.append("the listed dims themselves have a zero step, which an exact triangle with a one-dimensional third term forbids")
    detail = f"A1..A9 = {list(got.values())}"
    return CheckResult(6, "Trefoil window dims", not problems, "; ".join(problems + [detail]))


def check_profile(ctx: Context) -> CheckResult:
    n, m = ctx.kappa("trefoil").stabilization["window"]
    p = limit_profile(compute_window(ctx.tangle("trefoil"), n, m, ctx.policy.cap))
    want = {u: d for u, d in dataset.read_rows(dataset.golden_path("profile_trefoil", ctx.root)) if d}
    got = {u: d for u, d in p.certified.items() if d}
    bad = first_mismatch(got, {u: d for u, d in want.items() if u < p.certified_below})
    if bad is None and p.certified_below <= max(want):
        bad = f"window only certifies u < {p.certified_below}"
    return CheckResult(7, "Kh<- profile", bad is None, bad or f"certified u < {p.certified_below}: {p.certified}")


def check_mirror(ctx: Context) -> CheckResult:
    ok, detail = _kappa_against(ctx, "mirror:trefoil", "kappa_trefoil", reflect=True)
    return CheckResult(8, "Mirror", ok, detail)


def check_figure_eight(ctx: Context) -> CheckResult:
    for name in ("figure8-h1", "figure8-h2"):
        dim = khovanov(closure_infinity(ctx.tangle(name))).total
        if dim != 1:
            return CheckResult(9, "Figure-eight", False, f"{name}: T(1/0) has dimension {dim}")
    ok, detail = _kappa_against(ctx, "figure8-h1", "kappa_figure8_h1")
    if ok:
        ok2, d2 = _kappa_against(ctx, "figure8-h2", "kappa_figure8_h1", reflect=True)
        ok, detail = ok2, detail + "; " + d2
    return CheckResult(9, "Figure-eight", ok, detail)


def check_torus_knots(ctx: Context) -> CheckResult:
    parts = []
    for name, golden in (("torus-5-1", "kappa_5_1"), ("torus-8-19", "kappa_8_19")):
        ok, detail = _kappa_against(ctx, name, golden)
        if not ok:
            return CheckResult(10, "5_1 and 8_19", False, detail)
        k = ctx.kappa(name)
        diagonals = {td for _, td in k.table}
        if len(diagonals) != 1:
            return CheckResult(10, "5_1 and 8_19", False, f"{name}: kappa occupies diagonals {sorted(diagonals)}")
        parts.append(f"{name} {list(k.by_u().values())} at u={min(k.by_u())}..{max(k.by_u())}")
    return CheckResult(10, "5_1 and 8_19", True, "; ".join(parts))


# property suites ------------------------------------------------------------


def _permuted(c: GradedComplex, rng: np.random.Generator) -> GradedComplex:
    perm = {u: rng.permutation(len(g)) for u, g in c.gens.items()}
    gens = {u: [g[i] for i in perm[u]] for u, g in c.gens.items()}
    d = {}
    for u, m in c.d.items():
        d[u] = m.select_rows(list(perm[u + 1])).select_cols(list(perm[u]))
    return GradedComplex(gens, d, c.name)


def property_suites(ctx: Context) -> list[str]:
    """Run the always-on property checks; return a list of failure messages."""
    rng = np.random.default_rng(ctx.seed)
    failures = []

    for _ in range(20):
        r, c = rng.integers(1, 40, size=2)
        m = BitMatrix.random(int(r), int(c), rng)
        k = f2la.kernel_basis(m).dim
        rk = f2la.rank(m)
        if rk + k != c:
            failures.append(f"rank-nullity fails on a {r}x{c} matrix")
        if f2la.rank(m.transpose()) != rk:
            failures.append(f"transpose rank fails on a {r}x{c} matrix")

    for name in dataset.TANGLES:
        t = ctx.tangle(name)
        tw = twist_tower(t, -2, 2)
        B = khovanov(closure_infinity(t))
        reds = {}
        for i, lv in tw.levels.items():
            try:
                lv.complex.check()
            except AssertionError as e:
                failures.append(f"{name} T({i}): {e}")
            reds[i] = reduce_with_transfer(lv.complex)
        for i in range(-2, 2):
            phi = ChainMap(tw.levels[i + 1].complex, tw.levels[i].complex, tw.maps[i], Fraction(-1, 2))
            try:
                phi.check()
            except AssertionError as e:
                failures.append(f"{name} f_{i}: {e}")
            step = induced_on_homology(phi, reds[i + 1], reds[i])
            rep = triangle_check(t, i, step, reds[i + 1].space(), reds[i].space(), B)
            if not rep.ok:
                failures.append(f"{name} exactness at level {i}: {rep.failures[0]}")
        c = tw.levels[1].complex
        base = homology(c)
        if homology_by_rank(_permuted(c, rng)) != base or homology(_permuted(c, rng)) != base:
            failures.append(f"{name}: homology changes under a reordering of generators")

    for key, k in ctx.computed().items():
        cert = k.stabilization
        if not cert.get("end_conditions") or cert.get("agreeing_windows") != len(cert.get("compared", [])):
            failures.append(f"{key}: stabilization certificate {cert}")
        if mirror_reflect(mirror_reflect(k)) != k:
            failures.append(f"{key}: reflect o reflect is not the identity")
    return failures


def check_properties(ctx: Context) -> CheckResult:
    failures = property_suites(ctx)
    if failures:
        return CheckResult(11, "Property suites", False, failures[0] + (f" (+{len(failures) - 1} more)" if len(failures) > 1 else ""))
    return CheckResult(11, "Property suites", True, f"all passed (seed {ctx.seed}, {len(ctx.computed())} kappa certificates)")


def check_soft(ctx: Context) -> CheckResult:
    notes = []
    ok = True
    if not ctx.computed():
        for name in dataset.TANGLES:
            try:
                ctx.kappa(name)
            except Exception as e:
                ok = False
                notes.append(f"{name}: no kappa ({type(e).__name__})")
    for key, k in sorted(ctx.computed().items()):
        if k.is_zero():
            continue
        rep = structure_report(k)
        good = rep["mod4"] == 0 and rep["tiled"]
        ok &= good
        notes.append(f"{key} total {rep['total']} mod4 {rep['mod4']} tiled {rep['tiled']}")
    return CheckResult(12, "Soft diagnostics", ok, "; ".join(notes), hard=False)


HARD: list[tuple[str, Callable[[Context], CheckResult]]] = [
    ("Kh anchor", check_kh_anchor),
    ("Jones anchor", check_jones),
    ("Unknot", check_unknot),
    ("Torus-link closures", check_torus_links),
    ("Trefoil kappa", check_trefoil_kappa),
    ("Trefoil window dims", check_window_dims),
    ("Kh<- profile", check_profile),
    ("Mirror", check_mirror),
    ("Figure-eight", check_figure_eight),
    ("5_1 and 8_19", check_torus_knots),
    ("Property suites", check_properties),
]


def run_check(number: int, ctx: Context) -> CheckResult:
    """Run hard check ``number`` (1-based); an exception counts as a failure of that check."""
    title, fn = HARD[number - 1]
    try:
        return fn(ctx)
    except Exception as e:
        return CheckResult(number, title, False, f"{type(e).__name__}: {e}")


def run(ctx: Optional[Context] = None, soft_only: bool = False) -> list[CheckResult]:
    ctx = ctx or Context()
    results = []
    if not soft_only:
        results = [run_check(n, ctx) for n in range(1, len(HARD) + 1)]
    results.append(check_soft(ctx))
    return results
