from fractions import Fraction

import numpy as np
import pytest

from khtangle import dataset, f2la
from khtangle.diagram import c_T, closure_infinity
from khtangle.khcomplex import GradedComplex, khovanov, reduce_with_transfer
from khtangle.limit import compute_window
from khtangle.scan import twist_tower
from khtangle.skein import (
    ChainMap,
    MismatchError,
    dump_blocks,
    induced_on_homology,
    rank_by_u,
    triangle_check,
    twist_quotient_map,
)

HALF = Fraction(1, 2)


@pytest.fixture(scope="module")
def unknot_window(unknot):
    return compute_window(unknot, 0, 2)


def _generator_q(w, level, u=0):
    return [g.q for g in w.reductions[level].reduced[u]]


def test_f1_hits_the_upper_diagonal_generator(unknot_window):
    # A_2 = F at (0, 0); A_1 = F at q = 1/2 and q = -1/2.  f_1 lands in delta = 1/2, i.e. q = -1/2.
    w = unknot_window
    f1 = w.steps[1][0].to_dense()
    qs = _generator_q(w, 1)
    assert _generator_q(w, 2) == [0]
    (hit,) = [qs[i] for i in range(len(qs)) if f1[i, 0]]
    assert hit == -HALF


def test_f0_kills_the_image_of_f1(unknot_window):
    w = unknot_window
    f0 = w.steps[0][0].to_dense()
    qs = _generator_q(w, 1)
    killed = [qs[j] for j in range(len(qs)) if not f0[:, j].any()]
    assert killed == [-HALF]
    assert f2la.rank(w.steps[0][0]) == 1


def test_unknot_composite_vanishes(unknot_window):
    assert all(m.is_zero() for m in unknot_window.composite.values())


@pytest.mark.parametrize("method", ["cube", "scan"])
def test_quotient_maps_are_chain_maps(unknot, method):
    phi = twist_quotient_map(unknot, 2, -1, method=method)
    phi.check()
    assert phi.q_shift == Fraction(-3, 2)


def test_cube_and_scan_routes_agree_on_homology(tangles):
    t = tangles["torus-8-19"]
    for m, n in ((1, 0), (0, -1)):
        ranks = []
        for method in ("cube", "scan"):
            phi = twist_quotient_map(t, m, n, method=method)
            ind = induced_on_homology(phi, reduce_with_transfer(phi.source), reduce_with_transfer(phi.target))
            ranks.append({u: r for u, r in rank_by_u(ind).items() if r})
        assert ranks[0] == ranks[1]


def test_composite_equals_product_of_steps(unknot):
    whole = twist_quotient_map(unknot, 3, 0, method="cube")
    steps = [twist_quotient_map(unknot, i + 1, i, method="cube") for i in (2, 1, 0)]
    # the single-step maps are built on their own diagrams; compare induced ranks
    r = lambda phi: rank_by_u(induced_on_homology(phi, reduce_with_transfer(phi.source), reduce_with_transfer(phi.target)))
    assert all(v == 0 for v in r(whole).values())
    assert [sum(r(s).values()) for s in steps] == [1, 1, 1]


def test_window_composite_matches_scan_composite(trefoil):
    w = compute_window(trefoil, -2, 3)
    phi = twist_quotient_map(trefoil, 3, -2, method="scan")
    ind = induced_on_homology(phi, reduce_with_transfer(phi.source), reduce_with_transfer(phi.target))
    assert rank_by_u(ind) == {u: f2la.rank(m) for u, m in sorted(w.composite.items())}


def test_broken_map_is_rejected(trefoil):
    tw = twist_tower(trefoil, 0, 1)
    S, T = tw.levels[1].complex, tw.levels[0].complex
    blocks = dict(tw.maps[0])
    # an entry between generators whose q gradings are not related by the shift
    u, i, j = next(
        (u, i, j)
        for u in S.us
        for j, g in enumerate(S.gens[u])
        for i, h in enumerate(T.gens.get(u, []))
        if h.q != g.q - HALF
    )
    dense = blocks[u].to_dense()
    dense[i, j] ^= 1
    blocks[u] = f2la.BitMatrix.from_dense(dense)
    with pytest.raises(AssertionError, match="q-homogeneous"):
        ChainMap(S, T, blocks, -HALF).check()


def test_reductions_must_match_the_map(trefoil):
    tw = twist_tower(trefoil, 0, 1)
    phi = ChainMap(tw.levels[1].complex, tw.levels[0].complex, tw.maps[0], -HALF)
    r = reduce_with_transfer(tw.levels[0].complex)
    with pytest.raises(MismatchError):
        induced_on_homology(phi, r, r)


@pytest.mark.parametrize("name", dataset.TANGLES)
def test_exact_triangle_on_every_level(tangles, name):
    t = tangles[name]
    w = compute_window(t, -4, 5)
    B = khovanov(closure_infinity(t))
    for i in range(-4, 5):
        rep = triangle_check(t, i, w.steps[i], w.spaces[i + 1], w.spaces[i], B)
        assert rep.ok, rep.failures
        assert sum(rep.kernel.values()) + sum(rep.cokernel.values()) == 1


def test_triangle_check_standalone(trefoil):
    rep = triangle_check(trefoil, 2)
    assert rep.ok
    assert (rep.dim_upper, rep.dim_lower) == (5, 6)
    assert rep.shift == c_T(trefoil) + 3


def test_induced_ranks_do_not_depend_on_generator_order(trefoil):
    tw = twist_tower(trefoil, 0, 1)
    S, T = tw.levels[1].complex, tw.levels[0].complex
    phi = ChainMap(S, T, tw.maps[0], -HALF)
    base = rank_by_u(induced_on_homology(phi, reduce_with_transfer(S), reduce_with_transfer(T)))
    rng = np.random.default_rng(7)

    def shuffle(c):
        perm = {u: list(rng.permutation(len(g))) for u, g in c.gens.items()}
        out = GradedComplex(
            {u: [g[i] for i in perm[u]] for u, g in c.gens.items()},
            {u: m.select_rows(perm[u + 1]).select_cols(perm[u]) for u, m in c.d.items()},
        )
        return out, perm

    S2, ps = shuffle(S)
    T2, pt = shuffle(T)
    blocks = {u: m.select_rows(pt[u]).select_cols(ps[u]) for u, m in tw.maps[0].items() if u in ps and u in pt}
    phi2 = ChainMap(S2, T2, blocks, -HALF)
    phi2.check()
    got = rank_by_u(induced_on_homology(phi2, reduce_with_transfer(S2), reduce_with_transfer(T2)))
    assert {u: r for u, r in got.items() if r} == {u: r for u, r in base.items() if r}


def test_dump_blocks_format(unknot_window):
    text = dump_blocks(unknot_window.steps[0])
    assert text.splitlines()[0].startswith("u\t")
    assert "rank\t1" in text
