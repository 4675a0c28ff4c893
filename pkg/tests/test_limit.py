import pytest
from hypothesis import given, strategies as st

from khtangle import dataset
from khtangle.diagram import SuturedTangle, mirror
from khtangle.limit import (
    KappaError,
    KappaInvariant,
    UnstabilizedError,
    WindowPolicy,
    amphicheirality_check,
    compute_kappa,
    compute_window,
    eventual_image,
    growth_cell,
    kappa_of_mirror,
    limit_profile,
    mirror_reflect,
    structure_report,
)
from khtangle.tangles import montesinos_tangle

GOLDEN = {
    "trefoil": "kappa_trefoil",
    "figure8-h1": "kappa_figure8_h1",
    "torus-5-1": "kappa_5_1",
    "torus-8-19": "kappa_8_19",
}


def golden(name):
    return KappaInvariant(dataset.read_grid(dataset.golden_path(name)))


@pytest.fixture(scope="module")
def kappas(tangles):
    return {name: compute_kappa(t) for name, t in tangles.items()}


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_kappa_matches_reference_tables(kappas, name):
    assert kappas[name] == golden(GOLDEN[name])


def test_trefoil_table(kappas):
    k = kappas["trefoil"]
    assert k.table == {(-5, 1): 1, (-3, 1): 1, (-2, 1): 1, (0, 1): 1}


def test_unknot_kappa_is_zero(kappas):
    assert kappas["unknot"].is_zero()
    assert kappas["unknot"].stabilization["end_conditions"]


def test_figure_eight_partner_is_reflected(kappas):
    assert kappas["figure8-h2"] == mirror_reflect(kappas["figure8-h1"])


@pytest.mark.parametrize("name", ["trefoil", "torus-8-19"])
def test_mirror_rule(tangles, kappas, name):
    assert kappa_of_mirror(tangles[name]) == mirror_reflect(kappas[name])


def test_certificates(kappas):
    for k in kappas.values():
        cert = k.stabilization
        assert cert["end_conditions"]
        assert cert["agreeing_windows"] == len(cert["compared"]) == 3


@pytest.mark.parametrize("window", [(-10, 10), (-12, 12), (-9, 11), (-11, 8)])
def test_window_independence(trefoil, kappas, window):
    k = compute_kappa(trefoil, WindowPolicy(window=window, cap=30))
    assert k == kappas["trefoil"]


def test_dims_change_by_one(trefoil):
    w = compute_window(trefoil, -10, 10)
    dims = w.dims()
    assert all(abs(dims[i + 1] - dims[i]) == 1 for i in range(-10, 10))
    # eventually injective below, surjective above
    assert all(sum(w.step_ranks[i].values()) == dims[i + 1] for i in range(-10, -3))
    assert all(sum(w.step_ranks[i].values()) == dims[i] for i in range(5, 10))


def test_growth_cell_and_profile(trefoil):
    w = compute_window(trefoil, -4, 10)
    u, q = growth_cell(w)
    p = limit_profile(w)
    assert p.certified_below == u
    want = {u: d for u, d in dataset.read_rows(dataset.golden_path("profile_trefoil")) if d}
    assert p.certified == {k: v for k, v in want.items() if k < u}
    assert eventual_image(w).stable


def test_window_dims_at_low_and_high_levels(trefoil):
    dims = compute_window(trefoil, 1, 9).dims()
    assert list(dims.values()) == [7, 6, 5, 6, 5, 6, 7, 8, 9]


def test_cap_gives_unstabilized_with_partial(trefoil):
    with pytest.raises(UnstabilizedError) as e:
        compute_kappa(trefoil, WindowPolicy(cap=20))
    assert e.value.partial is None or isinstance(e.value.partial, KappaInvariant)


def test_short_fixed_window_is_unstabilized(trefoil):
    with pytest.raises(UnstabilizedError) as e:
        compute_kappa(trefoil, WindowPolicy(window=(-2, 2)))
    assert e.value.partial.stabilization["end_conditions"] is False
    assert e.value.partial.stabilization["eventual_ranks"]


def test_inadmissible_tangles():
    with pytest.raises(KappaError, match="braid-like"):
        compute_kappa(SuturedTangle.make([], {"b0": 1, "b1": 1, "t0": 2, "t1": 2}))
    with pytest.raises(KappaError, match="dimension 3"):
        compute_kappa(montesinos_tangle([[2], [5]], [1, -1]))


def test_amphicheirality(tangles):
    assert amphicheirality_check(tangles["trefoil"]).verdict == "OBSTRUCTED"
    assert amphicheirality_check(tangles["unknot"]).verdict == "SILENT"
    v = amphicheirality_check(tangles["figure8-h1"], partner=tangles["figure8-h2"])
    assert v.verdict == "SILENT" and v.differing_u == []
    # each figure-eight inversion alone is not carried to itself by the mirror
    assert amphicheirality_check(tangles["figure8-h1"]).verdict == "OBSTRUCTED"


def test_structure_report(kappas):
    for name, k in kappas.items():
        rep = structure_report(k)
        assert rep["mod4"] == 0 and rep["tiled"], name
    rep = structure_report(kappas["figure8-h1"])
    assert sorted(rep["tiles"]) == [(0, -3), (4, -1)]
    bad = structure_report(KappaInvariant({(0, 1): 1, (1, 1): 1}))
    assert not bad["tiled"] and bad["mod4"] == 2


tile_sets = st.lists(st.tuples(st.integers(-10, 10), st.sampled_from([-3, -1, 1, 3])), max_size=5)


@given(tile_sets)
def test_tiling_recovers_sums_of_tiles(tiles):
    table = {}
    for u0, td in tiles:
        for s in (0, 2, 3, 5):
            table[(u0 + s, td)] = table.get((u0 + s, td), 0) + 1
    rep = structure_report(KappaInvariant(table))
    assert rep["tiled"] and rep["mod4"] == 0
    assert sorted(rep["tiles"]) == sorted(tiles)


@given(st.dictionaries(st.tuples(st.integers(-20, 20), st.integers(-5, 5).map(lambda x: 2 * x + 1)), st.integers(1, 3)))
def test_reflect_is_an_involution(table):
    k = KappaInvariant(table)
    assert mirror_reflect(mirror_reflect(k)) == k
    assert mirror_reflect(k).total_dim == k.total_dim


def test_even_diagonal_rejected():
    with pytest.raises(AssertionError):
        KappaInvariant({(0, 2): 1})


def test_serialization(kappas):
    k = kappas["figure8-h1"]
    lines = k.to_tsv().splitlines()
    assert lines[0].split("\t") == ["2d\\u"] + [str(u) for u in range(0, 10)]
    assert [ln.split("\t")[0] for ln in lines[1:]] == ["-1", "-3"]
    obj = k.to_json()
    assert obj["total"] == 8 and len(obj["entries"]) == 8
