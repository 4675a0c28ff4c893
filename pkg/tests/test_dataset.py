"""The shipped tangles are reproducible from their constructions and pass the closure checks."""

import pytest

from khtangle import dataset
from khtangle.diagram import closure, closure_infinity, mirror, oriented_form, validate
from khtangle.khcomplex import determinant, format_laurent, jones_polynomial, khovanov
from khtangle.limit import compute_kappa
from khtangle.quotient import plat_diagram, quotient_tangle
from khtangle.tangles import montesinos_tangle, unknot_tangle

CONSTRUCTIONS = {
    "unknot": lambda: unknot_tangle(),
    "trefoil": lambda: montesinos_tangle([[2], [3]], [1, -1], baked=6, baked_sign=-1, name="trefoil"),
    "figure8-h1": lambda: quotient_tangle(((1, -1), (2, 1), (2, 1)), "figure8-h1"),
    "figure8-h2": lambda: mirror(quotient_tangle(((1, -1), (2, 1), (2, 1)))),
    "torus-5-1": lambda: quotient_tangle(((1, 1), (1, 1), (2, -1)), "torus-5-1"),
    "torus-8-19": lambda: montesinos_tangle([[3], [4]], [1, -1], name="torus-8-19"),
}

PLATS = {
    ((1, 1), (2, -1)): "-t^4 + t^3 + t",
    ((1, -1), (2, 1), (2, 1)): "t^2 - t + 1 - t^-1 + t^-2",
    ((1, 1), (2, -1), (2, -1)): "t^2 - t + 1 - t^-1 + t^-2",
    ((1, 1), (1, 1), (2, -1)): "-t^7 + t^6 - t^5 + t^4 + t^2",
}


@pytest.mark.parametrize("name", dataset.TANGLES)
def test_shipped_file_matches_construction(tangles, name):
    built = oriented_form(CONSTRUCTIONS[name]())
    assert built.crossings == tangles[name].crossings
    assert built.boundary == tangles[name].boundary


@pytest.mark.parametrize("word, jones", sorted(PLATS.items()))
def test_plats_are_the_intended_knots(word, jones):
    assert format_laurent(jones_polynomial(khovanov(plat_diagram(word)))) == jones


@pytest.mark.parametrize("word", sorted(PLATS))
def test_quotient_tangles_are_admissible(word):
    t = quotient_tangle(word)
    rep = validate(t)
    assert rep.planar and rep.braid_like and rep.closed_components == 0
    assert khovanov(closure_infinity(t)).total == 1


@pytest.mark.parametrize("name", ["trefoil", "figure8-h1", "torus-5-1", "torus-8-19"])
def test_determinants_grow_linearly(tangles, name):
    dets = [determinant(khovanov(closure(tangles[name], n))) for n in range(-3, 4)]
    steps = {b - a for a, b in zip(dets, dets[1:]) if a and b}
    assert steps <= {1, -1}


def test_trefoil_closures(trefoil):
    t6 = closure(trefoil, 6)
    assert len(t6.components()) == 2
    assert determinant(khovanov(t6)) == 6


def test_dual_route_trefoil(tangles):
    assert compute_kappa(quotient_tangle(((1, 1), (2, -1)))) == compute_kappa(tangles["trefoil"])


def test_dual_route_5_1(tangles):
    other = montesinos_tangle([[2], [1, 1, 2]], [1, -1])
    assert compute_kappa(other) == compute_kappa(tangles["torus-5-1"])


def test_dual_route_figure_eight_h2(tangles):
    other = quotient_tangle(((1, 1), (2, -1), (2, -1)))
    assert compute_kappa(other) == compute_kappa(tangles["figure8-h2"])


def test_golden_tables_parse():
    rows = dataset.read_rows(dataset.golden_path("kh_10_124"))
    assert len(rows) == 7 and sum(r[2] for r in rows) == 7
    grid = dataset.read_grid(dataset.golden_path("kappa_figure8_h1"))
    assert grid == {(0, -3): 1, (2, -3): 1, (3, -3): 1, (5, -3): 1, (4, -1): 1, (6, -1): 1, (7, -1): 1, (9, -1): 1}


def test_data_dir_override(tmp_path, monkeypatch):
    monkeypatch.setenv("KHTANGLE_DATA", str(tmp_path))
    assert dataset.data_dir() == tmp_path
    assert dataset.data_dir("x").name == "x"
