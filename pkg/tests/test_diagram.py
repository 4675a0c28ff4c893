import json

import pytest

from khtangle import dataset
from khtangle.diagram import (
    SuturedTangle,
    TangleError,
    c_T,
    closure,
    closure_infinity,
    diagram_from_pd,
    load_input,
    load_tangle,
    mirror,
    oriented_form,
    save_tangle,
    validate,
)
from khtangle.khcomplex import khovanov


@pytest.mark.parametrize("name", dataset.TANGLES)
def test_dataset_tangles_are_admissible(tangles, name):
    rep = validate(tangles[name])
    assert rep.ok and rep.planar and rep.braid_like
    assert rep.closed_components == 0
    assert sorted(rep.strands) in ([("b0", "t1"), ("b1", "t0")], [("b0", "t0"), ("b1", "t1")])


def test_unknot_tangle_report(unknot):
    rep = validate(unknot)
    assert rep.genus == 0
    assert rep.strands == (("b0", "t1"), ("b1", "t0"))


def test_nonplanar_crossing_is_detected():
    t = SuturedTangle.make([(1, 2, 3, 4)], {"b0": 1, "b1": 2, "t0": 3, "t1": 4})
    rep = validate(t)
    assert not rep.planar and rep.genus > 0


def test_turn_back_tangle_is_not_braid_like():
    t = SuturedTangle.make([], {"b0": 1, "b1": 1, "t0": 2, "t1": 2})
    rep = validate(t)
    assert rep.planar and not rep.braid_like


@pytest.mark.parametrize(
    "obj, arcs",
    [
        ({"crossings": [[1, 2, 3, 3]], "boundary": {"b0": 1, "b1": 2, "t0": 9, "t1": 4}}, (4, 9)),
        ({"crossings": [[1, 2, 4, 3]], "boundary": {"b0": 1, "b1": 2, "t0": 3, "t1": 3}}, (3, 4)),
        ({"crossings": [[0, 2, 4, 3]], "boundary": {"b0": 0, "b1": 2, "t0": 4, "t1": 3}}, (0,)),
    ],
)
def test_malformed_tangles_name_offending_arcs(obj, arcs):
    from khtangle.diagram import tangle_from_json

    with pytest.raises(TangleError) as e:
        tangle_from_json(obj)
    assert set(e.value.arcs) == set(arcs)


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        '{"boundary": {"b0": 1, "b1": 2, "t0": 3, "t1": 4}}',
        '{"crossings": [], "boundary": {"b0": 1, "b1": 2, "top": 3, "t1": 4}}',
        '{"crossings": [[1, 2, 3]], "boundary": {"b0": 1, "b1": 2, "t0": 3, "t1": 4}}',
        "[1, 2]",
    ],
)
def test_malformed_files(tmp_path, text):
    p = tmp_path / "bad.json"
    p.write_text(text)
    with pytest.raises(TangleError):
        load_input(p)


def test_roundtrip(tmp_path, trefoil):
    p = tmp_path / "t.json"
    save_tangle(trefoil, p)
    back = load_tangle(p)
    assert back == trefoil
    assert json.loads(p.read_text())["boundary"] == trefoil.to_json()["boundary"]


def test_load_input_closed_diagram(tmp_path):
    p = tmp_path / "k.json"
    p.write_text('{"crossings": [[1, 4, 2, 5], [3, 6, 4, 1], [5, 2, 6, 3]], "name": "3_1"}')
    d = load_input(p)
    assert len(d) == 3 and d.name == "3_1"


def test_oriented_form_is_idempotent_and_keeps_homology(tangles):
    for t in tangles.values():
        o = oriented_form(t)
        assert oriented_form(o) == o
        assert khovanov(closure(o, 1)) == khovanov(closure(t, 1))


@pytest.mark.parametrize("n", range(-4, 5))
def test_closure_sizes(trefoil, n):
    d = closure(trefoil, n)
    assert len(d) == len(trefoil.crossings) + abs(n)
    assert sum(d.signs) == d.n_plus - d.n_minus


def test_capping_closure_is_trivial(tangles):
    for t in tangles.values():
        v = khovanov(closure_infinity(t))
        assert v.total == 1


def test_c_t_of_unknot_tangle(unknot):
    # T(0) of the one-crossing tangle is a positive kink: one positive crossing
    assert c_T(unknot) == -1


def test_mirror_involution_and_reflection(trefoil):
    m = mirror(trefoil)
    back = mirror(m).crossings
    # a crossing read from the other under-slot is the same crossing
    assert all(b in (c, c[2:] + c[:2]) for b, c in zip(back, trefoil.crossings))
    for n in (-1, 0, 2):
        assert khovanov(closure(m, -n)) == khovanov(closure(trefoil, n)).reflect()


def test_mirror_of_closed_diagram():
    d = diagram_from_pd([(1, 4, 2, 5), (3, 6, 4, 1), (5, 2, 6, 3)])
    assert khovanov(mirror(d)) == khovanov(d).reflect()
