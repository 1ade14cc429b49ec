import json
from fractions import Fraction as F

import pytest

from shadowlp.exceptions import BadParams, Unbounded
from shadowlp.geometry import Polyhedron, basis_point
from shadowlp.harness import (
    NormalFan,
    brute_force_optimize,
    check_path,
    crossings_scaled,
    crossings_shifted,
    diameter_bound,
    diameter_path,
    enumerate_vertices,
    generate_instance,
    instance_from_json,
    instance_to_json,
    load_instance,
    save_instance,
)


def test_enumerate_examples(square, pyr):
    assert len(enumerate_vertices(square)) == 4
    verts = enumerate_vertices(pyr)
    assert len(verts) == 5
    apex = next(v for v in verts if v.point == (0, 0, 1))
    assert apex.tight == (1, 2, 3, 4) and len(apex.bases) == 4
    empty = Polyhedron([[1], [-1]], [-1, -1])
    assert enumerate_vertices(empty) == []


def test_brute_force_examples(square, pyr):
    r = brute_force_optimize(square, (1, 1))
    assert r.vertices == ((1, 1),) and r.value == 2
    r = brute_force_optimize(square, (1, 0))
    assert set(r.vertices) == {(1, 0), (1, 1)}
    assert brute_force_optimize(pyr, (0, 0, 1)).vertex == (0, 0, 1)
    with pytest.raises(Unbounded):
        brute_force_optimize(Polyhedron([[-1, 0], [0, -1]], [0, 0]), (1, 1))


def test_fan_structure(square, cube3):
    assert len(NormalFan(square).edges) == 4
    assert len(NormalFan(cube3).edges) == 12
    assert NormalFan(square).width_sq() == F(1, 2)
    assert NormalFan(cube3).width_sq() == F(1, 3)
    with pytest.raises(Unbounded):
        NormalFan(Polyhedron([[-1, 0], [0, -1]], [0, 0]))


def test_crossings_c_equals_d(square):
    rep = crossings_shifted(NormalFan(square), (1, 0), (1, 0), 50, 0, F(1, 2))
    assert rep.counts == [0] * 50 and rep.passed


def test_crossings_against_sweep(square, cube3, pyr):
    for P, d in ((square, (1, 0)), (cube3, (0, 2, 0)), (pyr, (1, 1, 1))):
        fan = NormalFan(P)
        rep = crossings_shifted(fan, (0,) * P.n, d, 300, 5, fan.width_sq(), check_oracle=True)
        assert rep.oracle_checked == 300
        assert rep.raw_counts == [2 * k for k in rep.counts]


def test_crossings_scaled_examples(square, cube3):
    rep = crossings_scaled(NormalFan(square), (0, 0), F(99, 100), 300, 1, F(1, 2))
    assert rep.mean < 0.1
    rep = crossings_scaled(NormalFan(cube3), (1, F(1, 2), 0), F(1, 2), 300, 2, F(1, 3), check_oracle=True)
    assert rep.passed and rep.oracle_checked == 300
    with pytest.raises(BadParams):
        crossings_scaled(NormalFan(square), (0, 0), F(3, 2), 10, 1, F(1, 2))


def test_reports_reproducible(cube3):
    fan = NormalFan(cube3)
    a = crossings_shifted(fan, (0, 0, 0), (1, 1, 0), 200, 17, F(1, 3))
    b = crossings_shifted(fan, (0, 0, 0), (1, 1, 0), 200, 17, F(1, 3))
    assert a.counts == b.counts and a.to_csv() == b.to_csv()
    c = crossings_shifted(fan, (0, 0, 0), (1, 1, 0), 200, 17, F(1, 3), workers=2)
    assert c.counts == a.counts
    assert json.dumps(a.summary())


def test_diameter_examples(square, cube3):
    p = diameter_path(square, [0, 1], [0, 1], F(1, 2), 0)
    assert p.length == 0
    p = diameter_path(square, [2, 3], [0, 1], F(1, 2), 3)
    assert p.vertices[0] == (0, 0) and p.vertices[-1] == (1, 1)
    assert check_path(square, p)
    for a, b in zip(p.bases, p.bases[1:]):
        assert len(set(a) & set(b)) == 1
    p = diameter_path(cube3, [3, 4, 5], [0, 1, 2], F(1, 3), 7)
    assert check_path(cube3, p) and p.vertices[-1] == basis_point(cube3, [0, 1, 2])
    assert p.length <= diameter_bound(3, 1 / 3)


def test_generate_examples():
    P = generate_instance("cube", {"n": 3})
    assert P.m == 6 and P.meta["vertices"] == 8 and P.meta["global_delta_sq"] == "1"
    P = generate_instance("pyramid")
    assert P.m == 5 and P.meta["vertices"] == 5
    P = generate_instance("tu-interval", {"n": 4})
    assert all(x in (-1, 0, 1) for row in P.A for x in row)
    assert P.meta["subdet_delta_sq"] == "1/16"
    P = generate_instance("random-delta", {"n": 3, "m": 7}, 4)
    assert P.meta["vertices"] == len(enumerate_vertices(P))
    with pytest.raises(BadParams):
        generate_instance("hypercube")
    with pytest.raises(BadParams):
        generate_instance("cube", {"n": "three"})


def test_instance_roundtrip(tmp_path, pyr):
    data = instance_to_json(pyr)
    assert data["A"][1] == ["1", "0", "1"]
    assert instance_from_json(data) == pyr
    path = tmp_path / "p.json"
    save_instance(generate_instance("simplex", {"n": 2}), path)
    P = load_instance(path)
    assert P.b == (0, 0, 1) and P.meta["kind"] == "simplex"
    Q = instance_from_json({"A": [["1/2", "0"], ["0", "-3/4"]], "b": ["1", "2"]})
    assert Q.A[0][0] == F(1, 2)
