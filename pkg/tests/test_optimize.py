import math
from fractions import Fraction as F

import numpy as np
import pytest

from shadowlp import numeric as nm
from shadowlp.exceptions import InfeasibleBasis, NoLargeCoefficient, RetriesExhausted
from shadowlp.geometry import Polyhedron, basis_point, feasible_bases, local_delta, normal_cone_membership
from shadowlp.harness import brute_force_optimize, enumerate_vertices, random_polytope
from shadowlp.optimize import (
    initial_objective,
    optimize_with_delta_search,
    phase2_optimize,
    project_facet,
    snap_choose_index,
)


def test_initial_objective_examples():
    P = Polyhedron([[1, 0], [0, 1], [-1, -1]], [1, 1, 5])
    assert initial_objective(P, [0, 1]) == (1, 1)
    P = Polyhedron([[2, 0], [0, 2], [-1, -1]], [1, 1, 5])
    assert initial_objective(P, [0, 1]) == (1, 1)
    P = Polyhedron([[1, 0], [1, 1], [-1, 0], [0, -1]], [1, 2, 5, 5])
    c = initial_objective(P, [0, 1])
    assert abs(float(c[0]) - (1 + 2**-0.5)) < 1e-15 and abs(float(c[1]) - 2**-0.5) < 1e-15
    assert normal_cone_membership(P, [0, 1], c)


def test_phase2_square(square):
    res = phase2_optimize(square, 1, [2, 3], (1, 1), rng=0)
    assert res.point == (1, 1) and res.value == 2


def test_phase2_zero_noise_zero_pivots(square):
    res = phase2_optimize(square, 1, [0, 1], (1, 1), force_x_zero=True)
    assert res.pivots == 0 and res.basis == [0, 1]


def test_phase2_random_instances():
    rng = np.random.default_rng(2024)
    for seed in range(30):
        P = random_polytope(3, int(rng.integers(5, 11)), rng)
        d = tuple(F(int(x), int(y)) for x, y in zip(rng.integers(-6, 7, size=3), rng.integers(1, 4, size=3)))
        if not any(d):
            continue
        B0 = next(feasible_bases(P))
        res = phase2_optimize(P, local_delta(P), B0, d, rng=seed, check_invariants=True)
        assert res.value == brute_force_optimize(P, d).value
        assert res.depth <= P.n


def test_delta_search_recovers(square):
    rng = np.random.default_rng(8)
    P = random_polytope(2, 7, rng)
    d = (F(1), F(-2, 3))
    res = optimize_with_delta_search(P, next(feasible_bases(P)), d, rng=1, delta_sq=F(2**40))
    assert res.value == brute_force_optimize(P, d).value
    assert res.delta_sq < 2**40


def test_phase2_errors(square):
    with pytest.raises(InfeasibleBasis):
        phase2_optimize(square, 1, [0, 2], (1, 1))
    with pytest.raises(RetriesExhausted):
        phase2_optimize(square, 1, [2, 3], (1, 1), retries=0)
    with pytest.raises(ValueError):
        phase2_optimize(square, 1, [2, 3], (0, 0))


def test_snap_examples():
    assert snap_choose_index([(1, F(3, 4)), (2, F(3, 4))], 2) == 1
    assert snap_choose_index([(5, F(1, 10)), (7, F(2)), (9, F(1, 10))], 3) == 7
    with pytest.raises(NoLargeCoefficient):
        snap_choose_index([(0, F(1, 2)), (1, F(1, 3))], 2)


def test_snap_squared_threshold():
    assert snap_choose_index([(0, F(1, 5)), (1, F(3, 10))], 2, squared=True) == 1
    with pytest.raises(NoLargeCoefficient):
        snap_choose_index([(0, F(1, 4)), (1, F(-1))], 2, squared=True)


def test_project_cube_facet(cube3):
    child, fmap = project_facet(cube3, 2)  # x3 <= 1
    assert child.n == 2 and child.m == 4
    verts = {fmap.lift(v.point) for v in enumerate_vertices(child)}
    assert verts == {v.point for v in enumerate_vertices(cube3) if v.point[2] == 1}


def test_project_triangle_facet(triangle):
    child, fmap = project_facet(triangle, 2)  # x + y = 1
    assert child.n == 1 and child.m == 2
    ends = {fmap.lift(v.point) for v in enumerate_vertices(child)}
    assert ends == {(1, 0), (0, 1)}


def _metric_delta_sq(rows, W):
    # delta^2 in the isometric frame: 1 / (||r_i||_*^2 (G^-1)_ii), G = R W^-1 R^T
    Rw = [tuple(x / w for x, w in zip(r, W)) for r in rows]
    G = [[nm.dot(a, b) for b in rows] for a in Rw]
    Gi = nm.inverse(G)
    return min(1 / (nm.dot(r, rw) * Gi[i][i]) for i, (r, rw) in enumerate(zip(rows, Rw)))


def test_delta_inherited_by_facets():
    rng = np.random.default_rng(77)
    for _ in range(12):
        P = random_polytope(3, 7, rng)
        base = local_delta(P)
        for i in range(P.m):
            try:
                child, fmap = project_facet(P, i)
            except ValueError:
                continue
            if not any(True for _ in feasible_bases(child)):
                continue
            got = min(_metric_delta_sq([child.A[j] for j in B], fmap.metric) for B in feasible_bases(child))
            assert got >= base


def test_pivot_count_regression(cube3):
    n, delta = 3, 1.0
    d = (F(1), F(1), F(1))
    c = initial_objective(cube3, [3, 4, 5])
    # the path ends at 2d/||d||, so ||d - c|| <= 2 + ||c||
    dist = 2 + math.sqrt(float(nm.norm_sq(c)))
    per_level = 2 * (2 * n * n / delta * math.log(2 * n / delta) + n * dist / delta
                     + 2 * n * n / delta * math.log(2 * n**3 / delta))
    pivots = [phase2_optimize(cube3, 1, [3, 4, 5], d, rng=s).pivots for s in range(100)]
    assert np.mean(pivots) <= n * per_level
    assert basis_point(cube3, phase2_optimize(cube3, 1, [3, 4, 5], d, rng=0).basis) == (1, 1, 1)
