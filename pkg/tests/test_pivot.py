from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shadowlp import numeric as nm
from shadowlp.exceptions import DegenerateSegment, InfeasibleStart, UnboundedDirection
from shadowlp.geometry import Polyhedron, basis_point, is_feasible_basis, normal_cone_membership
from shadowlp.harness import brute_force_optimize, enumerate_vertices, random_degenerate, random_polytope
from shadowlp.pivot import follow_segment_chain, reorder_for_perturbation, shadow_simplex


def test_reorder_examples(square, pyr):
    Q, B, perm = reorder_for_perturbation(square, [0, 1])
    assert B == [2, 3] and perm == [2, 3, 0, 1]
    assert is_feasible_basis(Q, B)
    Q, B, perm = reorder_for_perturbation(pyr, [1, 2, 4])
    assert B == [2, 3, 4] and perm == [0, 3, 1, 2, 4]
    assert is_feasible_basis(Q, B)
    Q, B, perm = reorder_for_perturbation(square, [2, 3])
    assert perm == [0, 1, 2, 3] and Q.A == square.A


def test_zero_pivots_when_c_equals_d(square):
    B, trace = shadow_simplex(square, (1, 1), (1, 1), [0, 1])
    assert B == [0, 1] and trace.pivots == 0


def test_single_facet_crossing(square):
    B, trace = shadow_simplex(square, (1, F(1, 3)), (-1, F(1, 3)), [0, 1])
    assert trace.pivots == 1
    assert basis_point(square, B) == (0, 1)
    rec = trace.records[0]
    assert rec.lam == F(1, 2) and rec.leave == 0 and rec.enter == 2
    assert trace.to_jsonl() == '{"lambda": "1/2", "leave": 0, "enter": 2}\n'


def _check_run(P, c, d, B0):
    B, trace = shadow_simplex(P, c, d, B0, check_invariants=True)
    for b in trace.bases():
        assert is_feasible_basis(P, b)
    lams = trace.lambdas()
    assert all(0 <= x < 1 for x in lams)
    assert all(a < b for a, b in zip(lams, lams[1:]))
    assert normal_cone_membership(P, B, d)
    return B, trace


def test_pyramid_apex_to_base(pyr):
    c = (F(1, 10), F(1, 7), 1)
    d = (1, F(9, 10), F(9, 10))
    B, trace = _check_run(pyr, c, d, [1, 2, 3])
    assert basis_point(pyr, B) == (1, 1, 0)
    assert brute_force_optimize(pyr, d).vertices == ((1, 1, 0),)


def test_degenerate_segment_raises(square):
    with pytest.raises(DegenerateSegment):
        shadow_simplex(square, (-1, -1), (1, 1), [2, 3])


def test_unbounded_direction():
    P = Polyhedron([[-1, 0], [0, -1], [-1, 1]], [0, 0, 1])
    with pytest.raises(UnboundedDirection) as info:
        shadow_simplex(P, (-1, -1), (1, 0), [0, 1])
    exc = info.value
    assert all(nm.dot(a, exc.ray) <= 0 for a in P.A)
    assert nm.dot((1, 0), exc.ray) > 0
    assert P.contains(exc.point)


def test_infeasible_start(square):
    with pytest.raises(InfeasibleStart):
        shadow_simplex(square, (1, 1), (1, 1), [0, 2])
    with pytest.raises(InfeasibleStart):
        shadow_simplex(square, (-1, 1), (1, 1), [0, 1])


def test_chain_bookkeeping(square, cube3):
    B, trace = follow_segment_chain(square, [(1, 1), (1, 1)], [0, 1])
    assert trace.pivots == 0
    rng = np.random.default_rng(3)
    X = tuple(F(int(v), 7) for v in rng.integers(-20, 20, size=2))
    c, d = (F(1), F(1)), (F(-1), F(-2, 3))
    wps = [c, nm.add(c, X), nm.add(d, X), d]
    B, trace = follow_segment_chain(square, wps, [0, 1])
    legs = [sum(1 for r in trace.records if r.leg == k) for k in range(3)]
    assert sum(legs) == trace.pivots
    X = (F(3, 11), F(-5, 13), F(2, 17))
    c, d = (F(1), F(1), F(1)), (F(-1), F(-1), F(-1))
    B, _ = follow_segment_chain(cube3, [c, nm.add(c, X), nm.add(d, X), d], [0, 1, 2])
    assert normal_cone_membership(cube3, B, d)
    assert basis_point(cube3, B) == brute_force_optimize(cube3, d).vertex


def _cone_objective(P, B, rng):
    w = [F(int(x), 16) for x in rng.integers(1, 33, size=len(B))]
    return nm.lincomb(w, [P.A[i] for i in B])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_random_result_equivalence(seed):
    rng = np.random.default_rng(seed)
    P = random_polytope(int(rng.integers(2, 4)), int(rng.integers(4, 9)), rng)
    v = enumerate_vertices(P)[int(rng.integers(len(enumerate_vertices(P))))]
    B0 = list(v.bases[0])
    c = _cone_objective(P, B0, rng)
    d = tuple(F(int(x), int(y)) for x, y in zip(rng.integers(-9, 10, size=P.n), rng.integers(1, 5, size=P.n)))
    if not any(d):
        return
    try:
        B, trace = _check_run(P, c, d, B0)
    except DegenerateSegment:
        return
    assert nm.dot(d, basis_point(P, B)) == brute_force_optimize(P, d).value
    assert trace.pivots == len(set(trace.lambdas()))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_random_degenerate_visits_feasible_bases(seed):
    rng = np.random.default_rng(seed)
    P = random_degenerate(3, 6, rng)
    verts = enumerate_vertices(P)
    v = max(verts, key=lambda u: len(u.tight))
    B0 = list(v.bases[int(rng.integers(len(v.bases)))])
    c = _cone_objective(P, B0, rng)
    d = tuple(F(int(x)) for x in rng.integers(-9, 10, size=3))
    if not any(d):
        return
    try:
        _check_run(P, c, d, B0)
    except DegenerateSegment:
        pass
