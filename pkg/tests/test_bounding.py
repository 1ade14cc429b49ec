import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shadowlp import numeric as nm
from shadowlp.bounding import bound_global, bound_local, compute_b_max, vertex_norm_bound_sq
from shadowlp.exceptions import InfeasibleBasis
from shadowlp.geometry import Polyhedron, feasible_bases, global_delta, is_bounded, local_delta
from shadowlp.harness import enumerate_vertices, random_polytope, random_unbounded

orthant = Polyhedron([[-1, 0], [0, -1]], [0, 0])


def test_b_max_examples(square):
    assert compute_b_max(square) == 1
    assert compute_b_max(Polyhedron([[1, 0], [0, 2]], [3, 4])) == 9


def _vertex_set(P):
    return {v.point for v in enumerate_vertices(P)}


def _lp_equivalent(P, Q):
    original = range(P.m)
    kept = {v.point for v in enumerate_vertices(Q) if all(i in original for i in v.tight)}
    return kept == _vertex_set(P)


def test_bound_local_square(square):
    Q, rep = bound_local(square, [0, 1], 1)
    assert Q.m == 5 and _vertex_set(Q) == _vertex_set(square)
    assert rep.mode == "local" and rep.to_json()["original_m"] == 4


def test_bound_local_cone():
    Q, rep = bound_local(orthant, [0, 1], 1)
    verts = _vertex_set(Q)
    assert len(verts) == 3 and (0, 0) in verts
    assert Q.slack((0, 0))[2] > 0
    assert is_bounded(Q)


def test_bound_global_orthant():
    Q, rep = bound_global(orthant, 1)
    assert Q.m == 4 and len(_vertex_set(Q)) == 4 and is_bounded(Q)


def test_bound_local_rejects_infeasible(square):
    with pytest.raises(InfeasibleBasis):
        bound_local(square, [0, 2], 1)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_vertex_norm_bound(seed):
    rng = np.random.default_rng(seed)
    P = random_polytope(int(rng.integers(2, 4)), int(rng.integers(4, 8)), rng)
    bound = vertex_norm_bound_sq(P, local_delta(P))
    assert all(nm.norm_sq(v.point) <= bound for v in enumerate_vertices(P))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_transforms_on_unbounded(seed):
    rng = np.random.default_rng(seed)
    P = random_unbounded(int(rng.integers(2, 4)), int(rng.integers(3, 6)), rng)
    n = P.n
    dl = local_delta(P)
    Q, rep = bound_local(P, next(feasible_bases(P)), dl)
    assert is_bounded(Q) and _lp_equivalent(P, Q)
    assert local_delta(Q) >= (dl / (2 * n)) ** 2
    dg = global_delta(P.A)
    Q, rep = bound_global(P, dg)
    assert is_bounded(Q) and _lp_equivalent(P, Q)
    assert global_delta(Q.A) == dg
    for v in enumerate_vertices(P):
        assert all(s > 0 for s in Q.slack(v.point)[P.m:])
