"""Phase 1: find a feasible basis or decide that P is empty."""
from dataclasses import dataclass, field
from fractions import Fraction

from . import numeric as nm
from .bounding import bound_global
from .exceptions import (
    DegenerateSegment,
    InfeasibleBasis,
    NonIntegralMatrix,
    NotPointed,
    RetriesExhausted,
    UnboundedDirection,
)
from .geometry import Polyhedron, basis_point, global_delta, max_all_subdeterminants
from .optimize import DEFAULT_RETRIES, phase2_optimize
from .pivot import shadow_simplex
from .sampler import make_rng


@dataclass
class FeasibleBasis:
    basis: list
    point: tuple
    pivots: int = 0
    casts: int = 0
    rounds: list = field(default_factory=list)
    feasible = True

    def to_json(self):
        return {
            "feasible": True,
            "basis": list(self.basis),
            "point": [nm.fmt(x) for x in self.point],
            "pivots": self.pivots,
            "casts": self.casts,
            "rounds": self.rounds,
        }


@dataclass
class Infeasible:
    """Certificate (row, gamma, rhs): min <a_row, x> over the rows processed so
    far is gamma > rhs.  For the auxiliary LP, row is None and gamma = min s."""

    row: object
    gamma: Fraction
    rhs: Fraction
    pivots: int = 0
    rounds: list = field(default_factory=list)
    feasible = False

    def to_json(self):
        return {
            "feasible": False,
            "row": self.row,
            "gamma": nm.fmt(self.gamma),
            "rhs": nm.fmt(self.rhs),
            "pivots": self.pivots,
            "rounds": self.rounds,
        }


@dataclass(frozen=True)
class RayCast:
    basis: list
    point: tuple
    casts: int


def _independent(A, rows):
    """Greedy maximal independent subset of ``rows``, in the given order."""
    keep = []
    for i in rows:
        if nm.rank(nm.submatrix(A, keep + [i])) > len(keep):
            keep.append(i)
    return keep


def ray_cast_to_basis(P, x0):
    """Walk from a feasible point to a vertex, one blocking row per move.

    Each move follows a nullspace direction of the tight rows until a new row
    becomes tight; the new row is independent of the old ones, so at most n
    moves are needed.
    """
    x = nm.vector(x0)
    if not P.contains(x):
        raise InfeasibleBasis("ray casting needs a feasible start point")
    casts = 0
    while True:
        tight = _independent(P.A, P.tight_rows(x))
        if len(tight) == P.n:
            return RayCast(sorted(tight), x, casts)
        r = nm.nullspace(nm.submatrix(P.A, tight), P.n)[0]
        for direction in (r, nm.scale(r, -1)):
            steps = []
            for j in range(P.m):
                g = nm.dot(P.A[j], direction)
                if g > 0:
                    steps.append((P.b[j] - nm.dot(P.A[j], x)) / g)
            if steps:
                x = nm.add(x, nm.scale(direction, min(steps)))
                casts += 1
                break
        else:
            raise NotPointed("a line through x0 stays inside P")


def auxiliary_lp(P):
    """min s subject to <a_i, x> - s <= b_i and s >= 0, as a polyhedron in (x, s)."""
    A = [tuple(a) + (Fraction(-1),) for a in P.A]
    A.append((Fraction(0),) * P.n + (Fraction(-1),))
    return Polyhedron(A, tuple(P.b) + (Fraction(0),))


def aux_delta_sq(n, Delta):
    """Squared global delta lower bound for the (n+1)-dimensional auxiliary matrix.

    Its k x k minors are at most (k+1) Delta (expand along the s column), so the
    subdeterminant bound gives delta >= 1/((n+1)^2 Delta^2).
    """
    return Fraction(1, ((n + 1) ** 2 * Delta**2) ** 2)


def phase1_subdeterminant(P, Delta=None, rng=None, **kw):
    """Decide feasibility of an integral system through the auxiliary LP."""
    if any(x.denominator != 1 for row in P.A for x in row):
        raise NonIntegralMatrix("phase 1 via subdeterminants needs an integral matrix")
    if Delta is None:
        Delta = max_all_subdeterminants(P.A)
    Delta = max(int(Delta), 1)
    rng = make_rng(rng)
    aux = auxiliary_lp(P)
    s0 = -min([Fraction(0)] + list(P.b))
    start = ray_cast_to_basis(aux, (Fraction(0),) * P.n + (s0,))
    delta_sq = aux_delta_sq(P.n, Delta)
    bounded, _ = bound_global(aux, delta_sq)
    d = (Fraction(0),) * P.n + (Fraction(-1),)
    res = phase2_optimize(bounded, delta_sq, start.basis, d, rng, **kw)
    s = res.point[-1]
    if s > 0:
        return Infeasible(None, s, Fraction(0), res.pivots)
    cast = ray_cast_to_basis(P, res.point[:-1])
    return FeasibleBasis(cast.basis, cast.point, res.pivots, start.casts + cast.casts)


def _random_cone_objective(P, basis, rng):
    weights = [Fraction(int(w), 64) for w in rng.integers(1, 65, size=len(basis))]
    return nm.lincomb(weights, [P.A[i] for i in basis])


def _min_over_unbounded(P, basis, a, b, rng, retries=DEFAULT_RETRIES):
    """Exact min <a, x> over P via shadow simplex on P itself.

    Returns a point of P with <a, x> <= b, or the finite minimum value.
    """
    d = nm.scale(a, -1)
    for _ in range(retries):
        c = _random_cone_objective(P, basis, rng)
        try:
            B, trace = shadow_simplex(P, c, d, basis)
        except DegenerateSegment:
            continue
        except UnboundedDirection as exc:
            x, r = exc.point, exc.ray
            gap = nm.dot(a, x) - b
            t = max(Fraction(0), gap / -nm.dot(a, r))
            return nm.add(x, nm.scale(r, t)), None, 0
        x = basis_point(P, B)
        return x, nm.dot(a, x), trace.pivots
    raise RetriesExhausted("boundedness check: segment degenerate for every sample")


def phase1_global_delta(P, delta_sq=None, rng=None, **kw):
    """Add the rows one at a time, minimizing each new row over the rows so far.

    ``delta_sq`` must not exceed P's squared global delta (computed by
    enumeration when omitted).  Rows are processed in input order.
    """
    rng = make_rng(rng)
    if delta_sq is None:
        delta_sq = global_delta(P.A)
    delta_sq = nm.frac(delta_sq)
    I = _independent(P.A, range(P.m))
    basis = list(I)
    point = basis_point(P, basis)
    pivots, casts, rounds = 0, 0, []
    for i in range(P.m):
        if i in I:
            continue
        a, b = P.A[i], P.b[i]
        PI = P.subsystem(I)
        local = [I.index(j) for j in basis]
        bounded, _ = bound_global(PI, delta_sq)
        res = phase2_optimize(bounded, delta_sq, local, nm.scale(a, -1), rng, **kw)
        pivots += res.pivots
        x, gamma = res.point, nm.dot(a, res.point)
        # bounded is LP-equivalent to P_I, so gamma is exact unless min is -inf
        if gamma > b and any(j >= PI.m for j in bounded.tight_rows(x)):
            # optimum sits on an added row: decide whether min over P_I is -inf
            x, gamma, extra = _min_over_unbounded(PI, local, a, b, rng)
            pivots += extra
        if gamma is None:
            rounds.append({"row": i, "gamma": "-inf", "rhs": nm.fmt(b)})
            gamma = nm.dot(a, x)
        else:
            rounds.append({"row": i, "gamma": nm.fmt(gamma), "rhs": nm.fmt(b)})
        if gamma > b:
            return Infeasible(i, gamma, b, pivots, rounds)
        I = sorted(I + [i])
        cast = ray_cast_to_basis(P.subsystem(I), x)
        casts += cast.casts
        basis = [I[k] for k in cast.basis]
        point = cast.point
    return FeasibleBasis(sorted(basis), point, pivots, casts, rounds)
