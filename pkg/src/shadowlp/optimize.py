"""Phase-2 optimization along a randomized three-leg shadow path.

From a feasible basis B the path runs c -> c + X -> d + X -> d + (delta/2n^3) X,
where c is the sum of the normalized basis rows and X is exponentially
distributed with ||X|| <= 2n.  The final basis identifies one row i* that
belongs to an optimal basis for d; the problem then recurses on the facet
<a_i*, x> = b_i*.

Facets are parametrized as x = origin + Q z with the columns of Q orthogonal
but not normalized, so each recursion level carries a diagonal metric ``w``
(``||x||^2 = sum w_k z_k^2``).  Dual norms are then ``sum a_k^2 / w_k``, which
keeps every normalization exact up to one rational square-root rounding.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction

from . import numeric as nm
from .exceptions import (
    DegenerateSegment,
    DeltaOverestimated,
    InfeasibleBasis,
    NoLargeCoefficient,
    RetriesExhausted,
    ZeroRow,
)
from .geometry import Polyhedron, basis_point, is_feasible_basis, normal_cone_membership
from .pivot import PivotTrace, follow_segment_chain
from .sampler import make_rng, sample_conditioned

log = logging.getLogger(__name__)

DEFAULT_RETRIES = 16


def dual_norm_sq(a, metric=None):
    if metric is None:
        return nm.norm_sq(a)
    return sum((x * x / w for x, w in zip(a, metric)), Fraction(0))


def initial_objective(P, basis, metric=None, denom=nm.DEFAULT_DENOM):
    """Sum of the basis rows, each scaled by a rational 1/||a_i|| (rounded down)."""
    if not is_feasible_basis(P, basis):
        raise InfeasibleBasis(f"basis {list(basis)} is not feasible")
    rows = [P.A[i] for i in basis]
    q = [nm.inv_sqrt_floor(dual_norm_sq(a, metric), denom) for a in rows]
    return nm.lincomb(q, rows)


def snap_choose_index(lambdas, n, squared=False):
    """Pick i* with lambda_i* > 1/n: largest lambda first, then smallest index.

    With ``squared=True`` the values are sign(lambda) * lambda^2 and are
    compared against 1/n^2.
    """
    threshold = Fraction(1, n * n) if squared else Fraction(1, n)
    big = [(lam, i) for i, lam in lambdas if lam > threshold]
    if not big:
        raise NoLargeCoefficient(f"no coefficient exceeds 1/{n}")
    return min(big, key=lambda t: (-t[0], t[1]))[1]


@dataclass(frozen=True)
class FacetMap:
    """Coordinates of a facet: parent point = origin + sum z_k * axes[k]."""

    rows: tuple  # parent row index of every child row
    origin: tuple
    axes: tuple
    metric: tuple

    def lift(self, z):
        return nm.add(self.origin, nm.lincomb(z, self.axes))

    def project_objective(self, d):
        return tuple(nm.dot(d, q) for q in self.axes)

    def child_index(self, parent_row):
        return self.rows.index(parent_row)


def project_facet(P, i, metric=None):
    """The facet <a_i, x> = b_i as a polytope in n - 1 coordinates.

    Rows that vanish after projection are redundant on the facet (their
    right-hand side is nonnegative there) and are dropped.
    """
    n = P.n
    if n < 2:
        raise ValueError("cannot project a 1-dimensional polyhedron onto a facet")
    W = tuple(metric) if metric is not None else (Fraction(1),) * n
    a = P.A[i]
    if all(x == 0 for x in a):
        raise ZeroRow(f"row {i} is zero")
    axes = []
    for v in nm.nullspace((a,), n):
        for q in axes:
            num = sum((x * y * w for x, y, w in zip(v, q, W)), Fraction(0))
            den = sum((y * y * w for y, w in zip(q, W)), Fraction(0))
            v = nm.sub(v, nm.scale(q, num / den))
        axes.append(v)
    new_metric = tuple(sum((y * y * w for y, w in zip(q, W)), Fraction(0)) for q in axes)
    winv_a = tuple(x / w for x, w in zip(a, W))
    origin = nm.scale(winv_a, P.b[i] / nm.dot(a, winv_a))
    rows, A, b = [], [], []
    for j in range(P.m):
        if j == i:
            continue
        r = tuple(nm.dot(P.A[j], q) for q in axes)
        rhs = P.b[j] - nm.dot(P.A[j], origin)
        if all(x == 0 for x in r):
            if rhs < 0:
                raise ValueError(f"facet {i} is empty")
            continue
        rows.append(j)
        A.append(r)
        b.append(rhs)
    fmap = FacetMap(tuple(rows), origin, tuple(axes), new_metric)
    return Polyhedron(A, b), fmap


@dataclass
class OptimizationResult:
    basis: list
    point: tuple
    value: Fraction
    traces: list = field(default_factory=list)  # one PivotTrace per recursion level
    attempts: int = 0

    @property
    def pivots(self):
        return sum(t.pivots for t in self.traces)

    @property
    def depth(self):
        return len(self.traces)

    def combined_trace(self):
        out = PivotTrace()
        for t in self.traces:
            out.extend(t)
        return out


def _draw_x(k, metric, rng, denom, zero):
    if zero:
        return (Fraction(0),) * k
    limit = 4 * k * k
    while True:
        s = sample_conditioned(k, rng)
        # isotropic in the isometric frame; scale by sqrt(w) into frame coords
        coords = [float(v) * float(w) ** 0.5 for v, w in zip(s.x, metric)]
        X = tuple(Fraction(round(v * denom), denom) for v in coords)
        if dual_norm_sq(X, metric) <= limit:
            return X


class _Run:
    def __init__(self, delta, rng, force_x_zero, retries, denom, check_invariants):
        self.delta = delta
        self.rng = rng
        self.force_x_zero = force_x_zero
        self.retries = retries
        self.denom = denom
        self.check_invariants = check_invariants
        self.traces = []
        self.attempts = 0

    def solve(self, P, metric, basis, d):
        k = P.n
        if all(x == 0 for x in d):
            # objective orthogonal to this face: every vertex of it is optimal
            return sorted(basis)
        c = initial_objective(P, basis, metric, self.denom)
        dn = nm.inv_sqrt_floor(dual_norm_sq(d, metric), self.denom)
        d2 = nm.scale(d, 2 * dn)
        shrink = self.delta / (2 * k**3)
        for _ in range(self.retries):
            self.attempts += 1
            X = _draw_x(k, metric, self.rng, self.denom, self.force_x_zero)
            waypoints = [c, nm.add(c, X), nm.add(d2, X), nm.add(d2, nm.scale(X, shrink))]
            try:
                B, trace = follow_segment_chain(
                    P, waypoints, basis, check_invariants=self.check_invariants
                )
            except DegenerateSegment as exc:
                log.debug("degenerate segment, resampling X: %s", exc)
                if self.force_x_zero:
                    raise
                continue
            break
        else:
            raise RetriesExhausted(f"segment degenerate after {self.retries} samples")
        self.traces.append(trace)
        d_tilde = waypoints[-1]
        AB = nm.submatrix(P.A, B)
        mu = nm.solve_square(nm.transpose(AB), d_tilde)
        lambdas = [
            (i, (1 if m_i > 0 else -1) * m_i * m_i * dual_norm_sq(P.A[i], metric))
            for i, m_i in zip(B, mu)
        ]
        i_star = snap_choose_index(lambdas, k, squared=True)
        if k == 1:
            return [i_star]
        child, fmap = project_facet(P, i_star, metric)
        child_basis = [fmap.child_index(j) for j in B if j != i_star]
        sub = self.solve(child, fmap.metric, child_basis, fmap.project_objective(d))
        return sorted([fmap.rows[j] for j in sub] + [i_star])


def phase2_optimize(
    P,
    delta_sq,
    basis,
    d,
    rng=None,
    *,
    force_x_zero=False,
    retries=DEFAULT_RETRIES,
    denom=nm.DEFAULT_DENOM,
    check_invariants=False,
):
    """Optimal basis of the polytope P for objective d, starting from ``basis``.

    ``delta_sq`` must not exceed the squared local delta of P; an
    overestimate is detected by the final optimality check and reported as
    DeltaOverestimated.
    """
    d = nm.vector(d)
    if all(x == 0 for x in d):
        raise ValueError("objective must be nonzero")
    if not is_feasible_basis(P, basis):
        raise InfeasibleBasis(f"basis {list(basis)} is not feasible")
    delta = nm.sqrt_floor(nm.frac(delta_sq), denom)
    run = _Run(delta, make_rng(rng), force_x_zero, retries, denom, check_invariants)
    B = run.solve(P, (Fraction(1),) * P.n, list(basis), d)
    if not is_feasible_basis(P, B) or not normal_cone_membership(P, B, d):
        raise DeltaOverestimated(f"lifted basis {B} is not optimal; delta^2 = {delta_sq} too large")
    x = basis_point(P, B)
    return OptimizationResult(B, x, nm.dot(d, x), run.traces, run.attempts)


def optimize_with_delta_search(P, basis, d, rng=None, delta_sq=1, max_rounds=64, **kw):
    """Guess delta^2, dividing by 4 (delta by 2) after each failed verification."""
    rng = make_rng(rng)
    delta_sq = nm.frac(delta_sq)
    for _ in range(max_rounds):
        try:
            res = phase2_optimize(P, delta_sq, basis, d, rng, **kw)
        except DeltaOverestimated:
            delta_sq /= 4
            continue
        res.delta_sq = delta_sq
        return res
    raise DeltaOverestimated("no delta guess produced a verified optimum")
