"""Shadow simplex: follow the objective (1 - lam) c + lam d through the normal fan.

Degeneracy is handled by perturbing the right-hand side symbolically,
b -> b + (eps, eps^2, ..., eps^m), after moving the starting basis to the last
n rows.  Ratios in the entering-row test are then :class:`EpsPoly` values and
the minimum is always unique.
"""
import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import numeric as nm
from .exceptions import DegenerateSegment, InfeasibleBasis, InfeasibleStart, UnboundedDirection
from .geometry import Polyhedron, basis_point, is_feasible_basis, normal_cone_membership
from .perturbation import EpsPoly


@dataclass(frozen=True)
class PivotRecord:
    lam: Fraction
    leave: int
    enter: int
    basis: tuple
    leg: int = 0

    def to_json(self):
        return {"lambda": nm.fmt(self.lam), "leave": self.leave, "enter": self.enter}


@dataclass
class PivotTrace:
    records: list = field(default_factory=list)
    ops: int = 0

    @property
    def pivots(self):
        return len(self.records)

    def lambdas(self):
        return [r.lam for r in self.records]

    def bases(self):
        return [r.basis for r in self.records]

    def extend(self, other, leg=None):
        for r in other.records:
            if leg is not None:
                r = PivotRecord(r.lam, r.leave, r.enter, r.basis, leg)
            self.records.append(r)
        self.ops += other.ops

    def to_jsonl(self):
        return "".join(json.dumps(r.to_json()) + "\n" for r in self.records)


def reorder_for_perturbation(P, basis):
    """Permute rows so ``basis`` occupies the last n positions.

    Returns ``(P_reordered, new_basis, perm)`` where row k of the reordered
    system is row ``perm[k]`` of P.  Non-basic rows keep their relative order.
    """
    basis = list(basis)
    if len(set(basis)) != P.n or len(basis) != P.n:
        raise InfeasibleBasis("basis must list n distinct rows")
    if not is_feasible_basis(P, basis):
        raise InfeasibleBasis(f"basis {basis} is not feasible")
    in_basis = set(basis)
    perm = [i for i in range(P.m) if i not in in_basis] + basis
    Q = Polyhedron(tuple(P.A[i] for i in perm), tuple(P.b[i] for i in perm))
    return Q, list(range(P.m - P.n, P.m)), perm


class _Tableau:
    """A' = A U with A'_B = I, plus U and the transformed objectives."""

    def __init__(self, A, basis, c, d):
        self.m, self.n = len(A), len(A[0])
        Ap, U = nm.gauss_column_transform(A, basis)
        self.rows = [list(r) for r in Ap]
        self.U = [list(r) for r in U]
        Ut = nm.transpose(U)
        self.c = list(nm.matvec(Ut, c))
        self.d = list(nm.matvec(Ut, d))
        self.basis = list(basis)
        self.ops = self.m * self.n * self.n

    def pivot(self, pos, j):
        """Make row j the unit vector e_pos by a rank-1 column update."""
        r = self.rows[j]
        piv = r[pos]
        t = [-x / piv for x in r]
        t[pos] = 1 / piv
        for M in (self.rows, self.U):
            for row in M:
                a = row[pos]
                if a:
                    for k in range(self.n):
                        if k != pos:
                            row[k] += a * t[k]
                    row[pos] = a * t[pos]
        for vec in (self.c, self.d):
            a = vec[pos]
            for k in range(self.n):
                if k != pos:
                    vec[k] += t[k] * a
            vec[pos] = t[pos] * a
        self.basis[pos] = j
        self.ops += 2 * self.m * self.n

    def check(self):
        for k, i in enumerate(self.basis):
            assert all(self.rows[i][l] == (1 if l == k else 0) for l in range(self.n))


def shadow_simplex(P, c, d, basis, *, check_invariants=False):
    """Pivot from a basis optimal for ``c`` to one optimal for ``d``.

    Returns ``(basis, trace)`` with basis indices referring to P's rows.  Raises
    UnboundedDirection when d is outside the support of the normal fan and
    DegenerateSegment when [c, d) is not in general position.
    """
    c, d = nm.vector(c), nm.vector(d)
    basis = list(basis)
    if not is_feasible_basis(P, basis):
        raise InfeasibleStart(f"start basis {basis} is infeasible")
    if not normal_cone_membership(P, basis, c):
        raise InfeasibleStart(f"start basis {basis} is not optimal for c")
    Q, qbasis, perm = reorder_for_perturbation(P, basis)
    m, n = Q.m, Q.n
    # Row k of Q has rhs b_k + eps^(k+1); basis rows carry the top degrees.
    tab = _Tableau(Q.A, qbasis, c, d)
    trace = PivotTrace()
    lam = Fraction(0)
    first = True
    while True:
        if check_invariants:
            tab.check()
            coeffs = [(1 - lam) * a + lam * b for a, b in zip(tab.c, tab.d)]
            assert all(x >= 0 for x in coeffs), "c_lambda left the basis cone"
        cand = []
        for k in range(n):
            ck, dk = tab.c[k], tab.d[k]
            if ck > dk:
                cand.append((ck / (ck - dk), k))
        if not cand:
            break
        cand.sort()
        lam_star, pos = cand[0]
        if lam_star >= 1:
            break
        if len(cand) > 1 and cand[1][0] == lam_star:
            raise DegenerateSegment(f"two basis rows leave at lambda = {lam_star}")
        if not first and lam_star == lam:
            raise DegenerateSegment(f"segment runs along a cone face at lambda = {lam_star}")
        # Perturbed vertex in transformed coordinates is y_k = rhs[basis[k]].
        in_basis = set(tab.basis)
        best = None
        for j in range(m):
            if j in in_basis:
                continue
            a = tab.rows[j]
            if a[pos] >= 0:
                continue
            # (<a'_j, y> - b_j - eps^(j+1)) / a'_j[pos]
            terms = {j + 1: Fraction(-1)}
            const = -Q.b[j]
            for k in range(n):
                if a[k]:
                    const += a[k] * Q.b[tab.basis[k]]
                    terms[tab.basis[k] + 1] = a[k]
            terms[0] = const
            ratio = EpsPoly(terms).scale(1 / a[pos])
            if best is None or ratio < best[0]:
                best = (ratio, j)
            else:
                assert ratio != best[0], "ratio tie in a simple perturbed polyhedron"
        tab.ops += m * n
        if best is None:
            x = basis_point(Q, tab.basis)
            ray = tuple(-tab.U[r][pos] for r in range(n))
            raise UnboundedDirection(
                "objective leaves the support of the normal fan",
                basis=sorted(perm[i] for i in tab.basis),
                point=x,
                ray=ray,
                lam=lam_star,
            )
        j_star = best[1]
        leave = perm[tab.basis[pos]]
        tab.pivot(pos, j_star)
        lam = lam_star
        first = False
        trace.records.append(
            PivotRecord(lam_star, leave, perm[j_star], tuple(sorted(perm[i] for i in tab.basis)))
        )
    trace.ops = tab.ops
    return sorted(perm[i] for i in tab.basis), trace


def follow_segment_chain(P, waypoints, basis, *, check_invariants=False):
    """Run shadow_simplex along consecutive waypoint pairs, chaining bases."""
    trace = PivotTrace()
    basis = list(basis)
    for leg, (w0, w1) in enumerate(zip(waypoints, waypoints[1:])):
        basis, t = shadow_simplex(P, w0, w1, basis, check_invariants=check_invariants)
        trace.extend(t, leg=leg)
    return basis, trace
