"""Turn a pointed polyhedron into an LP-equivalent polytope.

Right-hand sides that involve square roots are replaced by rational upper
bounds; enlarging them keeps the new constraints strictly slack at every
original vertex.
"""
from dataclasses import dataclass, field
from fractions import Fraction

from . import numeric as nm
from .exceptions import InfeasibleBasis
from .geometry import is_feasible_basis

# Extra slack added to every new right-hand side.  Without it a polyhedron with
# b_max = 0 (a pointed cone) would be cut down to its apex.
MARGIN = Fraction(1)


@dataclass
class BoundingReport:
    mode: str
    original_m: int
    added_rows: list
    added_rhs: list
    b_max_sq: Fraction
    delta_sq: Fraction
    claimed_delta_sq: Fraction
    basis: list = field(default_factory=list)

    def to_json(self):
        return {
            "mode": self.mode,
            "original_m": self.original_m,
            "added_rows": [[nm.fmt(x) for x in r] for r in self.added_rows],
            "added_rhs": [nm.fmt(x) for x in self.added_rhs],
            "b_max_sq": nm.fmt(self.b_max_sq),
            "delta_sq": nm.fmt(self.delta_sq),
            "claimed_delta_sq": nm.fmt(self.claimed_delta_sq),
            "basis": list(self.basis),
        }


def compute_b_max(P):
    """max_i b_i^2 / ||a_i||^2, i.e. the square of max |b_i| / ||a_i||."""
    return max(bi * bi / nm.norm_sq(ai) for ai, bi in zip(P.A, P.b))


def vertex_norm_bound_sq(P, delta_sq):
    """Square of n * b_max / delta, the bound on every vertex norm."""
    return P.n**2 * compute_b_max(P) / nm.frac(delta_sq)


def bound_local(P, basis, delta_sq, denom=nm.DEFAULT_DENOM):
    """Append <w, x> <= rhs with w = -(1/n) sum_{i in I} a_i/||a_i||.

    The result satisfies local (delta^2 / 2n)-distance, so its squared local
    delta is at least (delta_sq / 2n)^2.
    """
    basis = list(basis)
    if not is_feasible_basis(P, basis):
        raise InfeasibleBasis(f"basis {basis} is not feasible")
    delta_sq = nm.frac(delta_sq)
    n = P.n
    q = [nm.inv_sqrt_floor(nm.norm_sq(P.A[i]), denom) for i in basis]
    w = nm.scale(nm.lincomb(q, [P.A[i] for i in basis]), Fraction(-1, n))
    b_max_sq = compute_b_max(P)
    rhs = nm.sqrt_ceil(n * n * b_max_sq / delta_sq, denom) + MARGIN
    Pb = P.with_rows([w], [rhs])
    claimed = (delta_sq / (2 * n)) ** 2
    return Pb, BoundingReport("local", P.m, [w], [rhs], b_max_sq, delta_sq, claimed, basis)


def bound_global(P, delta_sq, denom=nm.DEFAULT_DENOM):
    """Append <-a_i, x> <= n ||a_i|| b_max / delta + 1 for every row i."""
    delta_sq = nm.frac(delta_sq)
    n = P.n
    b_max_sq = compute_b_max(P)
    rows, rhs = [], []
    for a in P.A:
        bound = nm.sqrt_ceil(n * n * nm.norm_sq(a) * b_max_sq / delta_sq, denom)
        rows.append(nm.scale(a, -1))
        rhs.append(bound + MARGIN)
    Pb = P.with_rows(rows, rhs)
    return Pb, BoundingReport("global", P.m, rows, rhs, b_max_sq, delta_sq, delta_sq)
