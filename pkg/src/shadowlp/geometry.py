"""Polyhedra, bases, delta-distance and width certificates.

All distances and widths are carried as exact squared rationals (``delta_sq``,
``tau_sq``, ``radius_sq``) so no square root is ever needed on the
certification path.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from . import numeric as nm
from .exceptions import (
    DependentRows,
    NoFeasibleBasis,
    NonIntegralMatrix,
    NotPerfectMatching,
    NotPointed,
    SingularBasis,
    SingularMatrix,
)


@dataclass(frozen=True)
class Polyhedron:
    """P = {x : A x <= b} with A of full column rank."""

    A: tuple
    b: tuple
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        A = nm.matrix(self.A)
        b = nm.vector(self.b)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        if len(A) != len(b):
            raise ValueError(f"A has {len(A)} rows but b has {len(b)} entries")
        if not A or not A[0]:
            raise ValueError("empty constraint matrix")
        if nm.rank(A) != len(A[0]):
            raise NotPointed("constraint matrix must have full column rank")

    @property
    def m(self):
        return len(self.A)

    @property
    def n(self):
        return len(self.A[0])

    def slack(self, x):
        return tuple(bi - nm.dot(ai, x) for ai, bi in zip(self.A, self.b))

    def contains(self, x):
        return all(s >= 0 for s in self.slack(x))

    def tight_rows(self, x):
        return tuple(i for i, s in enumerate(self.slack(x)) if s == 0)

    def subsystem(self, rows):
        return Polyhedron(nm.submatrix(self.A, rows), tuple(self.b[i] for i in rows))

    def with_rows(self, extra_A, extra_b):
        return Polyhedron(self.A + nm.matrix(extra_A), self.b + nm.vector(extra_b))


# --- bases ------------------------------------------------------------------

def basis_point(P, basis):
    """The point A_B^{-1} b_B; raises SingularBasis for dependent rows."""
    try:
        return nm.solve_square(nm.submatrix(P.A, basis), [P.b[i] for i in basis])
    except SingularMatrix:
        raise SingularBasis(f"rows {list(basis)} are dependent") from None


def is_feasible_basis(P, basis):
    try:
        x = basis_point(P, basis)
    except SingularBasis:
        return False
    return P.contains(x)


def iter_bases(A):
    """All index sets of n linearly independent rows, in lexicographic order."""
    n = len(A[0])
    for idx in combinations(range(len(A)), n):
        if nm.det(nm.submatrix(A, idx)) != 0:
            yield idx


def feasible_bases(P):
    for B in iter_bases(P.A):
        if P.contains(basis_point(P, B)):
            yield B


def first_feasible_basis(P):
    for B in feasible_bases(P):
        return list(B)
    raise NoFeasibleBasis("polyhedron has no vertex")


def normal_cone_membership(P, basis, c):
    """True iff c is a nonnegative combination of the basis rows."""
    AB = nm.submatrix(P.A, basis)
    try:
        lam = nm.solve_square(nm.transpose(AB), nm.vector(c))
    except SingularMatrix:
        raise SingularBasis(f"rows {list(basis)} are dependent") from None
    return all(x >= 0 for x in lam)


def recession_rays(A):
    """Extreme rays of the pointed cone {x : A x <= 0} (empty iff bounded)."""
    n = len(A[0])
    rays = set()
    for S in combinations(range(len(A)), n - 1):
        rows = nm.submatrix(A, S)
        if rows and nm.rank(rows) != n - 1:
            continue
        ns = nm.nullspace(rows, n)
        if len(ns) != 1:
            continue
        r = ns[0]
        for cand in (r, nm.scale(r, -1)):
            if all(nm.dot(a, cand) <= 0 for a in A):
                # canonical scaling for deduplication
                lead = next(x for x in cand if x != 0)
                rays.add(nm.scale(cand, 1 / abs(lead)))
    return sorted(rays)


def is_bounded(P):
    return not recession_rays(P.A)


# --- delta-distance ---------------------------------------------------------

def delta_of_basis(rows):
    """Squared delta of n independent rows (normalization is implicit).

    With R the row matrix and u_j the columns of R^{-1}, the normalized rows
    have inverse columns ||a_j|| u_j, so delta^2 = min_j 1/(||a_j||^2 ||u_j||^2).
    """
    R = nm.matrix(rows)
    try:
        cols = nm.inverse_columns(R)
    except SingularMatrix:
        raise DependentRows("rows are linearly dependent") from None
    return min(1 / (nm.norm_sq(a) * nm.norm_sq(u)) for a, u in zip(R, cols))


def subset_delta_sq(rows):
    """Squared delta of any independent set of k <= n rows.

    Uses the Gram matrix G: the squared distance of row i to the span of the
    others is 1 / (G^{-1})_{ii}.
    """
    R = nm.matrix(rows)
    if len(R) == 1:
        if nm.norm_sq(R[0]) == 0:
            raise DependentRows("zero row")
        return Fraction(1)
    G = nm.matmul(R, nm.transpose(R))
    try:
        Gi = nm.inverse(G)
    except SingularMatrix:
        raise DependentRows("rows are linearly dependent") from None
    return min(1 / (nm.norm_sq(R[i]) * Gi[i][i]) for i in range(len(R)))


def local_delta_witness(P):
    """(delta^2, basis) minimizing delta over all feasible bases."""
    best = None
    for B in feasible_bases(P):
        d = delta_of_basis(nm.submatrix(P.A, B))
        if best is None or d < best[0]:
            best = (d, list(B))
    if best is None:
        raise NoFeasibleBasis("polyhedron has no vertex")
    return best


def local_delta(P):
    return local_delta_witness(P)[0]


def global_delta_witness(A):
    A = nm.matrix(A)
    best = None
    # Distances to a span only shrink when the span grows, so the minimum over
    # all independent subsets is attained on subsets extended to full bases.
    for B in iter_bases(A):
        d = delta_of_basis(nm.submatrix(A, B))
        if best is None or d < best[0]:
            best = (d, list(B))
    if best is None:
        raise NotPointed("matrix has no basis")
    return best


def global_delta(A):
    return global_delta_witness(A)[0]


# --- width certificates -----------------------------------------------------

@dataclass(frozen=True)
class WidthCertificate:
    """A ball ``center + radius * B`` inside a simplicial cone.

    ``radius_sq`` is verified exactly against the cone's facet normals.
    ``nominal_radius_sq`` is delta^2/n^2; it equals ``radius_sq`` whenever the
    generator norms are exactly representable.
    """

    center: tuple
    radius_sq: Fraction
    delta_sq: Fraction
    nominal_radius_sq: Fraction
    generators: tuple

    def duals(self):
        return nm.inverse_columns(self.generators)

    def verify(self):
        if nm.norm_sq(self.center) > 1:
            return False
        for u in self.duals():
            t = nm.dot(u, self.center)
            if t < 0 or t * t < nm.norm_sq(u) * self.radius_sq:
                return False
        return True

    def to_json(self, witness_basis=None):
        return {
            "delta_sq": nm.fmt(self.delta_sq),
            "tau_sq": nm.fmt(self.radius_sq),
            "center": [nm.fmt(x) for x in self.center],
            "witness_basis": list(witness_basis) if witness_basis is not None else [],
        }


def width_certificate_of_cone(generators, denom=nm.DEFAULT_DENOM):
    """Certify cone(v_1..v_n) contains a ball around the mean of the unit generators.

    Unit generators are v_i = g_i/||g_i||; each 1/||g_i|| is rounded down to a
    rational so the center keeps norm <= 1, and the certified radius is then
    the exact distance from that center to the nearest facet.
    """
    G = nm.matrix(generators)
    n = len(G)
    delta_sq = delta_of_basis(G)
    q = [nm.inv_sqrt_floor(nm.norm_sq(g), denom) for g in G]
    center = nm.scale(nm.lincomb(q, G), Fraction(1, n))
    duals = nm.inverse_columns(G)
    radius_sq = min(nm.dot(u, center) ** 2 / nm.norm_sq(u) for u in duals)
    cert = WidthCertificate(center, radius_sq, delta_sq, delta_sq / (n * n), G)
    assert cert.verify()
    return cert


def cone_width_sq(facet_normals, direction):
    """Squared radius of the largest ball about ``direction/||direction||``
    inside {x : <f, x> >= 0 for all inner facet normals f}.  Exact.
    """
    s = nm.vector(direction)
    ss = nm.norm_sq(s)
    best = None
    for f in facet_normals:
        t = nm.dot(f, s)
        if t <= 0:
            return Fraction(0)
        r = t * t / (nm.norm_sq(f) * ss)
        best = r if best is None else min(best, r)
    return best


# --- subdeterminants ---------------------------------------------------------

def max_subdeterminant(A, k):
    """max |det| over all k x k submatrices (k = 0 gives 1)."""
    A = nm.matrix(A)
    if k == 0:
        return Fraction(1)
    m, n = nm.shape(A)
    best = Fraction(0)
    for rows in combinations(range(m), k):
        for cols in combinations(range(n), k):
            best = max(best, abs(nm.det(nm.submatrix(A, rows, cols))))
    return best


def max_all_subdeterminants(A):
    """Largest |det| over square submatrices of every size."""
    A = nm.matrix(A)
    m, n = nm.shape(A)
    return max(max_subdeterminant(A, k) for k in range(1, min(m, n) + 1))


@dataclass(frozen=True)
class SubdeterminantBound:
    delta: Fraction
    tau: Fraction
    max_entry: Fraction
    max_minor: Fraction

    @property
    def delta_sq(self):
        return self.delta * self.delta

    @property
    def tau_sq(self):
        return self.tau * self.tau


def delta_from_subdeterminants(A):
    """Lower bounds delta >= 1/(n D1 Dn-1) and tau >= 1/(n^2 D1 Dn-1)."""
    A = nm.matrix(A)
    if any(x.denominator != 1 for row in A for x in row):
        raise NonIntegralMatrix("matrix must be integral")
    n = len(A[0])
    d1 = max(abs(x) for row in A for x in row)
    dn1 = max_subdeterminant(A, n - 1)
    if d1 == 0 or dn1 == 0:
        raise DependentRows("matrix has no nonzero (n-1)-minor")
    return SubdeterminantBound(
        delta=1 / (n * d1 * dn1), tau=1 / (n * n * d1 * dn1), max_entry=d1, max_minor=dn1
    )


# --- perfect matching polytope ------------------------------------------------

def _edge(u, v):
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class MatchingInstance:
    num_vertices: int
    edges: tuple
    matching: tuple

    def __post_init__(self):
        edges = tuple(_edge(*e) for e in self.edges)
        matching = tuple(_edge(*e) for e in self.matching)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "matching", matching)
        es = set(edges)
        covered = [v for e in matching for v in e]
        if (
            self.num_vertices % 2
            or len(matching) * 2 != self.num_vertices
            or sorted(covered) != list(range(self.num_vertices))
            or not set(matching) <= es
        ):
            raise NotPerfectMatching("matching must cover every vertex exactly once")

    @classmethod
    def complete(cls, num_vertices, matching=None):
        edges = tuple(combinations(range(num_vertices), 2))
        if matching is None:
            matching = tuple((2 * k, 2 * k + 1) for k in range(num_vertices // 2))
        return cls(num_vertices, edges, matching)


def perfect_matchings(num_vertices, edges):
    """Enumerate all perfect matchings as sorted tuples of edges."""
    adj = {v: [] for v in range(num_vertices)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    out = []

    def rec(free, acc):
        if not free:
            out.append(tuple(sorted(acc)))
            return
        u = min(free)
        for v in adj[u]:
            if v in free and v != u:
                rec(free - {u, v}, acc + [_edge(u, v)])

    rec(frozenset(range(num_vertices)), [])
    return out


def _is_single_cycle(edge_set):
    if not edge_set:
        return False
    deg = {}
    for u, v in edge_set:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    if any(d != 2 for d in deg.values()):
        return False
    start = next(iter(deg))
    seen, stack = {start}, [start]
    while stack:
        x = stack.pop()
        for u, v in edge_set:
            for a, b in ((u, v), (v, u)):
                if a == x and b not in seen:
                    seen.add(b)
                    stack.append(b)
    return len(seen) == len(deg)


@dataclass(frozen=True)
class MatchingCertificate:
    w: tuple  # aligned with instance.edges
    odd_sets: tuple
    radius_sq: int
    norm_sq: int
    nonneg_edges: tuple = ()  # off-matching edges topped up with -2 * e_e

    @property
    def tau_sq(self):
        return Fraction(self.radius_sq, self.norm_sq)


def matching_width_certificate(G):
    """Ball of radius 2 about w = sum of -chi(delta(U)) over tight 3-sets U.

    The matching edges are labelled u_k v_k in the order given; the tight odd
    sets are {u_k, v_k, u_{k+1}} and {u_k, v_k, v_{k+1}} (indices mod n).

    With only two matching edges those sets are the complements of single
    vertices, and an off-matching edge can lie inside two of them, leaving
    w(e) = -2.  Such edges get twice the tight row -e_e (from x(e) >= 0), which
    keeps w in the normal cone and restores w(e) = -4.
    """
    M = G.matching
    n = len(M)
    if n < 2:
        raise NotPerfectMatching("need at least two matching edges for 3-element odd sets")
    odd_sets = []
    for k in range(n):
        u, v = M[k]
        nxt = M[(k + 1) % n]
        for w in nxt:
            odd_sets.append(frozenset((u, v, w)))
    mset = set(M)
    w, topped = [], []
    for e in G.edges:
        a, b = e
        crossing = sum(1 for U in odd_sets if (a in U) != (b in U))
        if e not in mset and crossing == 2:
            crossing += 2
            topped.append(e)
        w.append(-crossing)
    for e, we in zip(G.edges, w):
        if e in mset:
            assert we == -2, (e, we)
        else:
            assert we in (-4, -6), (e, we)
    norm_sq = sum(x * x for x in w)
    return MatchingCertificate(tuple(w), tuple(odd_sets), 4, norm_sq, tuple(topped))


def matching_adjacency_checks(G, cert):
    """For each matching N adjacent to M, yield (N, <v, w>, |C|).

    v is the edge direction from chi_N to chi_M: +1 on C & M, -1 on C - M.
    """
    index = {e: i for i, e in enumerate(G.edges)}
    mset = set(G.matching)
    for N in perfect_matchings(G.num_vertices, G.edges):
        C = mset.symmetric_difference(N)
        if not _is_single_cycle(C):
            continue
        inner = sum((cert.w[index[e]] if e in mset else -cert.w[index[e]]) for e in C)
        yield N, inner, len(C)
