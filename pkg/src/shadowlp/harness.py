"""Brute-force oracles, instance generators and the experiment drivers."""
import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import numeric as nm
from .exceptions import BadParams, DegenerateSegment, RetriesExhausted, Unbounded
from .geometry import (
    Polyhedron,
    basis_point,
    cone_width_sq,
    delta_from_subdeterminants,
    feasible_bases,
    global_delta,
    is_bounded,
    local_delta,
    width_certificate_of_cone,
)
from .pivot import follow_segment_chain
from .sampler import make_rng, rationalize, sample_conditioned, sample_exponential


# --- oracles ----------------------------------------------------------------

@dataclass(frozen=True)
class Vertex:
    point: tuple
    tight: tuple
    bases: tuple


def enumerate_vertices(P):
    """Every vertex with its full tight set and all feasible bases defining it."""
    found = {}
    for B in feasible_bases(P):
        x = basis_point(P, B)
        found.setdefault(x, []).append(B)
    return [Vertex(x, P.tight_rows(x), tuple(bs)) for x, bs in found.items()]


def adjacent(P, v, w):
    """Vertices are adjacent iff their common tight rows have rank n - 1."""
    if v.point == w.point:
        return False
    if P.n == 1:
        return True
    common = sorted(set(v.tight) & set(w.tight))
    return bool(common) and nm.rank(nm.submatrix(P.A, common)) == P.n - 1


def vertex_edges(P, verts):
    return [(i, j) for i, j in combinations(range(len(verts)), 2) if adjacent(P, verts[i], verts[j])]


@dataclass(frozen=True)
class BruteForceOptimum:
    vertices: tuple
    value: Fraction

    @property
    def vertex(self):
        return self.vertices[0]


def brute_force_optimize(P, c):
    """Exact maximum of <c, x> over the vertices; ties are all reported."""
    if not is_bounded(P):
        raise Unbounded("polyhedron is unbounded")
    c = nm.vector(c)
    verts = enumerate_vertices(P)
    if not verts:
        raise BadParams("polyhedron is empty")
    vals = [nm.dot(c, v.point) for v in verts]
    best = max(vals)
    return BruteForceOptimum(tuple(v.point for v, x in zip(verts, vals) if x == best), best)


# --- normal fan ---------------------------------------------------------------

class MeasureZeroEvent(Exception):
    """A segment touched a lower-dimensional face of the fan."""


def _scale_to_int(vectors):
    den = 1
    for v in vectors:
        for x in v:
            den = math.lcm(den, Fraction(x).denominator)
    return [tuple(int(Fraction(x) * den) for x in v) for v in vectors]


def _idot(u, v):
    return sum(a * b for a, b in zip(u, v))


class NormalFan:
    """The normal fan of a polytope, materialized from its vertex enumeration.

    Cone N_v = {c : <c, v - w> >= 0 for every neighbour w}; the fan facets are
    the polytope edges.  Vertices are scaled to a common integer lattice so
    crossing tests are pure integer arithmetic.
    """

    def __init__(self, P):
        if not is_bounded(P):
            raise Unbounded("normal fan of an unbounded polyhedron does not cover R^n")
        self.P = P
        self.n = P.n
        self.vertices = enumerate_vertices(P)
        self.V = _scale_to_int([v.point for v in self.vertices])
        self.edges = vertex_edges(P, self.vertices)
        self.neighbours = {i: [] for i in range(len(self.vertices))}
        for i, j in self.edges:
            self.neighbours[i].append(j)
            self.neighbours[j].append(i)

    def width_sq(self, denom=nm.DEFAULT_DENOM):
        """Exact tau^2: each cone's ball is centered on the unit vector along the
        sum of its (rationally normalized) tight rows."""
        best = None
        for i, v in enumerate(self.vertices):
            rows = [self.P.A[t] for t in v.tight]
            q = [nm.inv_sqrt_floor(nm.norm_sq(a), denom) for a in rows]
            s = nm.lincomb(q, rows)
            normals = [nm.sub(v.point, self.vertices[j].point) for j in self.neighbours[i]]
            r = cone_width_sq(normals, s)
            best = r if best is None else min(best, r)
        return best

    def _ints(self, p, q):
        ip, iq = _scale_to_int([p, q])
        return ip, iq

    def argmax(self, c):
        vals = [_idot(c, v) for v in self.V]
        top = max(vals)
        winners = [i for i, x in enumerate(vals) if x == top]
        if len(winners) != 1:
            raise MeasureZeroEvent("objective on a fan facet")
        return winners[0]

    def crossings(self, p, q):
        """Facets crossed by the segment [p, q]: (count, per-vertex incidences)."""
        p, q = self._ints(p, q)
        incid = [0] * len(self.V)
        count = 0
        for i, j in self.edges:
            g = tuple(b - a for a, b in zip(self.V[i], self.V[j]))
            s0, s1 = _idot(p, g), _idot(q, g)
            if s0 == 0 and s1 == 0:
                raise MeasureZeroEvent("segment inside a facet hyperplane")
            if s0 * s1 > 0:
                continue
            # positive multiple of the point where <c, g> = 0
            z = tuple(-s1 * a + s0 * b for a, b in zip(p, q))
            if s0 - s1 < 0:
                z = tuple(-x for x in z)
            vals = [_idot(z, v) for v in self.V]
            top = vals[i]
            if any(x > top for x in vals):
                continue
            if s0 == 0 or s1 == 0 or sum(1 for x in vals if x == top) > 2:
                raise MeasureZeroEvent("segment meets a lower-dimensional face")
            count += 1
            incid[i] += 1
            incid[j] += 1
        return count, incid

    def crossings_sweep(self, p, q):
        """Independent count: sort all hyperplane parameters, compare argmax
        vertices on consecutive intervals."""
        p, q = self._ints(p, q)
        params = {Fraction(0), Fraction(1)}
        for i, j in self.edges:
            g = tuple(b - a for a, b in zip(self.V[i], self.V[j]))
            s0, s1 = _idot(p, g), _idot(q, g)
            if s0 != s1:
                lam = Fraction(s0, s0 - s1)
                if 0 < lam < 1:
                    params.add(lam)
        pts = sorted(params)
        winners = []
        for a, b in zip(pts, pts[1:]):
            mid = (a + b) / 2
            num, den = mid.numerator, mid.denominator
            c = tuple((den - num) * x + num * y for x, y in zip(p, q))
            winners.append(self.argmax(c))
        return sum(1 for a, b in zip(winners, winners[1:]) if a != b)


# --- crossing experiments ---------------------------------------------------------

@dataclass
class CrossingReport:
    kind: str
    counts: list
    raw_counts: list
    bound: float
    params: dict = field(default_factory=dict)
    resamples: int = 0
    oracle_checked: int = 0

    @property
    def trials(self):
        return len(self.counts)

    @property
    def mean(self):
        return float(np.mean(self.counts))

    @property
    def raw_mean(self):
        return float(np.mean(self.raw_counts))

    @property
    def stderr(self):
        if len(self.counts) < 2:
            return 0.0
        return float(np.std(self.counts, ddof=1) / math.sqrt(len(self.counts)))

    @property
    def passed(self):
        return self.mean <= self.bound + 3 * self.stderr

    def summary(self):
        return {
            "kind": self.kind,
            "trials": self.trials,
            "mean": self.mean,
            "raw_mean": self.raw_mean,
            "stderr": self.stderr,
            "bound": self.bound,
            "passed": self.passed,
            "resamples": self.resamples,
            "oracle_checked": self.oracle_checked,
            "params": self.params,
        }

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["trial", "crossings", "raw_incidences"])
        for t, (a, b) in enumerate(zip(self.counts, self.raw_counts)):
            w.writerow([t, a, b])
        return buf.getvalue()


def _segment(kind, params, X):
    if kind == "crossings-shifted":
        return nm.add(params["c"], X), nm.add(params["d"], X)
    return nm.add(params["c"], nm.scale(X, params["alpha"])), nm.add(params["c"], X)


def _one_trial(fan, kind, params, seed_seq, check_oracle, denom):
    """Crossings for one trial; returns (count, raw incidences, resamples, checked)."""
    rng = np.random.default_rng(seed_seq)
    resamples = 0
    while True:
        X = rationalize(sample_exponential(fan.n, rng).x, denom)
        p, q = _segment(kind, params, X)
        try:
            k, incid = fan.crossings(p, q)
            if check_oracle:
                other = fan.crossings_sweep(p, q)
                if other != k:
                    raise AssertionError(f"crossing counter {k} != sweep oracle {other}")
        except MeasureZeroEvent:
            resamples += 1
            continue
        return k, sum(incid), resamples, int(check_oracle)


def _run_trials(fan, kind, params, seed, trials, check_oracle, denom, workers):
    if trials < 1:
        raise BadParams("trial count must be >= 1")
    seeds = np.random.SeedSequence(seed).spawn(trials)
    args = (fan, kind, params)
    if workers and workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as ex:
            futs = [ex.submit(_one_trial, *args, s, check_oracle, denom) for s in seeds]
            rows = [f.result() for f in futs]
    else:
        rows = [_one_trial(*args, s, check_oracle, denom) for s in seeds]
    counts = [r[0] for r in rows]
    raw = [r[1] for r in rows]
    return counts, raw, sum(r[2] for r in rows), sum(r[3] for r in rows)


def crossings_shifted(fan, c, d, trials, seed, tau_sq, check_oracle=False, denom=2**32, workers=None):
    """Crossings of [c + X, d + X] against the bound ||d - c|| / tau."""
    c, d = nm.vector(c), nm.vector(d)
    tau_sq = nm.frac(tau_sq)
    bound = math.sqrt(nm.norm_sq(nm.sub(d, c))) / math.sqrt(tau_sq)
    kind = "crossings-shifted"
    counts, raw, res, chk = _run_trials(fan, kind, {"c": c, "d": d}, seed, trials, check_oracle, denom, workers)
    params = {"c": [nm.fmt(x) for x in c], "d": [nm.fmt(x) for x in d], "tau_sq": nm.fmt(tau_sq), "seed": seed}
    return CrossingReport(kind, counts, raw, bound, params, res, chk)


def crossings_scaled(fan, c, alpha, trials, seed, tau_sq, check_oracle=False, denom=2**32, workers=None):
    """Crossings of [c + alpha X, c + X] against (2n / tau) ln(1 / alpha)."""
    c = nm.vector(c)
    tau_sq = nm.frac(tau_sq)
    a = Fraction(alpha).limit_denominator(denom) if isinstance(alpha, float) else nm.frac(alpha)
    if not 0 < a < 1:
        raise BadParams("alpha must lie in (0, 1)")
    bound = 2 * fan.n / math.sqrt(tau_sq) * math.log(1 / float(a))
    kind = "crossings-scaled"
    counts, raw, res, chk = _run_trials(fan, kind, {"c": c, "alpha": a}, seed, trials, check_oracle, denom, workers)
    params = {"c": [nm.fmt(x) for x in c], "alpha": nm.fmt(a), "tau_sq": nm.fmt(tau_sq), "seed": seed}
    return CrossingReport(kind, counts, raw, bound, params, res, chk)


# --- diameter path ------------------------------------------------------------

def diameter_bound(n, tau_sq):
    tau = math.sqrt(tau_sq)
    return 8 * n / tau * (1 + math.log(1 / tau))


@dataclass
class DiameterPath:
    bases: list
    vertices: list
    pivots: int
    attempts: int

    @property
    def length(self):
        return len(self.vertices) - 1


def diameter_path(P, basis1, basis2, tau_sq=None, rng=None, retries=16, denom=nm.DEFAULT_DENOM):
    """Vertex path from basis1's vertex to basis2's along the three-leg shadow path
    [s c1, s c1 + X], [s c1 + X, s c2 + X], [s c2 + X, s c2] with s = 4n/||c2 - c1||.

    ``tau_sq`` is only recorded; the objectives c_i come from each basis cone's
    width certificate.
    """
    rng = make_rng(rng)
    n = P.n
    x1, x2 = basis_point(P, basis1), basis_point(P, basis2)
    if x1 == x2:
        return DiameterPath([list(basis1)], [x1], 0, 0)
    c1 = width_certificate_of_cone([P.A[i] for i in basis1], denom).center
    c2 = width_certificate_of_cone([P.A[i] for i in basis2], denom).center
    s = 4 * n * nm.inv_sqrt_floor(nm.norm_sq(nm.sub(c2, c1)), denom)
    sc1, sc2 = nm.scale(c1, s), nm.scale(c2, s)
    for attempt in range(1, retries + 1):
        X = rationalize(sample_conditioned(n, rng).x, denom)
        waypoints = [sc1, nm.add(sc1, X), nm.add(sc2, X), sc2]
        try:
            B, trace = follow_segment_chain(P, waypoints, basis1)
        except DegenerateSegment:
            continue
        break
    else:
        raise RetriesExhausted("diameter path: segment degenerate for every sample")
    bases = [list(basis1)] + [list(b) for b in trace.bases()]
    verts = [x1]
    for b in bases[1:]:
        x = basis_point(P, b)
        if x != verts[-1]:
            verts.append(x)
    if verts[-1] != x2:
        raise AssertionError("diameter path ended at the wrong vertex")
    return DiameterPath(bases, verts, trace.pivots, attempt)


def check_path(P, path, verts=None):
    """True iff consecutive path vertices are adjacent vertices of P."""
    verts = verts if verts is not None else enumerate_vertices(P)
    by_point = {v.point: v for v in verts}
    for a, b in zip(path.vertices, path.vertices[1:]):
        if a not in by_point or b not in by_point or not adjacent(P, by_point[a], by_point[b]):
            return False
    return True


# --- instance generators ----------------------------------------------------------

def cube(n):
    A, b = [], []
    for k in range(n):
        e = [0] * n
        e[k] = 1
        A.append(e)
        b.append(1)
    for k in range(n):
        e = [0] * n
        e[k] = -1
        A.append(e)
        b.append(0)
    return Polyhedron(A, b, {"kind": "cube", "n": n})


def simplex(n):
    A = [[-1 if j == k else 0 for j in range(n)] for k in range(n)] + [[1] * n]
    return Polyhedron(A, [0] * n + [1], {"kind": "simplex", "n": n})


def pyramid():
    """Square pyramid over [-1,1]^2 with apex (0,0,1); four rows are tight at the apex."""
    A = [[0, 0, -1], [1, 0, 1], [-1, 0, 1], [0, 1, 1], [0, -1, 1]]
    return Polyhedron(A, [0, 1, 1, 1, 1], {"kind": "pyramid", "n": 3})


def tu_interval(n):
    """Interval (consecutive-ones) rows plus nonnegativity; totally unimodular."""
    A, b = [], []
    for i in range(n):
        for j in range(i, n):
            A.append([1 if i <= k <= j else 0 for k in range(n)])
            b.append(j - i + 1)
    for k in range(n):
        A.append([-1 if j == k else 0 for j in range(n)])
        b.append(0)
    return Polyhedron(A, b, {"kind": "tu-interval", "n": n})


def _random_rows(rng, n, m, lo, hi, rational=False):
    rows = []
    while len(rows) < m:
        r = [int(x) for x in rng.integers(lo, hi + 1, size=n)]
        if any(r):
            if rational:
                den = int(rng.integers(1, 4))
                r = [Fraction(x, den) for x in r]
            rows.append(r)
    return rows


def random_polytope(n, m, rng, rational=True, entries=5):
    """Random bounded polytope with the origin in its interior."""
    rng = make_rng(rng)
    for _ in range(10_000):
        A = _random_rows(rng, n, m, -entries, entries, rational)
        b = [Fraction(int(rng.integers(1, 13)), int(rng.integers(1, 5))) if rational else int(rng.integers(1, 6)) for _ in range(m)]
        try:
            P = Polyhedron(A, b)
        except Exception:
            continue
        if is_bounded(P):
            return P
    raise BadParams("could not generate a bounded instance")


def random_unbounded(n, m, rng, entries=3):
    """Random pointed, unbounded, feasible polyhedron (integral data)."""
    rng = make_rng(rng)
    for _ in range(10_000):
        r = [int(x) for x in rng.integers(-3, 4, size=n)]
        if not any(r):
            continue
        A = []
        for row in _random_rows(rng, n, m, -entries, entries):
            if sum(a * x for a, x in zip(row, r)) > 0:
                row = [-a for a in row]
            A.append(row)
        b = [int(rng.integers(0, 5)) for _ in range(m)]
        try:
            P = Polyhedron(A, b)
        except Exception:
            continue
        if not is_bounded(P) and any(True for _ in feasible_bases(P)):
            return P
    raise BadParams("could not generate an unbounded instance")


def random_degenerate(n, m, rng, extra=2):
    """Random polytope plus ``extra`` redundant rows tight at one of its vertices."""
    rng = make_rng(rng)
    P = random_polytope(n, m, rng, rational=False, entries=3)
    verts = enumerate_vertices(P)
    v = verts[int(rng.integers(len(verts)))]
    A, b = list(P.A), list(P.b)
    for _ in range(extra):
        i, j = (int(t) for t in rng.choice(v.tight, size=2, replace=False))
        al, be = int(rng.integers(1, 4)), int(rng.integers(0, 4))
        A.append(nm.add(nm.scale(P.A[i], al), nm.scale(P.A[j], be)))
        b.append(al * P.b[i] + be * P.b[j])
    return Polyhedron(A, b, {"kind": "random-degenerate", "degenerate_vertex": [nm.fmt(x) for x in v.point]})


def random_integral(n, m, rng, entries=2, feasible=None):
    """Random integral system; ``feasible`` None leaves feasibility to chance."""
    rng = make_rng(rng)
    for _ in range(10_000):
        A = _random_rows(rng, n, m, -entries, entries)
        if feasible is True:
            x0 = [int(t) for t in rng.integers(-2, 3, size=n)]
            b = [sum(a * x for a, x in zip(row, x0)) + int(rng.integers(0, 3)) for row in A]
        else:
            b = [int(t) for t in rng.integers(-4, 5, size=m)]
        try:
            return Polyhedron(A, b)
        except Exception:
            continue
    raise BadParams("could not generate a full-rank integral instance")


KINDS = ("cube", "simplex", "pyramid", "tu-interval", "random-delta", "random-polytope",
         "random-unbounded", "random-degenerate")


def generate_instance(kind, params=None, rng=None):
    """Build an instance of the given kind with ground truth recorded in ``meta``
    (vertex count, squared global/local delta, subdeterminant bound, fan width)."""
    params = dict(params or {})
    rng = make_rng(rng)
    try:
        n = int(params.get("n", 3))
        m = int(params.get("m", 2 * n + 2))
        if n < 1 or m < n:
            raise BadParams(f"need 1 <= n <= m, got n={n}, m={m}")
        if kind == "cube":
            P = cube(n)
        elif kind == "simplex":
            P = simplex(n)
        elif kind == "pyramid":
            P = pyramid()
        elif kind == "tu-interval":
            P = tu_interval(n)
        elif kind in ("random-delta", "random-polytope"):
            P = random_polytope(n, m, rng, rational=kind == "random-polytope")
        elif kind == "random-unbounded":
            P = random_unbounded(n, m, rng)
        elif kind == "random-degenerate":
            P = random_degenerate(n, m, rng)
        else:
            raise BadParams(f"unknown instance kind {kind!r}")
    except BadParams:
        raise
    except (TypeError, ValueError) as exc:
        raise BadParams(str(exc)) from exc
    meta = dict(P.meta)
    meta.update(kind=kind, n=P.n, m=P.m)
    meta["vertices"] = len(enumerate_vertices(P))
    meta["global_delta_sq"] = nm.fmt(global_delta(P.A))
    if meta["vertices"]:
        meta["local_delta_sq"] = nm.fmt(local_delta(P))
    if all(x.denominator == 1 for row in P.A for x in row):
        meta["subdet_delta_sq"] = nm.fmt(delta_from_subdeterminants(P.A).delta_sq)
    if meta["vertices"] and is_bounded(P):
        meta["tau_sq"] = nm.fmt(NormalFan(P).width_sq())
    return Polyhedron(P.A, P.b, meta)


# --- instance files ---------------------------------------------------------------

def instance_to_json(P):
    return {
        "A": [[nm.fmt(x) for x in row] for row in P.A],
        "b": [nm.fmt(x) for x in P.b],
        "meta": P.meta,
    }


def instance_from_json(data):
    return Polyhedron(data["A"], data["b"], data.get("meta", {}))


def load_instance(path):
    with open(path) as fh:
        return instance_from_json(json.load(fh))


def save_instance(P, path):
    with open(path, "w") as fh:
        json.dump(instance_to_json(P), fh, indent=1)
        fh.write("\n")
