"""Polynomials in a symbolic infinitesimal eps, ordered lexicographically.

A value ``p = c0 + c1 eps^d1 + ...`` is compared with ``q`` by the sign of the
lowest-degree coefficient of ``p - q``; this is the order of real numbers
``p(eps)`` vs ``q(eps)`` for all sufficiently small ``eps > 0``.
"""
from fractions import Fraction
from functools import total_ordering

from .numeric import fmt, frac

LT, EQ, GT = -1, 0, 1


@total_ordering
class EpsPoly:
    """Sparse univariate polynomial over Q in eps; immutable."""

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        if isinstance(terms, dict):
            items = terms.items()
        else:
            items = terms
        acc = {}
        for deg, coef in items:
            if deg < 0:
                raise ValueError("negative degree")
            acc[deg] = acc.get(deg, Fraction(0)) + frac(coef)
        self.terms = tuple(sorted((d, c) for d, c in acc.items() if c != 0))

    @classmethod
    def const(cls, c):
        return cls(((0, c),))

    @classmethod
    def monomial(cls, deg, coef=1):
        return cls(((deg, coef),))

    @property
    def constant(self):
        if self.terms and self.terms[0][0] == 0:
            return self.terms[0][1]
        return Fraction(0)

    @property
    def degree(self):
        return self.terms[-1][0] if self.terms else 0

    def __len__(self):
        return len(self.terms)

    def sign(self):
        return 0 if not self.terms else (1 if self.terms[0][1] > 0 else -1)

    def __add__(self, other):
        if not isinstance(other, EpsPoly):
            other = EpsPoly.const(other)
        return EpsPoly(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return EpsPoly(tuple((d, -c) for d, c in self.terms))

    def __sub__(self, other):
        if not isinstance(other, EpsPoly):
            other = EpsPoly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, r):
        r = frac(r)
        if r == 0:
            return EpsPoly()
        return EpsPoly(tuple((d, c * r) for d, c in self.terms))

    def __mul__(self, r):
        if isinstance(r, EpsPoly):
            return NotImplemented
        return self.scale(r)

    __rmul__ = __mul__

    def __truediv__(self, r):
        return self.scale(1 / frac(r))

    def __eq__(self, other):
        if not isinstance(other, EpsPoly):
            other = EpsPoly.const(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __lt__(self, other):
        return lex_compare(self, other) == LT

    def evaluate(self, eps):
        return sum(c * eps**d for d, c in self.terms)

    def __repr__(self):
        return f"EpsPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for d, c in self.terms:
            parts.append(fmt(c) if d == 0 else f"{fmt(c)}*e^{d}")
        return " + ".join(parts)


def lex_compare(p, q):
    """Return LT, EQ or GT for p vs q under the small-eps order."""
    if not isinstance(p, EpsPoly):
        p = EpsPoly.const(p)
    if not isinstance(q, EpsPoly):
        q = EpsPoly.const(q)
    # Merge-walk both term lists instead of materializing p - q.
    i = j = 0
    pt, qt = p.terms, q.terms
    while i < len(pt) or j < len(qt):
        dp = pt[i][0] if i < len(pt) else None
        dq = qt[j][0] if j < len(qt) else None
        if dq is None or (dp is not None and dp < dq):
            return GT if pt[i][1] > 0 else LT
        if dp is None or dq < dp:
            return LT if qt[j][1] > 0 else GT
        a, b = pt[i][1], qt[j][1]
        if a != b:
            return GT if a > b else LT
        i += 1
        j += 1
    return EQ


def axpy(a, x, y):
    """Elementwise a*x + y over sequences of EpsPoly."""
    return [xi.scale(a) + yi for xi, yi in zip(x, y)]


def perturbed_rhs(b):
    """b_i + eps^i for i = 1..m (degrees follow the given row order)."""
    return [EpsPoly(((0, bi), (i + 1, 1))) for i, bi in enumerate(b)]
