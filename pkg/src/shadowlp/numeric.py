"""Exact rational linear algebra.

Vectors are tuples of :class:`fractions.Fraction`, matrices are tuples of row
tuples.  Everything here is a pure function; nothing mutates its inputs.
"""
from fractions import Fraction
from math import isqrt

from .exceptions import SingularBasis, SingularMatrix

DEFAULT_DENOM = 2**64

Rational = Fraction


def frac(x):
    """Coerce ``x`` (int, Fraction, float or "p/q" string) to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def fmt(q):
    """Serialize a rational as ``"p/q"``, or ``"p"`` when the denominator is 1."""
    q = frac(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def vector(xs):
    return tuple(frac(x) for x in xs)


def matrix(rows):
    rows = tuple(vector(r) for r in rows)
    if rows and len({len(r) for r in rows}) != 1:
        raise ValueError("ragged matrix")
    return rows


def shape(M):
    return len(M), (len(M[0]) if M else 0)


def identity(n):
    one, zero = Fraction(1), Fraction(0)
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def transpose(M):
    return tuple(zip(*M))


def dot(u, v):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def norm_sq(v):
    return dot(v, v)


def add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def scale(v, s):
    return tuple(a * s for a in v)


def lincomb(coeffs, vectors):
    """Return sum(coeffs[i] * vectors[i])."""
    n = len(vectors[0])
    out = [Fraction(0)] * n
    for c, v in zip(coeffs, vectors):
        if c:
            for k in range(n):
                out[k] += c * v[k]
    return tuple(out)


def matvec(M, x):
    return tuple(dot(row, x) for row in M)


def vecmat(x, M):
    """Row vector times matrix: x^T M."""
    return lincomb(x, M)


def matmul(A, B):
    Bt = transpose(B)
    return tuple(tuple(dot(row, col) for col in Bt) for row in A)


def submatrix(M, rows, cols=None):
    if cols is None:
        return tuple(M[i] for i in rows)
    return tuple(tuple(M[i][j] for j in cols) for i in rows)


def rref(M):
    """Reduced row echelon form; returns (R, pivot_columns).

    Pivots are taken at the first nonzero entry in each column; exact
    arithmetic needs no magnitude pivoting.
    """
    R = [list(r) for r in M]
    rows, cols = len(R), (len(R[0]) if R else 0)
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(rows):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return tuple(tuple(row) for row in R), tuple(pivots)


def rank(M):
    if not M:
        return 0
    return len(rref(M)[1])


def nullspace(M, n=None):
    """Basis of {x : M x = 0} as a list of vectors."""
    if not M:
        return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    R, piv = rref(M)
    cols = len(M[0])
    free = [c for c in range(cols) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * cols
        x[f] = Fraction(1)
        for i, p in enumerate(piv):
            x[p] = -R[i][f]
        basis.append(tuple(x))
    return basis


def det(M):
    """Exact determinant by fraction-free style elimination over Q."""
    n = len(M)
    if n == 0:
        return Fraction(1)
    A = [list(r) for r in M]
    sign = 1
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            sign = -sign
        piv = A[c][c]
        result *= piv
        for i in range(c + 1, n):
            if A[i][c] != 0:
                f = A[i][c] / piv
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return sign * result


def inverse(M):
    n = len(M)
    if any(len(r) != n for r in M):
        raise ValueError("matrix is not square")
    aug = [list(M[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    R, piv = rref(aug)
    if piv[:n] != tuple(range(n)):
        raise SingularMatrix("matrix is singular")
    return tuple(tuple(row[n:]) for row in R)


def solve_square(M, rhs):
    """Unique x with M x = rhs."""
    n = len(M)
    if any(len(r) != n for r in M) or len(rhs) != n:
        raise ValueError("dimension mismatch")
    aug = [list(M[i]) + [frac(rhs[i])] for i in range(n)]
    R, piv = rref(aug)
    if piv[:n] != tuple(range(n)) or len(piv) > n:
        raise SingularMatrix("matrix is singular")
    return tuple(row[n] for row in R)


def inverse_columns(M):
    """Columns u_1..u_n of M^{-1}."""
    return list(transpose(inverse(M)))


def gauss_column_transform(A, basis):
    """Column-transform A so the rows indexed by ``basis`` become the identity.

    Returns ``(A @ U, U)`` with ``U = A_B^{-1}``; row ``basis[k]`` of the result
    is the k-th unit vector.  Objectives transform as ``c -> U^T c``.
    """
    AB = submatrix(A, basis)
    try:
        U = inverse(AB)
    except SingularMatrix:
        raise SingularBasis(f"basis rows {list(basis)} are linearly dependent") from None
    return matmul(A, U), U


# --- square roots bracketed by rationals -----------------------------------

def sqrt_floor(x, denom=DEFAULT_DENOM):
    """Largest k/denom with (k/denom)^2 <= x.  Exact when sqrt(x) is k/denom."""
    x = frac(x)
    if x < 0:
        raise ValueError("negative argument")
    k = isqrt((x.numerator * denom * denom) // x.denominator)
    return Fraction(k, denom)


def sqrt_ceil(x, denom=DEFAULT_DENOM):
    """Smallest k/denom with (k/denom)^2 >= x."""
    lo = sqrt_floor(x, denom)
    if lo * lo == frac(x):
        return lo
    return lo + Fraction(1, denom)


def inv_sqrt_floor(x, denom=DEFAULT_DENOM):
    """Rational lower bound on 1/sqrt(x) for x > 0."""
    return sqrt_floor(1 / frac(x), denom)
