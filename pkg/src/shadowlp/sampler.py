"""Samples from the density proportional to exp(-||x||) on R^n.

The density factors into a uniform direction and a radius with density
proportional to r^(n-1) e^(-r), i.e. Gamma(n, 1); the radius is drawn as a sum
of n standard exponentials.
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .numeric import DEFAULT_DENOM

MAX_ATTEMPTS = 10**6


@dataclass(frozen=True)
class ConeSample:
    x: np.ndarray
    norm: float
    seed: object = None
    attempts: int = 1

    def rational(self, denom=DEFAULT_DENOM):
        return rationalize(self.x, denom)


def make_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_exponential_batch(n, size, rng):
    """(size, n) array of independent draws; the rows' norms are Gamma(n)."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    rng = make_rng(rng)
    radius = rng.standard_exponential((size, n)).sum(axis=1)
    g = rng.standard_normal((size, n))
    lengths = np.linalg.norm(g, axis=1)
    # A zero Gaussian vector has probability 0; redraw defensively anyway.
    while np.any(lengths == 0):
        bad = lengths == 0
        g[bad] = rng.standard_normal((int(bad.sum()), n))
        lengths = np.linalg.norm(g, axis=1)
    return g / lengths[:, None] * radius[:, None]


def sample_exponential(n, rng, seed=None):
    x = sample_exponential_batch(n, 1, rng)[0]
    return ConeSample(x, float(np.linalg.norm(x)), seed)


def sample_conditioned(n, rng, bound=None, seed=None):
    """Rejection-sample until ||X|| <= bound (default 2n)."""
    if bound is None:
        bound = 2 * n
    for attempt in range(1, MAX_ATTEMPTS + 1):
        s = sample_exponential(n, rng, seed)
        if s.norm <= bound:
            return ConeSample(s.x, s.norm, seed, attempt)
    raise RuntimeError(f"no sample with norm <= {bound} after {MAX_ATTEMPTS} attempts")


def acceptance_rate(n, trials, rng, bound=None):
    """Fraction of unconditioned draws with norm <= bound (default 2n)."""
    if bound is None:
        bound = 2 * n
    x = sample_exponential_batch(n, trials, rng)
    return float(np.mean(np.linalg.norm(x, axis=1) <= bound))


def rationalize(x, denom=DEFAULT_DENOM):
    """Round each coordinate to the nearest multiple of 1/denom."""
    return tuple(Fraction(round(float(v) * denom), denom) for v in np.asarray(x, dtype=float))
