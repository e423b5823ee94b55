"""Seeded random sources and the distribution utilities the estimators need.

Randomness is organised around counter-based Philox streams keyed by
``(seed, stream_id)``: the same key always reproduces the same draws, and
distinct stream ids give independent streams regardless of scheduling, so
replicate and bootstrap loops stay auditable under any degree of parallelism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .tensors import DenseTensor

_MASK64 = (1 << 64) - 1


def derive_seed(seed: int, tag: int) -> int:
    """Mix an integer tag into a seed (one splitmix64 round).

    Used to give each mode / repetition / purpose its own stream family
    without risking collisions between raw ``(seed, stream_id)`` keys.
    """
    z = (seed + (tag + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


@dataclass(frozen=True)
class RngStream:
    """One reproducible random stream, keyed by (seed, stream_id)."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        """Fresh generator; identical keys yield identical draw sequences."""
        key = np.array(
            [self.seed & _MASK64, self.stream_id & _MASK64], dtype=np.uint64
        )
        return np.random.Generator(np.random.Philox(key=key))


def as_generator(rng) -> np.random.Generator:
    """Accept an RngStream (fresh stream) or a Generator (drawn in place)."""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng)!r}")


@dataclass(frozen=True)
class BetaLaw:
    """Beta(alpha, beta) reference law."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError("Beta parameters must be positive")


def gaussian_matrix(rows: int, cols: int, sd: float, rng) -> np.ndarray:
    """Matrix with i.i.d. N(0, sd^2) entries."""
    if sd < 0:
        raise ValueError("sd must be >= 0")
    gen = as_generator(rng)
    return sd * gen.standard_normal((rows, cols))


def student_t_tensor(dims, dof: float, rng) -> DenseTensor:
    """Tensor with i.i.d. t(dof) entries; requires dof > 2 (finite variance)."""
    if not dof > 2:
        raise ValueError("dof must exceed 2 so the entries have finite variance")
    gen = as_generator(rng)
    return DenseTensor(gen.standard_t(dof, size=tuple(int(d) for d in dims)))


def haar_orthogonal(p: int, rng) -> np.ndarray:
    """Haar-distributed p x p orthogonal matrix (QR with sign-corrected R)."""
    if p < 1:
        raise ValueError("p must be >= 1")
    gen = as_generator(rng)
    q, r = np.linalg.qr(gen.standard_normal((p, p)))
    signs = np.where(np.diag(r) < 0, -1.0, 1.0)
    return q * signs


def beta_cdf(x, law: BetaLaw):
    """Regularized incomplete beta function I_x(alpha, beta) on [0, 1]."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0) or np.any(x > 1):
        raise ValueError("x must lie in [0, 1]")
    out = special.betainc(law.alpha, law.beta, x)
    return float(out) if out.ndim == 0 else out


def ecdf_sup_distance(cdf_values) -> float:
    """Sup distance between reference-CDF values at the ordered sample points
    and the empirical CDF there (post-jump values i/n)."""
    f = np.asarray(cdf_values, dtype=np.float64)
    n = f.size
    return float(np.max(np.abs(f - np.arange(1, n + 1) / n)))


def ks_test(samples, law: BetaLaw) -> tuple[float, float]:
    """One-sample Kolmogorov-Smirnov check against a Beta law.

    Returns ``(statistic, p_bound)`` where the statistic is the sup distance
    of the empirical CDF from :func:`beta_cdf` over the sample points and the
    p-value is the asymptotic Kolmogorov bound.  Requires >= 100 samples.
    """
    x = np.sort(np.asarray(samples, dtype=np.float64))
    n = x.size
    if n < 100:
        raise ValueError("need at least 100 samples for the asymptotic bound")
    stat = ecdf_sup_distance(beta_cdf(x, law))
    p_bound = float(special.kolmogorov(math.sqrt(n) * stat))
    return stat, p_bound
