"""Mode-wise scatter matrices, symmetric eigendecompositions, pooled scaled
eigenvalue sets and the tail estimators of the per-mode noise variance.

Under a spherical noise model the flattening scatters have a common noise
floor once each mode's eigenvalues are rescaled by ``p_i / p_k``; pooling the
rescaled eigenvalues from all modes therefore lets a single lower quantile
(or tail mean, or minimum) estimate the noise variance of any target mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tensors import DenseTensor, _cyclic_axes, _own_array, unfold

NOISE_METHODS = ("quantile", "tail_mean", "min")


@dataclass(frozen=True)
class TensorSample:
    """n tensors of identical shape, stacked as an ``(n, p_1, ..., p_m)`` array.

    ``centered`` marks per-entry mean removal; ``mean`` stores the removed
    mean tensor.  The backing array is marked read-only on construction.
    """

    obs: np.ndarray
    centered: bool = False
    mean: np.ndarray | None = None

    def __post_init__(self):
        arr = _own_array(self.obs, min_ndim=2)
        if arr.shape[0] < 2:
            raise ValueError("a sample needs at least two observations")
        object.__setattr__(self, "obs", arr)
        if self.mean is not None:
            mean = _own_array(self.mean)
            if mean.shape != arr.shape[1:]:
                raise ValueError("mean shape does not match the observations")
            object.__setattr__(self, "mean", mean)
        if self.centered:
            resid = np.abs(arr.mean(axis=0)).max()
            if resid > 1e-12:
                raise ValueError(f"sample flagged centered but mean residual is {resid:g}")

    @classmethod
    def from_tensors(cls, tensors) -> "TensorSample":
        mats = [t.data if isinstance(t, DenseTensor) else np.asarray(t, float) for t in tensors]
        return cls(np.stack(mats, axis=0))

    @property
    def n(self) -> int:
        return self.obs.shape[0]

    @property
    def dims(self) -> tuple[int, ...]:
        return self.obs.shape[1:]

    @property
    def order(self) -> int:
        return self.obs.ndim - 1

    def rho(self, k: int) -> int:
        return int(np.prod(self.dims)) // self.dims[k - 1]


@dataclass(frozen=True)
class ModeSpectrum:
    """Descending eigenvalues and matching orthonormal eigenvectors of a
    mode scatter matrix (positive semi-definite up to roundoff)."""

    mode: int
    values: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        values = _own_array(self.values)
        vectors = _own_array(self.vectors, min_ndim=2)
        p = values.size
        if vectors.shape != (p, p):
            raise ValueError("eigenvector matrix shape does not match eigenvalues")
        if np.any(np.diff(values) > 1e-12 * max(1.0, abs(values[0]))):
            raise ValueError("eigenvalues must be sorted in descending order")
        if values[-1] < -1e-10 * max(1.0, values[0]):
            raise ValueError("scatter spectrum has a clearly negative eigenvalue")
        gram = vectors.T @ vectors
        if np.max(np.abs(gram - np.eye(p))) > 1e-10:
            raise ValueError("eigenvectors are not orthonormal to 1e-10")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "vectors", vectors)

    @property
    def p(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class PooledEigenSet:
    """All modes' scatter eigenvalues rescaled to the target mode's scale."""

    target_mode: int
    values: np.ndarray

    def __post_init__(self):
        values = _own_array(self.values)
        if values.size == 0:
            raise ValueError("pooled eigenvalue set is empty")
        if values.min() < -1e-10 * max(1.0, values.max()):
            raise ValueError("pooled set has a clearly negative eigenvalue")
        object.__setattr__(self, "values", values)


def _trusted_sample(obs, centered, mean) -> TensorSample:
    # internal constructor for arrays we built ourselves; skips re-validation
    out = object.__new__(TensorSample)
    obs.setflags(write=False)
    object.__setattr__(out, "obs", obs)
    object.__setattr__(out, "centered", centered)
    if mean is not None:
        mean = np.ascontiguousarray(mean)
        mean.setflags(write=False)
    object.__setattr__(out, "mean", mean)
    return out


def center(sample: TensorSample) -> TensorSample:
    """Subtract the per-entry sample mean; no-op on already centered samples."""
    if sample.centered:
        return sample
    mean = sample.obs.mean(axis=0)
    return _trusted_sample(sample.obs - mean, True, mean)


def _gram_by_mode(obs: np.ndarray, k: int) -> np.ndarray:
    """``sum_i unfold_k(obs[i]) unfold_k(obs[i])'`` without large transposes.

    Views the stacked array as ``(L, p_k, R)`` blocks; summing block grams
    over L covers every k-mode vector exactly once.
    """
    lead = int(np.prod(obs.shape[:k]))
    p = obs.shape[k]
    rest = int(np.prod(obs.shape[k + 1 :])) if obs.ndim > k + 1 else 1
    if rest == 1:
        x = obs.reshape(lead, p)
        return x.T @ x
    blocks = obs.reshape(lead, p, rest)
    return np.matmul(blocks, blocks.transpose(0, 2, 1)).sum(axis=0)


def mode_scatter(sample: TensorSample, k: int) -> np.ndarray:
    """``(1/n) * sum_i X_k^i (X_k^i)'`` over the centered k-unfoldings.

    Accepts raw samples too: the mean unfolding's outer product is then
    subtracted, which equals centering first (exactly, by the usual
    second-moment identity).
    """
    s = _gram_by_mode(sample.obs, k) / sample.n
    if not sample.centered:
        mean_k = unfold(DenseTensor(sample.obs.mean(axis=0)), k).matrix
        s = s - mean_k @ mean_k.T
    return (s + s.T) / 2.0


def _mode_flat(obs: np.ndarray, k: int) -> np.ndarray:
    """Stacked unfoldings reshaped to ``(p_k, n * rho_k)`` for BLAS products.

    Column blocks are per observation, each ordered like ``unfold(obs[i], k)``,
    so reshaping the result to ``(p_k, n, rho_k)`` recovers the unfoldings.
    """
    order = obs.ndim - 1
    cyc = [i + 1 for i in _cyclic_axes(k, order)]
    mat = np.transpose(obs, [k, 0] + cyc).reshape(obs.shape[k], -1)
    return np.ascontiguousarray(mat)


def eig_sym_desc(a) -> tuple[np.ndarray, np.ndarray]:
    """Descending eigendecomposition of a symmetric matrix.

    Eigenvector signs are fixed by making each column's largest-magnitude
    entry positive (lowest index on ties), so outputs are reproducible.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(1.0, float(np.max(np.abs(a))))
    if float(np.max(np.abs(a - a.T))) > 1e-10 * scale:
        raise ValueError("matrix is not symmetric to 1e-10")
    values, vectors = np.linalg.eigh(a)  # LinAlgError propagates on failure
    values = values[::-1].copy()
    vectors = vectors[:, ::-1]
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.where(vectors[idx, np.arange(vectors.shape[1])] < 0, -1.0, 1.0)
    return values, np.ascontiguousarray(vectors * signs)


def mode_spectrum(sample: TensorSample, k: int) -> ModeSpectrum:
    values, vectors = eig_sym_desc(mode_scatter(sample, k))
    return ModeSpectrum(k, values, vectors)


def mode_spectra(sample: TensorSample) -> list[ModeSpectrum]:
    return [mode_spectrum(sample, k) for k in range(1, sample.order + 1)]


def pooled_scaled_eigenvalues(spectra, k: int) -> PooledEigenSet:
    """Pool every mode's eigenvalues, rescaled by ``p_i / p_k``."""
    by_mode = {s.mode: s for s in spectra}
    m = len(by_mode)
    if sorted(by_mode) != list(range(1, m + 1)) or len(list(spectra)) != m:
        raise ValueError("spectra must cover each mode 1..m exactly once")
    if k not in by_mode:
        raise ValueError(f"target mode {k} not present")
    p_k = by_mode[k].p
    chunks = [(s.p / p_k) * s.values for s in sorted(by_mode.values(), key=lambda s: s.mode)]
    return PooledEigenSet(k, np.concatenate(chunks))


def noise_variance(pooled: PooledEigenSet, method: str = "quantile", q: float = 0.3) -> float:
    """Noise-variance estimate from the lower tail of the pooled set.

    ``quantile``: the q-th lower empirical quantile (order statistic at the
    1-based index ``ceil(q * N)``).  ``tail_mean``: mean of every element at
    or below that quantile.  ``min``: the smallest element.
    """
    if method not in NOISE_METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {NOISE_METHODS}")
    values = np.sort(pooled.values)
    if method == "min":
        return float(values[0])
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie strictly between 0 and 1")
    # guard against float noise in q * N pushing ceil one step too far
    index = max(1, math.ceil(q * values.size - 1e-9))
    cut = values[index - 1]
    if method == "quantile":
        return float(cut)
    return float(values[values <= cut].mean())


def spectrum_rows(spectra):
    """CSV rows (mode, index, value) for a list of ModeSpectrum, 1-based index."""
    for s in sorted(spectra, key=lambda s: s.mode):
        for i, v in enumerate(s.values, start=1):
            yield s.mode, i, float(v)


def pooled_rows(pooled: PooledEigenSet):
    """CSV rows (mode, index, value) for a pooled set, in sorted value order."""
    for i, v in enumerate(np.sort(pooled.values)[::-1], start=1):
        yield pooled.target_mode, i, float(v)
