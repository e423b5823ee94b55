"""Bootstrap ladle order estimator.

Combines two signals per mode: a normalized tail of the scatter eigenvalues,
and the bootstrap variability of the span of the first j eigenvectors,
measured as ``1 - |det(B' B*)|`` between the original and resampled leading
eigenvector frames.  The variability dips at the latent dimension (where the
eigen-gap is widest), producing a ladle-shaped objective whose first argmin
over {0, ..., q_k} estimates the order.  No noise-variance estimate is
required.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .report import LadleCurves, OrderReport
from .spectral import TensorSample, center, eig_sym_desc, _mode_flat
from .statkit import RngStream, as_generator, derive_seed


@dataclass(frozen=True)
class LadleConfig:
    """Tuning of the ladle estimator.

    ``s`` is the per-mode bootstrap sample count (scalar broadcasts).
    ``full_search`` forces ``q_k = p_k - 1`` in every mode instead of the
    ``p_k / log(p_k)`` bound for large modes.  ``g0`` selects the objective
    value at 0: the eigenvalue term ("phi", default) or a literal 0 ("zero"),
    which makes an estimate of 0 maximally easy to return.
    """

    s: int | tuple = 200
    seed: int = 0
    full_search: bool = False
    g0: str = "phi"

    def __post_init__(self):
        if self.g0 not in ("phi", "zero"):
            raise ValueError("g0 must be 'phi' or 'zero'")
        value = self.s
        if np.isscalar(value):
            if int(value) < 1:
                raise ValueError("s must be >= 1")
        else:
            out = tuple(int(v) for v in value)
            if any(v < 1 for v in out):
                raise ValueError("s entries must be >= 1")
            object.__setattr__(self, "s", out)

    def s_for(self, m):
        if np.isscalar(self.s):
            return (int(self.s),) * m
        if len(self.s) != m:
            raise ValueError("s must be a scalar or one value per mode")
        return self.s

    def to_dict(self):
        return {
            "s": list(self.s) if not np.isscalar(self.s) else int(self.s),
            "seed": int(self.seed),
            "full_search": bool(self.full_search),
            "g0": self.g0,
        }


def search_bound(p: int) -> int:
    """Search bound q: ``p - 1`` when p <= 10, else ``floor(p / log p)``."""
    if p < 2:
        raise ValueError("need p >= 2 to search over {0, ..., q}")
    if p <= 10:
        return p - 1
    return int(math.floor(p / math.log(p)))


def bootstrap_resample(sample: TensorSample, rng) -> TensorSample:
    """Resample n observations with replacement and re-center them."""
    if not sample.centered:
        raise ValueError("bootstrap_resample expects a centered sample")
    gen = as_generator(rng)
    idx = gen.integers(0, sample.n, size=sample.n)
    obs = sample.obs[idx]
    mean = obs.mean(axis=0)
    return TensorSample(obs - mean, centered=True, mean=mean)


def _leading_absdets(cross: np.ndarray, q: int) -> np.ndarray:
    """|det| of the leading j x j blocks of ``cross`` for j = 1..q, via QR,
    clamped to [0, 1] against roundoff."""
    out = np.empty(q)
    for j in range(1, q + 1):
        r = np.linalg.qr(cross[:j, :j], mode="r")
        diag = np.abs(np.diag(r))
        if np.any(diag == 0.0):
            out[j - 1] = 0.0
        else:
            out[j - 1] = math.exp(float(np.sum(np.log(diag))))
    return np.clip(out, 0.0, 1.0)


def _bootstrap_scatter(flat_pnr: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Scatter of a re-centered bootstrap resample given multiplicity counts.

    Equals ``(1/n) sum_j Y_j Y_j'`` over the resampled, re-centered
    unfoldings, computed without materializing the resample.
    """
    p, n, rho = flat_pnr.shape
    weighted = flat_pnr * counts[None, :, None]
    mean = weighted.sum(axis=1) / n
    s = (weighted.reshape(p, n * rho) @ flat_pnr.reshape(p, n * rho).T) / n
    s = s - mean @ mean.T
    return (s + s.T) / 2.0


def eigvec_variation_curve(sample: TensorSample, k: int, config: LadleConfig) -> np.ndarray:
    """Bootstrap eigenvector-variation curve fB on {0, ..., q_k}."""
    if not sample.centered:
        raise ValueError("eigvec_variation_curve expects a centered sample")
    m = sample.order
    s_k = config.s_for(m)[k - 1]
    p = sample.dims[k - 1]
    q = p - 1 if config.full_search else search_bound(p)
    flat = _mode_flat(sample.obs, k)
    scatter = (flat @ flat.T) / sample.n
    _, vectors = eig_sym_desc((scatter + scatter.T) / 2.0)
    return _variation_curve(flat.reshape(p, sample.n, sample.rho(k)), vectors, q, s_k,
                            derive_seed(config.seed, k))


def _variation_curve(flat_pnr, base_vectors, q, s_k, mode_seed) -> np.ndarray:
    n = flat_pnr.shape[1]
    base = base_vectors[:, :q]
    acc = np.zeros(q)
    for i in range(s_k):
        gen = RngStream(mode_seed, i).generator()
        idx = gen.integers(0, n, size=n)
        counts = np.bincount(idx, minlength=n).astype(np.float64)
        boot_scatter = _bootstrap_scatter(flat_pnr, counts)
        _, boot_vectors = eig_sym_desc(boot_scatter)
        cross = base.T @ boot_vectors[:, :q]
        acc += 1.0 - _leading_absdets(cross, q)
    f_b = np.zeros(q + 1)
    f_b[1:] = acc / s_k
    return f_b


def ladle_objective(spectrum_values, f_b, q: int, g0: str = "phi"):
    """Combine eigenvalue and bootstrap parts on {0, ..., q}.

    ``phiB(j) = value[j+1] / (sum of the first q values + 1)`` and the
    bootstrap part is ``fB(j) / (sum_{i=1..q} fB(i) + 1)``; returns
    ``(phiB, gB, d_hat)`` with the first argmin of the sum.
    """
    values = np.asarray(
        spectrum_values.values if hasattr(spectrum_values, "values") else spectrum_values,
        dtype=np.float64,
    )
    f_b = np.asarray(f_b, dtype=np.float64)
    if values.size < q + 1:
        raise ValueError("spectrum must supply at least q + 1 eigenvalues")
    if f_b.shape != (q + 1,):
        raise ValueError("fB must live on the grid {0, ..., q}")
    phi_b = values[: q + 1] / (values[:q].sum() + 1.0)
    g_b = phi_b + f_b / (f_b[1:].sum() + 1.0)
    if g0 == "zero":
        g_b = g_b.copy()
        g_b[0] = 0.0
    return phi_b, g_b, int(np.argmin(g_b))


def estimate_orders_ladle(sample: TensorSample, config: LadleConfig | None = None) -> OrderReport:
    """Run the ladle pipeline over every mode and assemble an OrderReport."""
    config = config or LadleConfig()
    sample = center(sample)
    m = sample.order
    s_all = config.s_for(m)
    t0 = time.perf_counter()
    modes, per_mode_s = [], []
    for k in range(1, m + 1):
        tick = time.perf_counter()
        p = sample.dims[k - 1]
        q = p - 1 if config.full_search else search_bound(p)
        flat = _mode_flat(sample.obs, k)
        scatter = (flat @ flat.T) / sample.n
        values, vectors = eig_sym_desc((scatter + scatter.T) / 2.0)
        f_b = _variation_curve(
            flat.reshape(p, sample.n, sample.rho(k)),
            vectors,
            q,
            s_all[k - 1],
            derive_seed(config.seed, k),
        )
        phi_b, g_b, d_hat = ladle_objective(values, f_b, q, g0=config.g0)
        per_mode_s.append(time.perf_counter() - tick)
        modes.append(
            LadleCurves(mode=k, q=q, phi_b=phi_b, f_b=f_b, g_b=g_b, d_hat=d_hat)
        )
    timing = {"total_s": time.perf_counter() - t0, "per_mode_s": per_mode_s}
    return OrderReport(
        estimator="ladle",
        config=config.to_dict(),
        n=sample.n,
        dims=sample.dims,
        modes=tuple(modes),
        timing=timing,
    )
