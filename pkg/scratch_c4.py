"""Scratch: empirical check of the criterion-4 Beta-law KS (not shipped)."""
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

import tensorder as td
from tensorder.spectral import center, mode_spectra, pooled_scaled_eigenvalues, noise_variance


def one_rep(rep):
    spec = td.study_spec(sigma2=0.1, n=4000, seed=20260)
    sample = center(td.generate(spec, stream_id=rep))
    spectra = mode_spectra(sample)
    pooled = pooled_scaled_eigenvalues(spectra, 1)
    s2 = noise_variance(pooled, "quantile", 0.3)
    norms = td.augmented_part_norms(sample, 1, 4, s2, td.RngStream(td.derive_seed(20260, 99), rep))
    return norms[4], s2  # i = 5 (1-based)


if __name__ == "__main__":
    n_reps = int(sys.argv[1]) if len(sys.argv) > 1 else 500
    t0 = time.time()
    with ProcessPoolExecutor(max_workers=2) as pool:
        out = list(pool.map(one_rep, range(n_reps), chunksize=8))
    vals = np.array([v for v, _ in out])
    s2s = np.array([s for _, s in out])
    stat, p = td.ks_test(vals, td.BetaLaw(2.0, 1.0))
    print(f"reps={n_reps} wall={time.time()-t0:.1f}s")
    print(f"KS stat={stat:.4f} p={p:.4f} (need p > 0.01)")
    print(f"mean norm={vals.mean():.4f} (Beta(2,1) mean 0.6667)")
    print(f"sigma2_hat mean={s2s.mean():.4f} sd={s2s.std():.4f} (truth 30)")
