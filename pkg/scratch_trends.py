"""Scratch: pre-check MC trends before freezing acceptance seeds (not shipped)."""
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

import tensorder as td
from tensorder.spectral import mode_spectra, pooled_scaled_eigenvalues, noise_variance


def c8_rep(args):
    n, rep = args
    sample = td.generate(td.study_spec(0.1, n, seed=811), stream_id=rep)
    rpt = td.estimate_orders(sample, td.AugmentConfig(r=10, s=20, q=0.3, seed=td.derive_seed(812, rep)))
    return n, rpt.d_hat == (3, 5, 10)


def c10_rep(args):
    n, rep = args
    sample = td.generate(td.study_spec(0.1, n, seed=1011), stream_id=rep)
    spectra = mode_spectra(sample)
    s2 = noise_variance(pooled_scaled_eigenvalues(spectra, 1), "quantile", 0.3)
    return n, abs(s2 - 30.0) / 30.0


def under_rep(args):
    r, rep = args
    sample = td.generate(td.study_spec(1.0, 1000, seed=913), stream_id=rep)
    rpt = td.estimate_orders(sample, td.AugmentConfig(r=r, s=20, q=0.6, seed=td.derive_seed(914, rep)))
    return r, rpt.d_hat[2]


def c9_rep(rep):
    sample = td.generate(td.study_spec(0.1, 1000, seed=915), stream_id=rep)
    rpt = td.estimate_orders_ladle(sample, td.LadleConfig(s=200, seed=td.derive_seed(916, rep), full_search=True))
    return rpt.d_hat


def c7_rep(rep):
    sample = td.gaussian_sample((5, 15, 20), 1000, td.RngStream(917, rep))
    rpt = td.estimate_orders(sample, td.AugmentConfig(r=25, s=20, q=0.5, seed=td.derive_seed(918, rep)))
    return rpt.d_hat


if __name__ == "__main__":
    t0 = time.time()
    with ProcessPoolExecutor(max_workers=2) as pool:
        SEEDS = 15
        tasks = [(n, rep) for n in (250, 500, 1000) for rep in range(SEEDS)]
        out = list(pool.map(c8_rep, tasks, chunksize=4))
        frac = {n: np.mean([ok for nn, ok in out if nn == n]) for n in (250, 500, 1000)}
        print("c8 fractions:", frac, "%.0fs" % (time.time() - t0))

        t0 = time.time()
        tasks = [(n, rep) for n in (250, 1000, 4000) for rep in range(SEEDS)]
        out = list(pool.map(c10_rep, tasks, chunksize=4))
        med = {n: float(np.median([e for nn, e in out if nn == n])) for n in (250, 1000, 4000)}
        print("c10 median rel err:", med, "%.0fs" % (time.time() - t0))

        t0 = time.time()
        tasks = [(r, rep) for r in (10, 50) for rep in range(12)]
        out = list(pool.map(under_rep, tasks, chunksize=3))
        for r in (10, 50):
            d3s = [d for rr, d in out if rr == r]
            print("underest r=%d: d3 values %s under-frac %.2f" % (r, d3s, np.mean([d < 10 for d in d3s])))
        print("%.0fs" % (time.time() - t0))

        t0 = time.time()
        out = list(pool.map(c9_rep, range(10), chunksize=2))
        print("c9 ladle mini:", out, "%.0fs" % (time.time() - t0))

        t0 = time.time()
        out = list(pool.map(c7_rep, range(8), chunksize=2))
        print("c7 mini (r=25,q=0.5):", out, "%.0fs" % (time.time() - t0))
