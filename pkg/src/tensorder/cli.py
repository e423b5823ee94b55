"""Command-line driver: dataset simulation, order estimation, eigenvalue
curve export, and the Monte Carlo study runner.

Sample files are TOF1 tensors of order m + 1 whose leading mode indexes the
observations (header plus n concatenated payloads).  Every JSON/CSV output
carries a schema string; all commands are deterministic given ``--seed``.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from .augment import AugmentConfig, estimate_orders
from .ladle import LadleConfig, estimate_orders_ladle
from .report import CURVES_SCHEMA
from .simgen import (
    STUDY_DIMS,
    STUDY_LATENT,
    SimModelSpec,
    generate,
    study_spec,
)
from .spectral import TensorSample, center, mode_spectra, pooled_scaled_eigenvalues
from .statkit import derive_seed
from .tensors import DenseTensor, TofFormatError, read_tof1, write_tof1

SIM_SCHEMA = "tensorder/sim-spec-v1"
STUDY_SCHEMA = "tensorder/study-v1"


def write_sample(path, sample: TensorSample) -> None:
    """Write a sample as one TOF1 file of order m + 1 (first mode = n)."""
    write_tof1(path, sample.obs)


def read_sample(path) -> TensorSample:
    """Read a TOF1 sample file back into a TensorSample."""
    t = read_tof1(path)
    if t.order < 2:
        raise TofFormatError(f"{path}: a sample file needs order >= 2 (n plus modes)")
    if t.dims[0] < 2:
        raise TofFormatError(f"{path}: a sample needs at least two observations")
    return TensorSample(t.data)


def _int_list(text):
    return tuple(int(v) for v in str(text).split(","))


def _float_list(text):
    return tuple(float(v) for v in str(text).split(","))


def _build_spec(dims, latent, n, sigma2, seed) -> SimModelSpec:
    if tuple(dims) == STUDY_DIMS and tuple(latent) == STUDY_LATENT:
        return study_spec(sigma2=sigma2, n=n, seed=seed)
    # generic fallback: flat unit core spectra at unit scale
    return SimModelSpec(
        dims=tuple(dims),
        latent=tuple(latent),
        n=n,
        sigma2=sigma2,
        core_spectra=tuple((1.0,) * d for d in latent),
        seed=seed,
    )


def _augment_config(args, m) -> AugmentConfig:
    method = {"quantile": "quantile", "tail-mean": "tail_mean", "min": "min"}[args.noise_method]
    r = args.r if len(args.r) > 1 else int(args.r[0])
    s = args.s if len(args.s) > 1 else int(args.s[0])
    return AugmentConfig(r=r, s=s, noise_method=method, q=args.quantile, seed=args.seed)


def cmd_simulate(args, parser) -> int:
    if args.n < 2:
        parser.error("--n must be at least 2")
    if len(args.dims) != len(args.latent):
        parser.error("--dims and --latent must have the same length")
    try:
        spec = _build_spec(args.dims, args.latent, args.n, args.sigma2, args.seed)
    except ValueError as exc:
        parser.error(str(exc))
    sample = generate(spec, stream_id=args.stream_id)
    write_sample(args.output, sample)
    echo = {
        "schema": SIM_SCHEMA,
        "dims": list(spec.dims),
        "latent": list(spec.latent),
        "n": spec.n,
        "sigma2": spec.sigma2,
        "core_spectra": [list(d) for d in spec.core_spectra],
        "core_dof": spec.core_dof,
        "core_scale": spec.core_scale,
        "seed": spec.seed,
        "stream_id": args.stream_id,
    }
    with open(str(args.output) + ".json", "w", encoding="utf-8") as fh:
        json.dump(echo, fh, indent=2)
        fh.write("\n")
    return 0


def cmd_estimate(args, parser) -> int:
    sample = read_sample(args.input)
    m = sample.order
    if args.estimator == "augment":
        report = estimate_orders(sample, _augment_config(args, m))
    else:
        s = args.s if len(args.s) > 1 else int(args.s[0])
        config = LadleConfig(
            s=s, seed=args.seed, full_search=args.full_search, g0=args.g0
        )
        report = estimate_orders_ladle(sample, config)
    report.write_json(args.output)
    curves_path = args.curves or str(args.output) + ".curves.csv"
    report.write_curves_csv(curves_path)
    print(f"d_hat = {report.d_hat}")
    return 0


def cmd_curves(args, parser) -> int:
    sample = center(read_sample(args.input))
    spectra = mode_spectra(sample)
    with open(args.output, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# schema: {CURVES_SCHEMA}\n")
        writer = csv.writer(fh)
        writer.writerow(("mode", "index", "value"))
        if args.pooled is not None:
            pooled = pooled_scaled_eigenvalues(spectra, args.pooled)
            for s in spectra:
                scale = s.p / sample.dims[args.pooled - 1]
                for i, v in enumerate(s.values, start=1):
                    writer.writerow((s.mode, i, float(scale * v)))
        else:
            for s in spectra:
                for i, v in enumerate(s.values, start=1):
                    writer.writerow((s.mode, i, float(v)))
    return 0


# ---------------------------------------------------------------------------
# study runner
# ---------------------------------------------------------------------------


def _study_rep(task):
    """One repetition of one study cell; top-level so it pickles."""
    spec, rep, estimator, config = task
    sample = generate(spec, stream_id=rep)
    if estimator == "augment":
        report = estimate_orders(sample, config)
    else:
        report = estimate_orders_ladle(sample, config)
    return report.d_hat


def run_study(
    estimator: str = "augment",
    sigma2_values=(0.1,),
    r_values=(10,),
    q_values=(0.3,),
    reps: int = 100,
    n: int = 1000,
    s: int = 20,
    seed: int = 0,
    dims=STUDY_DIMS,
    latent=STUDY_LATENT,
    full_search: bool = True,
    workers: int = 1,
) -> dict:
    """Frequency tables of estimated dimensions over a (sigma2, r, q) grid.

    Repetition ``t`` of every cell draws its dataset from stream id ``t`` of
    the base seed, so cells with a common noise level share datasets and the
    result is independent of ``workers``.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    cells = []
    if estimator == "augment":
        grid = [
            (s2, r, q) for s2 in sigma2_values for r in r_values for q in q_values
        ]
    else:
        grid = [(s2, None, None) for s2 in sigma2_values]
    for cell_index, (s2, r, q) in enumerate(grid):
        spec = _build_spec(dims, latent, n, s2, seed)
        tasks = []
        for rep in range(reps):
            rep_seed = derive_seed(derive_seed(seed, 1 + cell_index), rep)
            if estimator == "augment":
                config = AugmentConfig(r=r, s=s, q=q, seed=rep_seed)
            else:
                config = LadleConfig(s=s, seed=rep_seed, full_search=full_search)
            tasks.append((spec, rep, estimator, config))
        tick = time.perf_counter()
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                outcomes = list(pool.map(_study_rep, tasks, chunksize=4))
        else:
            outcomes = [_study_rep(t) for t in tasks]
        elapsed = time.perf_counter() - tick
        counts = Counter(outcomes)
        cells.append(
            {
                "estimator": estimator,
                "sigma2": float(s2),
                "r": None if r is None else int(r),
                "quantile": None if q is None else float(q),
                "reps": reps,
                "counts": {
                    ",".join(str(v) for v in key): int(c)
                    for key, c in sorted(counts.items())
                },
                "elapsed_s": elapsed,
            }
        )
    return {
        "schema": STUDY_SCHEMA,
        "config": {
            "estimator": estimator,
            "dims": list(dims),
            "latent": list(latent),
            "n": n,
            "s": s,
            "reps": reps,
            "seed": seed,
            "full_search": bool(full_search),
        },
        "cells": cells,
    }


def write_study_csv(result: dict, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# schema: {STUDY_SCHEMA}\n")
        writer = csv.writer(fh)
        writer.writerow(("estimator", "sigma2", "r", "quantile", "d_hat", "count"))
        for cell in result["cells"]:
            for key, count in cell["counts"].items():
                writer.writerow(
                    (
                        cell["estimator"],
                        cell["sigma2"],
                        cell["r"],
                        cell["quantile"],
                        key,
                        count,
                    )
                )


def cmd_study(args, parser) -> int:
    if args.reps is None:
        args.reps = 1000 if args.paper_scale else 100
    if args.s is None:
        args.s = (50,) if args.paper_scale else (20,)
    if args.reps < 1:
        parser.error("--reps must be at least 1")
    result = run_study(
        estimator=args.estimator,
        sigma2_values=args.sigma2,
        r_values=tuple(int(v) for v in args.r),
        q_values=args.quantile,
        reps=args.reps,
        n=args.n,
        s=int(args.s[0]) if len(args.s) == 1 else tuple(args.s),
        seed=args.seed,
        dims=args.dims,
        latent=args.latent,
        full_search=args.full_search,
        workers=args.workers,
    )
    with open(args.output, "w", encoding="utf-8") as fh:
        json.dump(result, fh, indent=2)
        fh.write("\n")
    if args.csv:
        write_study_csv(result, args.csv)
    for cell in result["cells"]:
        top = max(cell["counts"].items(), key=lambda kv: kv[1])
        print(
            f"sigma2={cell['sigma2']} r={cell['r']} q={cell['quantile']}: "
            f"top d_hat ({top[0]}) in {top[1]}/{cell['reps']} reps"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tensorder",
        description="Latent dimension estimation for tensor-valued samples",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate a synthetic sample file")
    sim.add_argument("--dims", type=_int_list, default=STUDY_DIMS)
    sim.add_argument("--latent", type=_int_list, default=STUDY_LATENT)
    sim.add_argument("--n", type=int, default=1000)
    sim.add_argument("--sigma2", type=float, default=0.1)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--stream-id", type=int, default=0, dest="stream_id")
    sim.add_argument("--output", required=True)

    est = sub.add_parser("estimate", help="estimate latent dimensions from a sample file")
    est.add_argument("--input", required=True)
    est.add_argument("--output", required=True)
    est.add_argument("--curves", default=None)
    est.add_argument("--estimator", choices=("augment", "ladle"), default="augment")
    est.add_argument("--r", type=_int_list, default=(10,))
    est.add_argument("--s", type=_int_list, default=None)
    est.add_argument("--quantile", type=float, default=0.3)
    est.add_argument(
        "--noise-method",
        choices=("quantile", "tail-mean", "min"),
        default="quantile",
        dest="noise_method",
    )
    est.add_argument("--seed", type=int, default=0)
    est.add_argument("--full-search", action="store_true", dest="full_search")
    est.add_argument("--g0", choices=("phi", "zero"), default="phi")

    study = sub.add_parser("study", help="Monte Carlo frequency study over a grid")
    study.add_argument("--estimator", choices=("augment", "ladle"), default="augment")
    study.add_argument("--sigma2", type=_float_list, default=(0.1,))
    study.add_argument("--r", type=_int_list, default=(10,))
    study.add_argument("--quantile", type=_float_list, default=(0.3,))
    study.add_argument("--reps", type=int, default=None)
    study.add_argument("--n", type=int, default=1000)
    study.add_argument("--s", type=_int_list, default=None)
    study.add_argument("--dims", type=_int_list, default=STUDY_DIMS)
    study.add_argument("--latent", type=_int_list, default=STUDY_LATENT)
    study.add_argument("--seed", type=int, default=0)
    study.add_argument("--paper-scale", action="store_true", dest="paper_scale")
    study.add_argument("--full-search", action="store_true", dest="full_search")
    study.add_argument("--workers", type=int, default=1)
    study.add_argument("--output", required=True)
    study.add_argument("--csv", default=None)

    curves = sub.add_parser("curves", help="export scatter eigenvalue curves as CSV")
    curves.add_argument("--input", required=True)
    curves.add_argument("--output", required=True)
    curves.add_argument("--pooled", type=int, default=None)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "s", None) is None and args.command == "estimate":
        args.s = (50,) if args.estimator == "augment" else (200,)
    try:
        if args.command == "simulate":
            return cmd_simulate(args, parser)
        if args.command == "estimate":
            return cmd_estimate(args, parser)
        if args.command == "study":
            return cmd_study(args, parser)
        if args.command == "curves":
            return cmd_curves(args, parser)
        parser.error(f"unknown command {args.command!r}")
    except (TofFormatError, OSError, ValueError) as exc:
        print(f"tensorder: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
