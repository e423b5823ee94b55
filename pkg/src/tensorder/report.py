"""Order-estimation reports and their JSON / CSV serializations."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

REPORT_SCHEMA = "tensorder/order-report-v1"
CURVES_SCHEMA = "tensorder/curves-v1"


@dataclass(frozen=True)
class AugmentCurves:
    """Per-mode output of the augmentation estimator.

    ``phi``, ``f`` and ``g`` are defined on the grid {0, ..., p_k}; ``g`` is
    ``phi`` plus the running sum of ``f`` and ``d_hat`` is its first argmin.
    """

    mode: int
    phi: np.ndarray
    f: np.ndarray
    g: np.ndarray
    lambda_hat: np.ndarray
    sigma2_hat: float
    d_hat: int

    @property
    def curve_names(self):
        return ("phi", "f", "g")

    def curve_arrays(self):
        return (self.phi, self.f, self.g)

    def to_dict(self):
        return {
            "k": self.mode,
            "d_hat": int(self.d_hat),
            "sigma2_hat": float(self.sigma2_hat),
            "curves": {
                "phi": [float(v) for v in self.phi],
                "f": [float(v) for v in self.f],
                "g": [float(v) for v in self.g],
                "lambda_hat": [float(v) for v in self.lambda_hat],
            },
        }


@dataclass(frozen=True)
class LadleCurves:
    """Per-mode output of the bootstrap ladle estimator on {0, ..., q_k}."""

    mode: int
    q: int
    phi_b: np.ndarray
    f_b: np.ndarray
    g_b: np.ndarray
    d_hat: int

    @property
    def curve_names(self):
        return ("phiB", "fB", "gB")

    def curve_arrays(self):
        return (self.phi_b, self.f_b, self.g_b)

    def to_dict(self):
        return {
            "k": self.mode,
            "d_hat": int(self.d_hat),
            "sigma2_hat": None,
            "q_k": int(self.q),
            "curves": {
                "phiB": [float(v) for v in self.phi_b],
                "fB": [float(v) for v in self.f_b],
                "gB": [float(v) for v in self.g_b],
            },
        }


@dataclass(frozen=True)
class OrderReport:
    """Full multi-mode estimation result: curves, estimates and timing."""

    estimator: str
    config: dict
    n: int
    dims: tuple[int, ...]
    modes: tuple
    timing: dict

    def __post_init__(self):
        got = [c.mode for c in self.modes]
        if got != list(range(1, len(self.dims) + 1)):
            raise ValueError("report must carry one entry per mode 1..m")

    @property
    def d_hat(self) -> tuple[int, ...]:
        return tuple(int(c.d_hat) for c in self.modes)

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "config": dict(self.config, estimator=self.estimator),
            "n": int(self.n),
            "dims": [int(p) for p in self.dims],
            "modes": [c.to_dict() for c in self.modes],
            "timing": self.timing,
        }

    def to_json(self, indent=2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")

    def curve_header(self):
        return ("mode", "index") + self.modes[0].curve_names

    def curve_rows(self):
        """Long-format rows: one row per (mode, grid index)."""
        for curves in self.modes:
            arrays = curves.curve_arrays()
            for i in range(len(arrays[0])):
                yield (curves.mode, i) + tuple(float(a[i]) for a in arrays)

    def write_curves_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(f"# schema: {CURVES_SCHEMA}\n")
            writer = csv.writer(fh)
            writer.writerow(self.curve_header())
            writer.writerows(self.curve_rows())
