"""Dense order-m tensors with cyclic unfoldings, mode products and binary I/O.

Conventions used throughout the package:

* Modes are numbered 1..m (mode k of a tensor with shape ``(p_1, ..., p_m)``
  has length ``p_k``).
* The k-unfolding of a tensor is the ``p_k x rho_k`` matrix whose columns are
  all k-mode vectors, ``rho_k = prod_{i != k} p_i``.  Columns enumerate the
  remaining indices in the cyclic order ``(i_{k+1}, ..., i_m, i_1, ..., i_{k-1})``
  with the *last* index in that list varying fastest.  With this choice the
  unfolding of a multilinear product ``T x_1 A_1 ... x_m A_m`` equals
  ``A_k @ unfold(T, k) @ kron(A_{k+1}, ..., A_m, A_1, ..., A_{k-1}).T``.
* Arrays are stored row-major (C order) as float64; containers take ownership
  of the array passed to them and mark it read-only.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

TOF1_MAGIC = b"TOF1"


class TofFormatError(ValueError):
    """Raised when a tensor file does not follow the TOF1 byte layout."""


def _all_finite(arr) -> bool:
    # a finite sum proves all entries finite; only fall back to the full
    # elementwise scan when the cheap one-pass check is inconclusive
    if np.isfinite(float(arr.sum())):
        return True
    return bool(np.isfinite(arr).all())


def _own_array(data, min_ndim=1):
    arr = np.ascontiguousarray(np.asarray(data, dtype=np.float64))
    if arr.ndim < min_ndim:
        raise ValueError(f"expected an array of at least {min_ndim} dimension(s)")
    if any(s < 1 for s in arr.shape):
        raise ValueError("all dimensions must be >= 1")
    if not _all_finite(arr):
        raise ValueError("non-finite entries are not admitted")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DenseTensor:
    """Immutable dense tensor of order m >= 1.

    The constructor validates shape and finiteness and marks the backing
    array read-only, so instances are safe to share between workers.
    """

    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", _own_array(self.data))

    @property
    def dims(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def order(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size


@dataclass(frozen=True)
class UnfoldedMatrix:
    """A k-unfolding: ``p_k`` rows, one column per k-mode vector."""

    mode: int
    matrix: np.ndarray

    def __post_init__(self):
        arr = _own_array(self.matrix, min_ndim=2)
        if arr.ndim != 2:
            raise ValueError("unfolded matrix must be two-dimensional")
        if self.mode < 1:
            raise ValueError("mode must be >= 1")
        object.__setattr__(self, "matrix", arr)

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]


def _check_mode(k, order):
    if not 1 <= k <= order:
        raise ValueError(f"mode {k} out of range for an order-{order} tensor")


def _cyclic_axes(k, order):
    # 0-based axes following mode k in cyclic order
    ax = k - 1
    return list(range(ax + 1, order)) + list(range(ax))


def unfold(t: DenseTensor, k: int) -> UnfoldedMatrix:
    """k-unfolding of ``t`` with the cyclic column ordering (module docstring)."""
    _check_mode(k, t.order)
    cyc = _cyclic_axes(k, t.order)
    mat = np.transpose(t.data, [k - 1] + cyc).reshape(t.dims[k - 1], -1)
    return UnfoldedMatrix(k, mat)


def refold(mat, dims, k: int) -> DenseTensor:
    """Exact inverse of :func:`unfold` for the same ordering convention."""
    dims = tuple(int(d) for d in dims)
    order = len(dims)
    _check_mode(k, order)
    arr = mat.matrix if isinstance(mat, UnfoldedMatrix) else np.asarray(mat, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("expected a matrix")
    cyc = _cyclic_axes(k, order)
    rest = 1
    for i in cyc:
        rest *= dims[i]
    if arr.shape != (dims[k - 1], rest):
        raise ValueError(
            f"matrix of shape {arr.shape} does not match dims {dims} for mode {k}"
        )
    cube = arr.reshape([dims[k - 1]] + [dims[i] for i in cyc])
    inverse = np.argsort([k - 1] + cyc)
    return DenseTensor(np.transpose(cube, inverse))


def mode_multiply(t: DenseTensor, a, k: int) -> DenseTensor:
    """Pre-multiply every k-mode vector of ``t`` by the matrix ``a``."""
    _check_mode(k, t.order)
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("expected a matrix")
    if a.shape[1] != t.dims[k - 1]:
        raise ValueError(
            f"matrix with {a.shape[1]} columns cannot act on mode {k} of length {t.dims[k - 1]}"
        )
    out = np.moveaxis(np.tensordot(a, t.data, axes=(1, k - 1)), 0, k - 1)
    return DenseTensor(out)


def multilinear(t: DenseTensor, mats) -> DenseTensor:
    """Apply one matrix per mode; equals sequential mode products in any order."""
    mats = list(mats)
    if len(mats) != t.order:
        raise ValueError(f"expected {t.order} matrices, got {len(mats)}")
    out = t
    for k, a in enumerate(mats, start=1):
        out = mode_multiply(out, a, k)
    return out


def frobenius_norm(t: DenseTensor) -> float:
    """Square root of the sum of squared entries."""
    return float(np.linalg.norm(t.data.ravel()))


def stacked_unfold(obs: np.ndarray, k: int) -> np.ndarray:
    """Unfold every tensor in a stacked ``(n, p_1, ..., p_m)`` array at once.

    Returns an ``(n, p_k, rho_k)`` array whose slice ``[i]`` equals
    ``unfold(obs[i], k)`` under the package's column ordering.
    """
    order = obs.ndim - 1
    _check_mode(k, order)
    cyc = [i + 1 for i in _cyclic_axes(k, order)]
    out = np.transpose(obs, [0, k] + cyc).reshape(obs.shape[0], obs.shape[k], -1)
    return np.ascontiguousarray(out)


# ---------------------------------------------------------------------------
# TOF1 binary format: magic "TOF1", u8 order m, m x u32 little-endian dims,
# then the payload as little-endian float64 in row-major order.
# ---------------------------------------------------------------------------


def write_tof1(path, t) -> None:
    """Write a tensor (DenseTensor or ndarray) to ``path`` in TOF1 layout."""
    arr = t.data if isinstance(t, DenseTensor) else _own_array(t)
    dims = arr.shape
    with open(path, "wb") as fh:
        fh.write(TOF1_MAGIC)
        fh.write(struct.pack("<B", len(dims)))
        fh.write(struct.pack(f"<{len(dims)}I", *dims))
        fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def read_tof1(path) -> DenseTensor:
    """Read a TOF1 file; raises :class:`TofFormatError` on malformed input."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 5 or blob[:4] != TOF1_MAGIC:
        raise TofFormatError(f"{path}: missing TOF1 magic bytes")
    order = blob[4]
    if order < 1:
        raise TofFormatError(f"{path}: tensor order must be >= 1")
    head = 5 + 4 * order
    if len(blob) < head:
        raise TofFormatError(f"{path}: truncated dimension header")
    dims = struct.unpack(f"<{order}I", blob[5:head])
    if any(d < 1 for d in dims):
        raise TofFormatError(f"{path}: zero-length dimension in header")
    count = 1
    for d in dims:
        count *= d
    if len(blob) != head + 8 * count:
        raise TofFormatError(
            f"{path}: payload has {len(blob) - head} bytes, expected {8 * count}"
        )
    payload = np.frombuffer(blob, dtype="<f8", offset=head, count=count)
    try:
        return DenseTensor(payload.astype(np.float64).reshape(dims))
    except ValueError as exc:
        raise TofFormatError(f"{path}: {exc}") from exc
