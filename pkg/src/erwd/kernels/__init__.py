"""Kernel dispatch.

``ERWD_BACKEND=numpy`` forces the pure-numpy path; otherwise the numba
kernels are used when numba imports.  ``ERWD_THREADS`` sets the numba thread
count (results never depend on it).
"""
from __future__ import annotations

import os
import warnings
from dataclasses import dataclass

import numpy as np

from . import _numpy_impl

# numba probes TBB on first parallel launch; the workqueue/omp layers serve fine
warnings.filterwarnings("ignore", message="The TBB threading layer")

try:
    from . import _numba_impl
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba_impl = None

HAS_NUMBA = _numba_impl is not None


def backend_name() -> str:
    requested = os.environ.get("ERWD_BACKEND", "").strip().lower()
    if requested == "numpy" or not HAS_NUMBA:
        return "numpy"
    if requested not in ("", "numba"):
        raise ValueError(f"ERWD_BACKEND must be 'numba' or 'numpy', got {requested!r}")
    return "numba"


def _impl(backend: str | None):
    name = backend or backend_name()
    if name == "numba":
        if not HAS_NUMBA:
            raise RuntimeError("numba backend requested but numba is not importable")
        threads = os.environ.get("ERWD_THREADS")
        if threads:
            import numba

            numba.set_num_threads(int(threads))
        return _numba_impl
    return _numpy_impl


@dataclass
class BlockResult:
    """Raw per-replica output of one kernel call."""

    sums: np.ndarray        # (m, len(checkpoints)) partial sums at the checkpoints
    first_two: np.ndarray   # (m, 2) X1, X2 (X2 = 0 when n == 1)
    tau: np.ndarray         # first index with a zero step, 0 if none up to n
    s_tau: np.ndarray       # partial sum at tau
    late: np.ndarray        # number of non-zero steps after tau
    steps: np.ndarray | None


def simulate_block(keys, regime: int, policy: int, init: int, p: float, q: float, n: int,
                   checkpoints, record: bool = False, backend: str | None = None) -> BlockResult:
    keys = np.ascontiguousarray(keys, dtype=np.uint64)
    checkpoints = np.ascontiguousarray(checkpoints, dtype=np.int64)
    if n < 1:
        raise ValueError("horizon n must be >= 1")
    if checkpoints.size == 0 or np.any(np.diff(checkpoints) <= 0):
        raise ValueError("checkpoints must be a non-empty strictly increasing sequence")
    if checkpoints[0] < 1 or checkpoints[-1] > n:
        raise ValueError("checkpoints must lie in [1, n]")
    m = keys.shape[0]
    sums = np.zeros((m, checkpoints.size), dtype=np.int64)
    first_two = np.zeros((m, 2), dtype=np.int8)
    tau = np.zeros(m, dtype=np.int64)
    s_tau = np.zeros(m, dtype=np.int64)
    late = np.zeros(m, dtype=np.int64)
    steps = np.zeros((m, n) if record else (1, 1), dtype=np.int8)
    _impl(backend).simulate_block(keys, int(regime), int(policy), int(init), float(p), float(q),
                                  int(n), checkpoints, sums, first_two, tau, s_tau, late,
                                  steps, bool(record))
    return BlockResult(sums, first_two, tau, s_tau, late, steps if record else None)


def affine_recurrence(coef, forcing, x1: float, backend: str | None = None) -> np.ndarray:
    coef = np.ascontiguousarray(coef, dtype=np.float64)
    forcing = np.ascontiguousarray(forcing, dtype=np.float64)
    return _impl(backend).affine_recurrence(coef, forcing, float(x1))
