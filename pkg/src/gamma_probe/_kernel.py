"""In-place absolute-difference kernel.

Reducing a length-k buffer ``steps`` times leaves the order-``steps`` row in
its leading ``k - steps`` slots.  Works for float64 and exact int64 buffers.
"""

from __future__ import annotations

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def _reduce_loop(buf, m, steps):
    for _ in range(steps):
        m -= 1
        for i in range(m):
            buf[i] = abs(buf[i + 1] - buf[i])
    return m


def _reduce_numpy(buf: np.ndarray, m: int, steps: int) -> int:
    for _ in range(steps):
        np.subtract(buf[1:m], buf[: m - 1], out=buf[: m - 1])
        np.abs(buf[: m - 1], out=buf[: m - 1])
        m -= 1
    return m


if numba is not None:
    _reduce_jit = numba.njit(nogil=True, cache=True)(_reduce_loop)
else:  # pragma: no cover
    _reduce_jit = None

KERNELS = ("auto", "numba", "numpy")


def reduce_rows(buf: np.ndarray, m: int, steps: int, kernel: str = "auto") -> int:
    """Advance the live prefix ``buf[:m]`` by ``steps`` difference orders.

    Returns the new live length ``m - steps``.  ``buf`` is overwritten.
    """
    if steps < 0 or steps > m - 1:
        raise ValueError(f"cannot take {steps} differences of {m} values")
    if steps == 0:
        return m
    if kernel == "numpy" or (kernel == "auto" and _reduce_jit is None):
        return _reduce_numpy(buf, m, steps)
    if kernel not in ("auto", "numba"):
        raise ValueError(f"unknown kernel {kernel!r}")
    if _reduce_jit is None:
        raise RuntimeError("numba kernel requested but numba is not installed")
    return int(_reduce_jit(buf, m, steps))
