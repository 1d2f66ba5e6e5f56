"""Absolute finite-difference hierarchy and the binary codes read off it.

Row 0 is the orbit; row s is ``|row[s-1][i+1] - row[s-1][i]|``.  The
monotony bit of a row at position p is 0 when the row does not decrease
there (``row[p+1] >= row[p]``, ties included) and 1 when it decreases.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._kernel import reduce_rows
from .dynsys import Orbit


@dataclass(frozen=True, eq=False)
class DifferenceRow:
    order: int
    values: np.ndarray
    # exact dyadic form, values == numerators / 2**scale_bits
    numerators: np.ndarray | None = None
    scale_bits: int = 0

    def __len__(self) -> int:
        return self.values.size

    @property
    def keys(self) -> np.ndarray:
        """The array comparisons should be made on (exact when available)."""
        return self.values if self.numerators is None else self.numerators


@dataclass(frozen=True, eq=False)
class MonotonySequence:
    order: int
    bits: np.ndarray
    flip_count: int
    max_run: int

    def __len__(self) -> int:
        return self.bits.size

    def to_ascii(self) -> str:
        return bits_to_str(self.bits)


def bits_to_str(bits) -> str:
    return np.asarray(bits, dtype=np.uint8).tobytes().translate(bytes.maketrans(b"\x00\x01", b"01")).decode()


def _scratch(orbit: Orbit) -> tuple[np.ndarray, bool]:
    if orbit.numerators is not None:
        return orbit.numerators.copy(), True
    return orbit.values.copy(), False


def _row_from(buf: np.ndarray, m: int, order: int, exact: bool, scale_bits: int) -> DifferenceRow:
    live = buf[:m].copy()
    if exact:
        values = np.ldexp(live.astype(np.float64), -scale_bits)
        return DifferenceRow(order, values, live, scale_bits)
    return DifferenceRow(order, live)


def difference_row(orbit: Orbit, s: int, *, kernel: str = "auto") -> DifferenceRow:
    """The order-``s`` absolute difference row, in O(s*k) time and O(k) memory."""
    k = len(orbit)
    if not 0 <= s <= k - 1:
        raise ValueError(f"order s={s} out of range for an orbit of length {k}")
    buf, exact = _scratch(orbit)
    m = reduce_rows(buf, k, s, kernel)
    return _row_from(buf, m, s, exact, orbit.scale_bits)


def monotony_bits(keys: np.ndarray) -> np.ndarray:
    return (keys[1:] < keys[:-1]).astype(np.uint8)


def flip_count(bits: np.ndarray) -> int:
    return int(np.count_nonzero(bits[1:] != bits[:-1]))


def max_run_length(ms: MonotonySequence | Sequence[int] | np.ndarray) -> int:
    """Length of the longest run of identical bits."""
    bits = np.asarray(ms.bits if isinstance(ms, MonotonySequence) else ms)
    if bits.size == 0:
        raise ValueError("empty bit sequence")
    edges = np.flatnonzero(bits[1:] != bits[:-1]) + 1
    bounds = np.concatenate(([0], edges, [bits.size]))
    return int(np.diff(bounds).max())


def monotony_sequence(row: DifferenceRow) -> MonotonySequence:
    if len(row) < 2:
        raise ValueError("a monotony sequence needs a row of at least two values")
    bits = monotony_bits(row.keys)
    return MonotonySequence(row.order, bits, flip_count(bits), max_run_length(bits))


@dataclass(frozen=True, eq=False)
class ZetaRepresentation:
    """Lossless encoding of a finite orbit by its difference hierarchy.

    ``r_codes[s-1]`` and ``mu[s-1]`` are the monotony bits and the minimum of
    row s (s = 1..m); ``rho`` is row m.  Rebuilding row s-1 from row s needs
    the bits and minimum of row s-1, so those of row 0 are kept as
    ``base_code`` and ``base_min``.
    """

    m: int
    r_codes: tuple[np.ndarray, ...]
    mu: np.ndarray
    rho: np.ndarray
    base_code: np.ndarray
    base_min: float

    @property
    def k(self) -> int:
        return self.rho.size + self.m


def decompose(orbit: Orbit, m: int | None = None) -> ZetaRepresentation:
    k = len(orbit)
    if m is None:
        m = k // 2
    if not 1 <= m <= k - 1:
        raise ValueError(f"depth m={m} out of range for an orbit of length {k}")
    row = orbit.values.astype(np.float64)
    base_code = monotony_bits(row)
    base_min = float(row.min())
    codes, mins = [], []
    for _ in range(m):
        row = np.abs(np.diff(row))
        codes.append(monotony_bits(row))
        mins.append(row.min())
    return ZetaRepresentation(m, tuple(codes), np.array(mins), row, base_code, base_min)


def _rebuild(upper: np.ndarray, code: np.ndarray, minimum: float) -> np.ndarray:
    steps = np.where(code == 0, upper, -upper)
    prefix = np.concatenate(([0.0], np.cumsum(steps)))
    return minimum + (prefix - prefix.min())


def reconstruct(zeta: ZetaRepresentation) -> Orbit:
    m = zeta.m
    if len(zeta.r_codes) != m or zeta.mu.size != m:
        raise ValueError("zeta representation has inconsistent depth")
    k = zeta.k
    if zeta.base_code.size != k - 1:
        raise ValueError("base code length does not match the orbit length")
    for s, code in enumerate(zeta.r_codes, start=1):
        if code.size != max(k - s - 1, 0):
            raise ValueError(f"code of order {s} has length {code.size}, expected {k - s - 1}")
    row = np.asarray(zeta.rho, dtype=np.float64)
    for s in range(m, 0, -1):
        below = s - 1
        code = zeta.base_code if below == 0 else zeta.r_codes[below - 1]
        minimum = zeta.base_min if below == 0 else float(zeta.mu[below - 1])
        row = _rebuild(row, code, minimum)
    return Orbit(np.clip(row, 0.0, 1.0))


@dataclass(frozen=True)
class ConjugateOrbit:
    """Term n is the first ``L`` monotony bits of difference order n."""

    terms: tuple[str, ...]
    L: int

    def __len__(self) -> int:
        return len(self.terms)

    def zero_tail_start(self) -> int | None:
        """Smallest order n0 such that every term of order >= n0 is all zero."""
        zero = "0" * self.L
        n0 = None
        for n in range(len(self.terms), 0, -1):
            if self.terms[n - 1] != zero:
                break
            n0 = n
        return n0


def conjugate_orbit(orbit: Orbit, n_max: int, L: int, *, kernel: str = "auto") -> ConjugateOrbit:
    k = len(orbit)
    if n_max < 1 or L < 1:
        raise ValueError("n_max and L must be positive")
    if k < n_max + L + 1:
        raise ValueError(f"orbit too short: need k >= n_max + L + 1 = {n_max + L + 1}, got {k}")
    buf, _ = _scratch(orbit)
    m = k
    terms = []
    for _ in range(n_max):
        m = reduce_rows(buf, m, 1, kernel)
        terms.append(bits_to_str(monotony_bits(buf[: L + 1])))
    return ConjugateOrbit(tuple(terms), L)


def detect_period(terms: Sequence) -> int | None:
    """Smallest eventual period of a sequence of exactly comparable terms.

    A period p is accepted when the terms repeat with step p from some
    preperiod no longer than half the sequence, with at least two full
    periods observed after it.
    """
    terms = list(terms)
    n = len(terms)
    if n < 4:
        return None
    for p in range(1, n // 2 + 1):
        last_bad = -1
        for i in range(n - p - 1, -1, -1):
            if terms[i] != terms[i + p]:
                last_bad = i
                break
        pre = last_bad + 1
        if pre <= n // 2 and n - pre >= 2 * p:
            return p
    return None
