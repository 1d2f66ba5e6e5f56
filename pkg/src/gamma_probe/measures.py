"""Irregularity and chaos measures: the flip density gamma, Lyapunov
exponents, binary Shannon entropy and attractor-dimension bounds.

gamma at difference order N is the number of symbol changes in the first N
monotony bits of the order-N difference row, divided by N.  The orbit used
has length 2N + 1, the shortest that yields N bits at order N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from ._kernel import reduce_rows
from .dynsys import (
    Logistic,
    Orbit,
    OverflowPolicy,
    StandardTheta,
    Stimulation,
    SystemSpec,
    Tent,
    generate_orbit,
)
from .findiff import flip_count, monotony_bits

SIZING_RULE = "k = 2N + 1"


class SingularDerivativeError(ArithmeticError):
    """ln|F'| is undefined because the derivative vanished on the orbit."""


@dataclass(frozen=True)
class GammaEstimate:
    N: int
    k: int
    flip_count: int
    gamma: float
    spec: SystemSpec | None = None
    stimulation: Stimulation | None = None
    # gamma recomputed at order N // 2 on the same orbit prefix
    half_gamma: float | None = None

    @property
    def convergence_gap(self) -> float | None:
        if self.half_gamma is None:
            return None
        return abs(self.gamma - self.half_gamma)

    def diagnostic(self) -> dict:
        return {
            "half_N": self.N // 2 if self.half_gamma is not None else None,
            "half_gamma": self.half_gamma,
            "gap": self.convergence_gap,
        }


def required_length(N: int) -> int:
    return 2 * N + 1


def flips_at_order(orbit: Orbit, N: int, *, kernel: str = "auto") -> int:
    """Flip count of the order-N monotony bits over the first 2N + 1 values."""
    k = required_length(N)
    src = orbit.values if orbit.numerators is None else orbit.numerators
    buf = src[:k].copy()
    m = reduce_rows(buf, k, N, kernel)
    return flip_count(monotony_bits(buf[:m]))


def gamma_from_orbit(
    orbit: Orbit,
    N: int,
    *,
    diagnostic: bool = True,
    kernel: str = "auto",
) -> GammaEstimate:
    """gamma of given data at order N; values past index 2N + 1 are ignored."""
    if N < 2:
        raise ValueError(f"difference order N={N} must be >= 2")
    need = required_length(N)
    if len(orbit) < need:
        raise ValueError(f"orbit too short: need 2N+1 = {need} values for N={N}, got {len(orbit)}")
    flips = flips_at_order(orbit, N, kernel=kernel)
    half = None
    if diagnostic and N >= 4:
        half = flips_at_order(orbit, N // 2, kernel=kernel) / (N // 2)
    return GammaEstimate(N, need, flips, flips / N, orbit.spec, orbit.stimulation, half)


def gamma_estimate(
    spec: SystemSpec,
    N: int,
    stim: Stimulation | None = None,
    *,
    overflow: OverflowPolicy = "wrap",
    burn_in: int = 0,
    diagnostic: bool = True,
    kernel: str = "auto",
) -> GammaEstimate:
    if N < 2:
        raise ValueError(f"difference order N={N} must be >= 2")
    orbit = generate_orbit(spec, required_length(N), stim, overflow=overflow, burn_in=burn_in)
    return gamma_from_orbit(orbit, N, diagnostic=diagnostic, kernel=kernel)


Method = Literal["numeric", "analytic_tent", "analytic_standard_largeK"]


@dataclass(frozen=True)
class LyapunovEstimate:
    lam: float
    method: Method
    N: int | None = None
    valid: bool = True

    @property
    def bits(self) -> float:
        """The exponent in log2 units."""
        return self.lam / math.log(2.0)


def lyapunov_numeric(spec: SystemSpec, N: int, *, burn_in: int = 0) -> LyapunovEstimate:
    """Orbit average of ln|F'(x)| over x_1 ... x_N (natural-log units)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if isinstance(spec, Tent):
        # |F'| = 2t everywhere except the kink, where the a.e. value is used
        term = math.log(2.0 * spec.t)
        return LyapunovEstimate(math.fsum([term] * N) / N, "numeric", N)
    if not isinstance(spec, Logistic):
        raise TypeError(f"numeric Lyapunov exponent needs a tent or logistic map, got {spec!r}")
    orbit = generate_orbit(spec, max(N, 2), burn_in=burn_in)
    r = spec.r
    logs = []
    for i, x in enumerate(orbit.values[:N].tolist(), start=1):
        d = abs(r * (1.0 - 2.0 * x))
        if d == 0.0:
            raise SingularDerivativeError(f"F'(x_{i}) = 0 at x_{i} = {x!r}")
        logs.append(math.log(d))
    return LyapunovEstimate(math.fsum(logs) / N, "numeric", N)


# the large-K standard-map formula is quoted for K around 6 and above
STANDARD_VALID_K = 6.0


def lyapunov_analytic(spec: SystemSpec) -> LyapunovEstimate:
    if isinstance(spec, Tent):
        return LyapunovEstimate(math.log(2.0 * spec.t), "analytic_tent")
    if isinstance(spec, StandardTheta):
        return LyapunovEstimate(
            math.log(spec.K / 2.0), "analytic_standard_largeK", valid=spec.K >= STANDARD_VALID_K
        )
    raise TypeError(f"no closed-form Lyapunov exponent for {spec!r}")


def positive_part(lam: float) -> float:
    return max(0.0, lam)


def response_ratio(gamma: float, lam: float) -> float | None:
    """gamma / max(0, lam), or None where the positive part vanishes."""
    lp = positive_part(lam)
    return gamma / lp if lp > 0.0 else None


def shannon_H(x: float) -> float:
    """x log2 x + (1 - x) log2 (1 - x); non-positive on (0, 1)."""
    if not 0.0 < x < 1.0:
        raise ValueError(f"x={x!r} must lie in (0, 1)")
    return x * math.log2(x) + (1.0 - x) * math.log2(1.0 - x)


def dim_bound_entropy(gamma: float) -> float:
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"entropy bound is undefined at gamma={gamma!r}")
    return -shannon_H(gamma)


def dim_bound_runlength(K: int) -> float:
    """Dimension bound when same-symbol runs never exceed K."""
    if K < 2:
        raise ValueError(f"run-length bound K={K} must be >= 2")
    return 1.0 - 1.0 / (4.0 * math.log(2.0) * (K - 1))
