"""Perturbation-response experiments.

gamma(eps, tau) is gamma of the orbit stimulated with intensity eps and
period tau.  Sweeps evaluate it over a grid of periods, take the maximum
over periods for each intensity, smooth that curve over an intensity window,
and pair gamma with the Lyapunov exponent across control parameters.

Grid points are independent; they may be evaluated on a thread pool but
results always come back in grid order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, TypeVar

from .dynsys import (
    SPEC_KINDS,
    OverflowPolicy,
    StandardTheta,
    Stimulation,
    SystemSpec,
)
from .measures import gamma_estimate, lyapunov_analytic, lyapunov_numeric

THREADS_ENV = "GAMMA_PROBE_THREADS"
DEFAULT_TAU_MAX = 100
MAX_TAU = 10**6

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(threads: int | None = None) -> int:
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1") or 1)
    if threads < 1:
        raise ValueError("thread count must be >= 1")
    return threads


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: int | None = None) -> list[R]:
    items = list(items)
    n = resolve_threads(threads)
    if n == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class TauSweep:
    spec: SystemSpec
    epsilon: float
    N: int
    tau_values: tuple[int, ...]
    gammas: tuple[float, ...]
    baseline_gamma: float

    @property
    def best(self) -> tuple[float, int]:
        """(max gamma, smallest tau achieving it)."""
        g = max(self.gammas)
        return g, self.tau_values[self.gammas.index(g)]

    def near_max_density(self, within: float = 0.02) -> float:
        """Fraction of swept periods whose gamma is within ``within`` of the max."""
        g = max(self.gammas)
        return sum(1 for x in self.gammas if x >= g - within) / len(self.gammas)


def _check_taus(tau_values: Iterable[int]) -> tuple[int, ...]:
    taus = tuple(int(t) for t in tau_values)
    if not taus:
        raise ValueError("empty period range")
    for t in taus:
        if not 2 <= t <= MAX_TAU:
            raise ValueError(f"period tau={t} outside [2, {MAX_TAU}]")
    return taus


def sweep_tau(
    spec: SystemSpec,
    epsilon: float,
    tau_values: Iterable[int] = range(2, DEFAULT_TAU_MAX + 1),
    N: int = 30000,
    *,
    overflow: OverflowPolicy = "wrap",
    burn_in: int = 0,
    threads: int | None = None,
    kernel: str = "auto",
) -> TauSweep:
    taus = _check_taus(tau_values)
    stims = [Stimulation(epsilon, t) for t in taus]

    def one(stim: Stimulation | None) -> float:
        return gamma_estimate(
            spec, N, stim, overflow=overflow, burn_in=burn_in, diagnostic=False, kernel=kernel
        ).gamma

    results = ordered_map(one, [None, *stims], threads)
    return TauSweep(spec, epsilon, N, taus, tuple(results[1:]), results[0])


def gamma_max(
    spec: SystemSpec,
    epsilon: float,
    tau_max_bound: int = DEFAULT_TAU_MAX,
    N: int = 30000,
    **kw,
) -> tuple[float, int]:
    """Maximum of gamma(eps, tau) over 2 <= tau <= tau_max_bound, and its argmax."""
    if tau_max_bound < 2:
        raise ValueError("tau_max_bound must be >= 2")
    return sweep_tau(spec, epsilon, range(2, tau_max_bound + 1), N, **kw).best


@dataclass(frozen=True)
class EpsilonSweep:
    spec: SystemSpec
    N: int
    tau_max_bound: int
    epsilon_grid: tuple[float, ...]
    gamma_max: tuple[float, ...]
    tau_argmax: tuple[int, ...]


def sweep_epsilon(
    spec: SystemSpec,
    epsilon_grid: Sequence[float],
    tau_max_bound: int = DEFAULT_TAU_MAX,
    N: int = 30000,
    *,
    overflow: OverflowPolicy = "wrap",
    burn_in: int = 0,
    threads: int | None = None,
    kernel: str = "auto",
) -> EpsilonSweep:
    grid = tuple(float(e) for e in epsilon_grid)
    if not grid:
        raise ValueError("empty intensity grid")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("intensity grid must be increasing")
    if tau_max_bound < 2:
        raise ValueError("tau_max_bound must be >= 2")
    taus = range(2, tau_max_bound + 1)
    # validates every intensity before any work starts
    jobs = [Stimulation(e, t) for e in grid for t in taus]

    def one(stim: Stimulation) -> float:
        return gamma_estimate(
            spec, N, stim, overflow=overflow, burn_in=burn_in, diagnostic=False, kernel=kernel
        ).gamma

    flat = ordered_map(one, jobs, threads)
    width = len(taus)
    gmax, targ = [], []
    for j in range(len(grid)):
        block = flat[j * width:(j + 1) * width]
        g = max(block)
        gmax.append(g)
        targ.append(taus[block.index(g)])
    return EpsilonSweep(spec, N, tau_max_bound, grid, tuple(gmax), tuple(targ))


def mu_smooth(eps_sweep: EpsilonSweep, s: float) -> list[tuple[float, float]]:
    """Forward window average of gamma(eps) over [eps, eps + s) on the grid."""
    if not s > 0:
        raise ValueError("window s must be positive")
    grid, g = eps_sweep.epsilon_grid, eps_sweep.gamma_max
    if len(grid) < 2:
        raise ValueError("smoothing needs at least two grid points")
    out = []
    for e in grid:
        window = [gt for t, gt in zip(grid, g) if e <= t < e + s]
        # e itself is always inside its own window
        out.append((e, sum(window) / len(window)))
    return out


def nonincreasing_fraction(values: Sequence[float]) -> float:
    pairs = list(zip(values, values[1:]))
    if not pairs:
        raise ValueError("need at least two values")
    return sum(1 for a, b in pairs if b <= a) / len(pairs)


@dataclass(frozen=True)
class ParamSweep:
    family: str
    N: int
    param_grid: tuple[float, ...]
    gammas: tuple[float, ...]
    lambdas: tuple[float, ...]
    lambda_method: str
    lambda_valid: tuple[bool, ...]


_PARAM_NAME = {"tent": "t", "logistic": "r", "standard": "K"}


def make_spec(family: str, param: float, **init) -> SystemSpec:
    if family not in _PARAM_NAME:
        raise ValueError(f"unknown map family {family!r}")
    return SPEC_KINDS[family](**{_PARAM_NAME[family]: param}, **init)


def sweep_param(
    family: str,
    param_grid: Sequence[float],
    N: int = 30000,
    *,
    init: dict | None = None,
    burn_in: int = 0,
    threads: int | None = None,
    kernel: str = "auto",
) -> ParamSweep:
    """gamma and the Lyapunov exponent across a control-parameter grid.

    Tent and logistic exponents are orbit averages over N iterates; the
    standard map gets the large-K closed form, flagged outside its range.
    """
    init = init or {}
    grid = tuple(float(p) for p in param_grid)
    specs = [make_spec(family, p, **init) for p in grid]

    def one(spec: SystemSpec):
        g = gamma_estimate(spec, N, burn_in=burn_in, diagnostic=False, kernel=kernel).gamma
        if isinstance(spec, StandardTheta):
            lam = lyapunov_analytic(spec)
        else:
            lam = lyapunov_numeric(spec, N, burn_in=burn_in)
        return g, lam

    res = ordered_map(one, specs, threads)
    method = res[0][1].method if res else ""
    return ParamSweep(
        family,
        N,
        grid,
        tuple(g for g, _ in res),
        tuple(l.lam for _, l in res),
        method,
        tuple(l.valid for _, l in res),
    )
