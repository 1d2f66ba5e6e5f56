"""Benchmark one-dimensional systems and their (optionally stimulated) orbits.

Four generators are provided: the tent map, the logistic map, the
theta-coordinate of Chirikov's standard map (stored as theta / 2*pi) and the
fractional-parts sequence {alpha * n}.  All orbits live in [0, 1].

A stimulation of intensity ``epsilon`` and period ``tau`` adds ``epsilon`` to
the state at every step index divisible by ``tau``::

    x[n + 1] = F(x[n]) + s[n],   s[n] = epsilon if n % tau == 0 else 0
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Literal, Union

import numpy as np

TWO_PI = 2.0 * math.pi

OverflowPolicy = Literal["wrap", "clamp"]

# exact dyadic numerators must fit comfortably in int64 (differences never grow)
MAX_EXACT_BITS = 62


def _check_open(name: str, value: float, lo: float, hi: float) -> None:
    if not (lo < value < hi):
        raise ValueError(f"{name}={value!r} must lie in ({lo}, {hi})")


@dataclass(frozen=True)
class Tent:
    t: float
    x0: float = 0.17

    def __post_init__(self) -> None:
        if not (0.0 < self.t <= 1.0):
            raise ValueError(f"t={self.t!r} must lie in (0, 1]")
        _check_open("x0", self.x0, 0.0, 1.0)


@dataclass(frozen=True)
class Logistic:
    r: float
    x0: float = 0.317

    def __post_init__(self) -> None:
        if not (0.0 < self.r <= 4.0):
            raise ValueError(f"r={self.r!r} must lie in (0, 4]")
        _check_open("x0", self.x0, 0.0, 1.0)


@dataclass(frozen=True)
class StandardTheta:
    K: float
    I0: float = 0.5
    theta0: float = 0.2

    def __post_init__(self) -> None:
        if not self.K > 0.0:
            raise ValueError(f"K={self.K!r} must be positive")
        _check_open("I0", self.I0, 0.0, TWO_PI)
        _check_open("theta0", self.theta0, 0.0, TWO_PI)


@dataclass(frozen=True)
class FractionalParts:
    alpha: float

    def __post_init__(self) -> None:
        _check_open("alpha", self.alpha, 0.0, 1.0)


SystemSpec = Union[Tent, Logistic, StandardTheta, FractionalParts]

SPEC_KINDS: dict[str, type] = {
    "tent": Tent,
    "logistic": Logistic,
    "standard": StandardTheta,
    "frac": FractionalParts,
}


def spec_kind(spec: SystemSpec) -> str:
    for name, cls in SPEC_KINDS.items():
        if isinstance(spec, cls):
            return name
    raise TypeError(f"not a system spec: {spec!r}")


def spec_to_dict(spec: SystemSpec) -> dict:
    d = {"map": spec_kind(spec)}
    d.update(spec.__dict__)
    return d


def spec_from_dict(d: dict) -> SystemSpec:
    d = dict(d)
    cls = SPEC_KINDS[d.pop("map")]
    return cls(**d)


@dataclass(frozen=True)
class Stimulation:
    epsilon: float
    tau: int

    def __post_init__(self) -> None:
        _check_open("epsilon", self.epsilon, 0.0, 1.0)
        if int(self.tau) != self.tau or self.tau < 2:
            raise ValueError(f"tau={self.tau!r} must be an integer >= 2")


@dataclass(frozen=True, eq=False)
class Orbit:
    """A finite trajectory x_1 ... x_k with values in [0, 1].

    ``numerators`` optionally holds an exact dyadic form of the same data,
    ``values == numerators / 2**scale_bits``; difference kernels use it in
    preference to the floats so that no rounding enters the hierarchy.
    """

    values: np.ndarray
    spec: SystemSpec | None = None
    stimulation: Stimulation | None = None
    numerators: np.ndarray | None = field(default=None, repr=False)
    scale_bits: int = 0

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size < 2:
            raise ValueError("an orbit needs at least two values")
        if not np.all((values >= 0.0) & (values <= 1.0)):
            raise ValueError("orbit values must lie in [0, 1]")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.numerators is not None:
            nums = np.array(self.numerators, dtype=np.int64)
            if nums.shape != values.shape:
                raise ValueError("numerators must match values in shape")
            nums.setflags(write=False)
            object.__setattr__(self, "numerators", nums)

    def __len__(self) -> int:
        return self.values.size

    @property
    def length(self) -> int:
        return self.values.size

    @property
    def is_exact(self) -> bool:
        return self.numerators is not None

    @property
    def provenance(self) -> str:
        if self.spec is None:
            return "external"
        text = repr(self.spec)
        if self.stimulation is not None:
            text += f" + {self.stimulation!r}"
        return text

    def head(self, k: int) -> Orbit:
        """The first ``k`` values, keeping provenance and the exact form."""
        if not 2 <= k <= len(self):
            raise ValueError(f"cannot take {k} values from an orbit of length {len(self)}")
        nums = None if self.numerators is None else self.numerators[:k]
        return Orbit(self.values[:k], self.spec, self.stimulation, nums, self.scale_bits)


def iterate_tent(x: float, t: float) -> float:
    if not (0.0 < t <= 1.0):
        raise ValueError(f"t={t!r} must lie in (0, 1]")
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"x={x!r} must lie in [0, 1]")
    return t * (1.0 - 2.0 * abs(0.5 - x))


def iterate_logistic(x: float, r: float) -> float:
    if not (0.0 < r <= 4.0):
        raise ValueError(f"r={r!r} must lie in (0, 4]")
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"x={x!r} must lie in [0, 1]")
    return r * x * (1.0 - x)


def _reduce_angle(theta: float) -> float:
    theta = math.fmod(theta, TWO_PI)
    if theta < 0.0:
        theta += TWO_PI
    # fmod of a tiny negative angle can round up to exactly 2*pi
    if theta >= TWO_PI:
        theta = 0.0
    return theta


def step_standard(I: float, theta: float, K: float) -> tuple[float, float]:
    """One step of the standard map; the angle is reduced into [0, 2*pi)."""
    if not K > 0.0:
        raise ValueError(f"K={K!r} must be positive")
    I_next = I + K * math.sin(theta)
    return I_next, _reduce_angle(theta + I_next)


def stimulation_term(n: int, stim: Stimulation | None) -> float:
    if n < 1:
        raise ValueError(f"step index n={n} must be >= 1")
    if stim is None or n % stim.tau:
        return 0.0
    return stim.epsilon


def _dyadic(alpha: float) -> tuple[int, int] | None:
    frac = Fraction(alpha)
    bits = frac.denominator.bit_length() - 1
    if bits > MAX_EXACT_BITS:
        return None
    return frac.numerator, bits


def fractional_parts_orbit(alpha: float, k: int, *, start: int = 1) -> Orbit:
    """({alpha*start}, ..., {alpha*(start + k - 1)}) for the double ``alpha``.

    ``alpha`` is taken as the exact binary rational it is stored as, so the
    sequence is accumulated in integers and never drifts.
    """
    spec = FractionalParts(alpha)
    if k < 2:
        raise ValueError(f"k={k} must be >= 2")
    frac = Fraction(alpha)
    num, den = frac.numerator, frac.denominator
    acc = (num * start) % den
    raw = []
    for _ in range(k):
        raw.append(acc)
        acc += num
        if acc >= den:
            acc -= den
    # int / int true division is correctly rounded
    values = np.array([a / den for a in raw], dtype=np.float64)
    dyadic = _dyadic(alpha)
    if dyadic is None:
        return Orbit(values, spec)
    return Orbit(values, spec, numerators=np.array(raw, dtype=np.int64), scale_bits=dyadic[1])


def _push(value: float, overflow: OverflowPolicy) -> float:
    if value > 1.0:
        return math.fmod(value, 1.0) if overflow == "wrap" else 1.0
    return value


def generate_orbit(
    spec: SystemSpec,
    k: int,
    stim: Stimulation | None = None,
    *,
    overflow: OverflowPolicy = "wrap",
    burn_in: int = 0,
) -> Orbit:
    """Generate x_1 ... x_k of ``spec``, optionally stimulated.

    ``burn_in`` unperturbed steps are taken before x_1 is recorded; step
    indices for the stimulation count from x_1.
    """
    if k < 2:
        raise ValueError(f"k={k} must be >= 2")
    if burn_in < 0:
        raise ValueError("burn_in must be non-negative")
    if overflow not in ("wrap", "clamp"):
        raise ValueError(f"unknown overflow policy {overflow!r}")

    if isinstance(spec, FractionalParts) and stim is None:
        return fractional_parts_orbit(spec.alpha, k, start=1 + burn_in)

    out = np.empty(k, dtype=np.float64)
    eps = stim.epsilon if stim is not None else 0.0
    tau = stim.tau if stim is not None else 0

    if isinstance(spec, StandardTheta):
        K, I, theta = spec.K, spec.I0, spec.theta0
        for _ in range(burn_in):
            I, theta = step_standard(I, theta, K)
        out[0] = theta / TWO_PI
        for n in range(1, k):
            I = I + K * math.sin(theta)
            theta = theta + I
            if tau and n % tau == 0:
                theta += eps
            theta = _reduce_angle(theta)
            out[n] = theta / TWO_PI
        return Orbit(out, spec, stim)

    if isinstance(spec, Tent):
        t = spec.t
        def F(x: float) -> float:
            return t * (1.0 - 2.0 * abs(0.5 - x))
        x = spec.x0
    elif isinstance(spec, Logistic):
        r = spec.r
        def F(x: float) -> float:
            return r * x * (1.0 - x)
        x = spec.x0
    elif isinstance(spec, FractionalParts):
        a = spec.alpha
        def F(x: float) -> float:
            y = x + a
            return y - 1.0 if y >= 1.0 else y
        x = spec.alpha
    else:
        raise TypeError(f"not a system spec: {spec!r}")

    for _ in range(burn_in):
        x = F(x)
    out[0] = x
    for n in range(1, k):
        x = F(x)
        if tau and n % tau == 0:
            x = _push(x + eps, overflow)
        out[n] = x
    return Orbit(out, spec, stim)


def external_orbit(values, *, normalize: bool = False) -> Orbit:
    """Wrap external data as an orbit; ``normalize`` min-max scales into [0, 1]."""
    arr = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("external data contains non-finite values")
    if normalize:
        lo, hi = float(arr.min()), float(arr.max())
        arr = (arr - lo) / (hi - lo) if hi > lo else np.zeros_like(arr)
    return Orbit(arr)


def save_orbit_csv(orbit: Orbit, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        for v in orbit.values:
            fh.write(f"{float(v)!r}\n")


def read_series_csv(path: str | Path) -> np.ndarray:
    """Read a time series: one value per line, or ``index,value`` rows.

    Lines starting with ``#`` and a non-numeric header row are skipped.
    """
    vals: list[float] = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            cell = row[-1].strip()
            try:
                vals.append(float(cell))
            except ValueError:
                if vals:
                    raise ValueError(f"bad value {cell!r} in {path}") from None
    return np.array(vals, dtype=np.float64)


def load_orbit_csv(path: str | Path, *, normalize: bool = False) -> Orbit:
    return external_orbit(read_series_csv(path), normalize=normalize)
