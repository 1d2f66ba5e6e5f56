"""gamma-probe command line.

Subcommands: orbit, gamma, sweep-tau, sweep-param, sweep-eps, theorem1.

Every output embeds the fully resolved experiment config (``# config: {...}``
in CSV, a ``config`` key in JSON); ``--config FILE`` replays it from a JSON
config or from any previous output file.  Exit codes: 0 success, 2 usage or
config error, 3 runtime or numeric error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from . import __version__
from .dynsys import (
    FractionalParts,
    Logistic,
    StandardTheta,
    Stimulation,
    SystemSpec,
    Tent,
    generate_orbit,
    load_orbit_csv,
)
from .findiff import conjugate_orbit, detect_period
from .measures import SIZING_RULE, gamma_estimate, gamma_from_orbit
from .response import (
    DEFAULT_TAU_MAX,
    mu_smooth,
    sweep_epsilon,
    sweep_param,
    sweep_tau,
)

COMMANDS = ("orbit", "gamma", "sweep-tau", "sweep-param", "sweep-eps", "theorem1")
MAPS = ("tent", "logistic", "standard", "frac")

# control parameters and initial values used for the reference experiments
MAP_DEFAULTS = {
    "tent": {"t": 0.7, "x0": 0.17},
    "logistic": {"r": 3.7, "x0": 0.317},
    "standard": {"K": 0.6, "I0": 0.5, "theta0": 0.2},
    "frac": {"alpha": 0.3141421356},
}
DEFAULT_N = {"tent": 30000, "logistic": 30000, "standard": 40000, "frac": 30000}


class UsageError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str
    map: str | None = None
    t: float | None = None
    r: float | None = None
    K: float | None = None
    alpha: float | None = None
    x0: float | None = None
    I0: float | None = None
    theta0: float | None = None
    k: int | None = None
    N: int | None = None
    eps: float | None = None
    tau: int | None = None
    tau_max: int | None = None
    grid: str | None = None
    loggrid: str | None = None
    s: float | None = None
    input: str | None = None
    normalize: bool = False
    n_max: int | None = None
    L: int | None = None
    format: str = "csv"
    overflow: str = "wrap"
    burn_in: int = 0
    lambda_base: str = "e"

    def to_json(self) -> str:
        return json.dumps(asdict(self), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentConfig:
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> ExperimentConfig:
        return cls.from_dict(json.loads(text))

    def resolved(self) -> ExperimentConfig:
        """Fill in map-dependent defaults so the config is self-contained."""
        d = asdict(self)
        if d["command"] not in COMMANDS:
            raise UsageError(f"unknown command {d['command']!r}")
        if d["command"] == "theorem1":
            d["map"] = "frac"
        if d["map"] is None and d["input"] is None:
            raise UsageError("--map is required")
        if d["map"] is not None:
            if d["map"] not in MAPS:
                raise UsageError(f"unknown map {d['map']!r}")
            for key, val in MAP_DEFAULTS[d["map"]].items():
                if d[key] is None:
                    d[key] = val
            if d["N"] is None and d["command"] not in ("orbit", "theorem1"):
                d["N"] = DEFAULT_N[d["map"]]
        if d["command"] in ("sweep-tau", "sweep-eps") and d["tau_max"] is None:
            d["tau_max"] = DEFAULT_TAU_MAX
        if d["command"] == "theorem1":
            d["n_max"] = 200 if d["n_max"] is None else d["n_max"]
            d["L"] = 64 if d["L"] is None else d["L"]
            if d["k"] is None:
                d["k"] = d["n_max"] + d["L"] + 1
        if d["format"] not in ("csv", "json"):
            raise UsageError(f"unknown format {d['format']!r}")
        if d["overflow"] not in ("wrap", "clamp"):
            raise UsageError(f"unknown overflow policy {d['overflow']!r}")
        if d["lambda_base"] not in ("e", "2"):
            raise UsageError("lambda base must be e or 2")
        return ExperimentConfig(**d)

    def spec(self, param: float | None = None) -> SystemSpec:
        m = self.map
        if m == "tent":
            return Tent(self.t if param is None else param, self.x0)
        if m == "logistic":
            return Logistic(self.r if param is None else param, self.x0)
        if m == "standard":
            return StandardTheta(self.K if param is None else param, self.I0, self.theta0)
        if m == "frac":
            return FractionalParts(self.alpha if param is None else param)
        raise UsageError(f"unknown map {m!r}")

    def init(self) -> dict:
        if self.map == "standard":
            return {"I0": self.I0, "theta0": self.theta0}
        return {"x0": self.x0}

    def stimulation(self) -> Stimulation | None:
        if self.eps is None and self.tau is None:
            return None
        if self.eps is None or self.tau is None:
            raise UsageError("--eps and --tau must be given together")
        return Stimulation(self.eps, self.tau)


def parse_grid(text: str) -> list[float]:
    """``a:b:step`` inclusive linear grid."""
    try:
        a, b, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"grid {text!r} is not of the form a:b:step") from None
    if step <= 0 or b < a:
        raise UsageError(f"grid {text!r} needs a <= b and step > 0")
    n = int(round((b - a) / step))
    return [round(a + i * step, 12) for i in range(n + 1)]


def parse_loggrid(text: str) -> list[float]:
    """``a:b:n`` grid of n log-spaced points from a to b."""
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise UsageError(f"log grid {text!r} is not of the form a:b:n") from None
    if not (0 < a <= b) or n < 1:
        raise UsageError(f"log grid {text!r} needs 0 < a <= b and n >= 1")
    if n == 1:
        return [a]
    la, lb = math.log10(a), math.log10(b)
    return [10 ** (la + (lb - la) * i / (n - 1)) for i in range(n)]


def fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


class Table:
    def __init__(self, config: ExperimentConfig, columns: list[str]):
        self.config = config
        self.columns = columns
        self.meta: dict = {}
        self.rows: list[list] = []

    def render(self) -> str:
        if self.config.format == "json":
            doc = {
                "config": asdict(self.config),
                "metadata": self.meta,
                "columns": self.columns,
                "rows": self.rows,
            }
            return json.dumps(doc, indent=1) + "\n"
        buf = io.StringIO()
        buf.write(f"# config: {self.config.to_json()}\n")
        for key, val in self.meta.items():
            buf.write(f"# {key}: {json.dumps(val)}\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(fmt(v) for v in row) + "\n")
        return buf.getvalue()


def _meta_common(cfg: ExperimentConfig) -> dict:
    return {"sizing_rule": SIZING_RULE, "overflow": cfg.overflow, "burn_in": cfg.burn_in}


def cmd_orbit(cfg: ExperimentConfig) -> tuple[str, str | None]:
    if cfg.k is None or cfg.k < 2:
        raise UsageError("--k must be given and >= 2")
    orbit = generate_orbit(cfg.spec(), cfg.k, cfg.stimulation(), overflow=cfg.overflow, burn_in=cfg.burn_in)
    table = Table(cfg, ["index", "value"])
    table.meta = {"overflow": cfg.overflow, "burn_in": cfg.burn_in, "provenance": orbit.provenance}
    table.rows = [[i, float(v)] for i, v in enumerate(orbit.values, start=1)]
    return table.render(), None


def cmd_gamma(cfg: ExperimentConfig) -> tuple[str, str | None]:
    N = cfg.N
    if N is None:
        raise UsageError("--N is required with --input")
    if cfg.input is not None:
        orbit = load_orbit_csv(cfg.input, normalize=cfg.normalize)
        need = 2 * N + 1
        if len(orbit) < need:
            raise UsageError(f"need 2N+1 = {need} values for N={N}, input has {len(orbit)}")
        est = gamma_from_orbit(orbit, N)
    else:
        est = gamma_estimate(cfg.spec(), N, cfg.stimulation(), overflow=cfg.overflow, burn_in=cfg.burn_in)
    result = {
        "gamma": est.gamma,
        "flip_count": est.flip_count,
        "N": est.N,
        "k": est.k,
        "convergence_diagnostic": est.diagnostic(),
        "sizing_rule": SIZING_RULE,
        "config": asdict(cfg),
    }
    if cfg.format == "json":
        text = json.dumps(result, indent=1) + "\n"
    else:
        table = Table(cfg, ["gamma", "flip_count", "N", "k", "half_gamma", "gap"])
        table.meta = _meta_common(cfg)
        table.rows = [[est.gamma, est.flip_count, est.N, est.k, est.half_gamma, est.convergence_gap]]
        text = table.render()
    return text, f"gamma={est.gamma!r}"


def _tau_values(cfg: ExperimentConfig) -> list[int]:
    if cfg.grid is not None:
        vals = parse_grid(cfg.grid)
        if any(v != int(v) for v in vals):
            raise UsageError("period grid must be integral")
        return [int(v) for v in vals]
    return list(range(2, cfg.tau_max + 1))


def cmd_sweep_tau(cfg: ExperimentConfig, threads: int | None) -> tuple[str, str | None]:
    if cfg.eps is None:
        raise UsageError("--eps is required")
    sw = sweep_tau(
        cfg.spec(), cfg.eps, _tau_values(cfg), cfg.N,
        overflow=cfg.overflow, burn_in=cfg.burn_in, threads=threads,
    )
    g, tau = sw.best
    table = Table(cfg, ["tau", "gamma"])
    table.meta = _meta_common(cfg) | {
        "baseline_gamma": sw.baseline_gamma,
        "gamma_max": g,
        "tau_argmax": tau,
        "near_max_density": sw.near_max_density(),
    }
    table.rows = [[t, x] for t, x in zip(sw.tau_values, sw.gammas)]
    return table.render(), f"gamma_max={g!r} tau={tau} baseline={sw.baseline_gamma!r}"


def cmd_sweep_param(cfg: ExperimentConfig, threads: int | None) -> tuple[str, str | None]:
    if cfg.grid is None:
        raise UsageError("--grid a:b:step is required")
    if cfg.map == "frac":
        raise UsageError("parameter sweeps are defined for tent, logistic and standard maps")
    sw = sweep_param(cfg.map, parse_grid(cfg.grid), cfg.N, init=cfg.init(), burn_in=cfg.burn_in, threads=threads)
    scale = 1.0 / math.log(2.0) if cfg.lambda_base == "2" else 1.0
    table = Table(cfg, ["param", "gamma", "lambda"])
    table.meta = _meta_common(cfg) | {
        "lambda_method": sw.lambda_method,
        "lambda_units": "log2" if cfg.lambda_base == "2" else "ln",
        "lambda_invalid_params": [p for p, ok in zip(sw.param_grid, sw.lambda_valid) if not ok],
    }
    table.rows = [[p, g, lam * scale] for p, g, lam in zip(sw.param_grid, sw.gammas, sw.lambdas)]
    return table.render(), None


def cmd_sweep_eps(cfg: ExperimentConfig, threads: int | None) -> tuple[str, str | None]:
    if (cfg.grid is None) == (cfg.loggrid is None):
        raise UsageError("give exactly one of --grid or --loggrid")
    grid = parse_grid(cfg.grid) if cfg.grid is not None else parse_loggrid(cfg.loggrid)
    sw = sweep_epsilon(
        cfg.spec(), grid, cfg.tau_max, cfg.N,
        overflow=cfg.overflow, burn_in=cfg.burn_in, threads=threads,
    )
    columns = ["epsilon", "gamma_max", "tau_argmax"]
    rows = [[e, g, t] for e, g, t in zip(sw.epsilon_grid, sw.gamma_max, sw.tau_argmax)]
    if cfg.s is not None:
        if len(grid) < 2:
            raise UsageError("--s needs an intensity grid of at least two points")
        columns.append("mu_s")
        for row, (_, mu) in zip(rows, mu_smooth(sw, cfg.s)):
            row.append(mu)
    table = Table(cfg, columns)
    table.meta = _meta_common(cfg) | {"tau_max_bound": cfg.tau_max}
    table.rows = rows
    return table.render(), None


def theorem1_report(alpha: float, n_max: int, L: int, k: int) -> dict:
    spec = FractionalParts(alpha)
    if k < n_max + L + 1:
        raise UsageError(f"k={k} too small: need k >= n_max + L + 1 = {n_max + L + 1}")
    orbit = generate_orbit(spec, k)
    conj = conjugate_orbit(orbit, n_max, L)
    inv = int(math.floor(1.0 / alpha))
    return {
        "period": detect_period(conj.terms),
        "first_all_zero_order": conj.zero_tail_start(),
        "floor_inv_alpha": inv,
        "is_2p_minus_1": (inv + 1) & inv == 0,
        "exact_arithmetic": orbit.is_exact,
    }


def cmd_theorem1(cfg: ExperimentConfig) -> tuple[str, str | None]:
    report = theorem1_report(cfg.alpha, cfg.n_max, cfg.L, cfg.k)
    text = json.dumps(report | {"config": asdict(cfg)}, indent=1) + "\n"
    return text, None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gamma-probe", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--map", choices=MAPS)
    common.add_argument("--t", type=float)
    common.add_argument("--r", type=float)
    common.add_argument("--K", type=float)
    common.add_argument("--alpha", type=float)
    common.add_argument("--x0", type=float)
    common.add_argument("--I0", type=float)
    common.add_argument("--theta0", type=float)
    common.add_argument("--N", type=int, help="difference order")
    common.add_argument("--eps", type=float, help="stimulation intensity")
    common.add_argument("--tau", type=int, help="stimulation period")
    common.add_argument("--out", help="output path (default: standard output)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--overflow", choices=("wrap", "clamp"), default="wrap")
    common.add_argument("--burn-in", type=int, default=0, dest="burn_in")
    common.add_argument("--threads", type=int, help="worker threads (env GAMMA_PROBE_THREADS)")
    common.add_argument("--config", help="replay a JSON config or an earlier output file")

    p = sub.add_parser("orbit", parents=[common], help="write an orbit as index,value CSV")
    p.add_argument("--k", type=int, help="orbit length")

    p = sub.add_parser("gamma", parents=[common], help="gamma of a map or of a CSV series")
    p.add_argument("--input", help="CSV time series (one value per line or index,value)")
    p.add_argument("--normalize", action="store_true", help="min-max scale input into [0, 1]")

    p = sub.add_parser("sweep-tau", parents=[common], help="gamma over stimulation periods")
    p.add_argument("--tau-max", type=int, dest="tau_max")
    p.add_argument("--grid", help="period grid a:b:step (default 2:tau-max:1)")

    p = sub.add_parser("sweep-param", parents=[common], help="gamma and lambda over a parameter grid")
    p.add_argument("--grid", help="parameter grid a:b:step")
    p.add_argument("--lambda-base", choices=("e", "2"), default="e", dest="lambda_base")

    p = sub.add_parser("sweep-eps", parents=[common], help="max gamma over periods per intensity")
    p.add_argument("--tau-max", type=int, dest="tau_max")
    p.add_argument("--grid", help="intensity grid a:b:step")
    p.add_argument("--loggrid", help="log-spaced intensity grid a:b:n")
    p.add_argument("--s", type=float, help="smoothing window width (adds mu_s)")

    p = sub.add_parser("theorem1", parents=[common], help="conjugate-orbit checks for {alpha n}")
    p.add_argument("--n-max", type=int, dest="n_max")
    p.add_argument("--L", type=int)
    p.add_argument("--k", type=int)
    return parser


def _config_from_file(path: str) -> ExperimentConfig:
    text = Path(path).read_text()
    for line in text.splitlines():
        if line.startswith("# config: "):
            return ExperimentConfig.from_json(line[len("# config: "):])
    doc = json.loads(text)
    if "config" in doc:
        doc = doc["config"]
    return ExperimentConfig.from_dict(doc)


def _config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    if ns.config:
        cfg = _config_from_file(ns.config)
        if cfg.command != ns.command:
            raise UsageError(f"config is for {cfg.command!r}, not {ns.command!r}")
        return cfg
    names = {f.name for f in fields(ExperimentConfig)}
    return ExperimentConfig(**{k: v for k, v in vars(ns).items() if k in names})


def execute(cfg: ExperimentConfig, threads: int | None = None) -> tuple[str, str | None]:
    cfg = cfg.resolved()
    if cfg.command == "orbit":
        return cmd_orbit(cfg)
    if cfg.command == "gamma":
        return cmd_gamma(cfg)
    if cfg.command == "sweep-tau":
        return cmd_sweep_tau(cfg, threads)
    if cfg.command == "sweep-param":
        return cmd_sweep_param(cfg, threads)
    if cfg.command == "sweep-eps":
        return cmd_sweep_eps(cfg, threads)
    return cmd_theorem1(cfg)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = _config_from_args(ns)
        text, summary = execute(cfg, ns.threads)
    except (ValueError, TypeError, KeyError) as exc:
        print(f"gamma-probe: error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, OSError, RuntimeError) as exc:
        print(f"gamma-probe: runtime error: {exc}", file=sys.stderr)
        return 3
    try:
        if ns.out:
            with open(ns.out, "w", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"gamma-probe: runtime error: {exc}", file=sys.stderr)
        return 3
    if summary:
        print(summary, file=sys.stderr)
    return 0


def run() -> None:
    sys.exit(main())
