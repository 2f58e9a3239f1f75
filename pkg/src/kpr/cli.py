"""Command line interface: ``kpr simulate | sweep | analytic | census``.

Settings come from built-in defaults, then an optional JSON config file
(``--config``, flat object with the same keys as the flags, dashes or
underscores), then command-line flags.  Every report echoes the effective
configuration.

Exit status: 0 on success, 1 on a runtime failure, 2 on a usage or
configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

from . import analytics, stats
from .engine import DEFAULT_BURN_IN, SimulationConfig, occupancy_census, run
from .sampler import derive_seed
from .strategy import Mode, StrategyParams, Temperature, TemperatureKind

DEFAULTS = {
    "n": 1000,
    "agents": None,
    "alpha": 0.0,
    "temperature": "inf",
    "evenings": 101_000,
    "burn_in": None,
    "seed": 0,
    "mode": "probabilistic",
    "out": "kpr-output",
    "alphas": None,
    "temperatures": None,
    "workers": 1,
}


class ConfigError(ValueError):
    """Invalid flags or config file; maps to exit status 2."""


def fmt(x: float) -> str:
    return f"{x:.6g}"


def write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    text = ",".join(header) + "\n" + "".join(",".join(r) + "\n" for r in rows)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    return text


# -- configuration -----------------------------------------------------------

def _load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a flat JSON object")
    out = {}
    for key, value in data.items():
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise ConfigError(f"unknown config key {key!r}")
        out[key] = value
    return out


def effective_settings(args: argparse.Namespace) -> dict:
    settings = dict(DEFAULTS)
    if getattr(args, "config", None):
        settings.update(_load_config_file(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def _as_list(value) -> list:
    if value is None:
        return []
    if isinstance(value, str):
        return [v for v in (p.strip() for p in value.split(",")) if v]
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


def _as_int(name: str, value) -> int:
    if isinstance(value, bool):
        raise ConfigError(f"{name} must be an integer")
    try:
        as_float = float(value)
        as_int = int(as_float)
    except (TypeError, ValueError, OverflowError):
        raise ConfigError(f"{name} must be an integer, got {value!r}") from None
    if as_int != as_float:
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    return as_int


def default_burn_in(evenings: int) -> int:
    """1000 evenings, or a tenth of the run when that is shorter."""
    return min(DEFAULT_BURN_IN, evenings // 10)


def build_config(settings: dict) -> SimulationConfig:
    try:
        n = _as_int("n", settings["n"])
        agents = None if settings["agents"] is None else _as_int("agents", settings["agents"])
        evenings = _as_int("evenings", settings["evenings"])
        burn_in = default_burn_in(evenings) if settings["burn_in"] is None else _as_int("burn_in", settings["burn_in"])
        seed = _as_int("seed", settings["seed"])
        try:
            mode = Mode(str(settings["mode"]).lower())
        except ValueError:
            raise ConfigError(f"mode must be 'probabilistic' or 'dictated', got {settings['mode']!r}") from None
        params = StrategyParams(float(settings["alpha"]), Temperature.parse(settings["temperature"]), mode)
        return SimulationConfig(n, agents, params, evenings, burn_in, seed)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


# -- reports -----------------------------------------------------------------

@dataclass(frozen=True)
class RunReport:
    config: SimulationConfig
    summary: stats.SummaryStats
    histogram: stats.Histogram
    prediction: Optional[analytics.AnalyticPrediction] = None

    @property
    def deviation(self) -> Optional[float]:
        if self.prediction is None:
            return None
        return abs(self.summary.mean - self.prediction.value)

    def as_dict(self) -> dict:
        s = self.summary
        out = {
            "config": self.config.as_dict(),
            "config_digest": self.config.digest(),
            "summary": {
                "mean": s.mean,
                "std": s.std,
                "mode": s.mode,
                "skewness": s.skewness,
                "excess_kurtosis": s.excess_kurtosis,
                "n_evenings": s.n,
            },
            "analytic": None,
        }
        if self.prediction is not None:
            out["analytic"] = {**self.prediction.as_dict(), "deviation": self.deviation}
        return out


def matching_prediction(cfg: SimulationConfig) -> Optional[analytics.AnalyticPrediction]:
    """The closed-form estimate for cfg's limit, if it has one."""
    p = cfg.params
    if p.mode is not Mode.PROBABILISTIC:
        return None
    kind = p.temperature.kind
    if p.alpha == 0 and kind is TemperatureKind.INFINITE:
        return analytics.predict_poisson_utilization(cfg.density)
    if cfg.agents != cfg.restaurants:
        return None
    if p.alpha == 1 and kind is TemperatureKind.INFINITE and cfg.restaurants % 2 == 0:
        return analytics.predict_rank(cfg.restaurants)
    if p.alpha == 0 and kind is TemperatureKind.ZERO:
        return analytics.predict_avoid_crowd(1e-12)
    return None


def simulate(cfg: SimulationConfig) -> RunReport:
    series = run(cfg)
    return RunReport(cfg, stats.summary(series), stats.histogram(series), matching_prediction(cfg))


def write_report(report: RunReport, out: Path) -> tuple[Path, Path]:
    digest = report.config.digest()
    out.mkdir(parents=True, exist_ok=True)
    hist_path = out / f"histogram-{digest}.csv"
    h = report.histogram
    write_csv(hist_path, ["bin_center", "density"], [[fmt(c), fmt(d)] for c, d in zip(h.centers, h.densities)])
    report_path = out / f"report-{digest}.json"
    body = report.as_dict()
    body["histogram_file"] = hist_path.name
    with open(report_path, "w", newline="\n") as fh:
        json.dump(body, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report_path, hist_path


# -- sweep -------------------------------------------------------------------

@dataclass(frozen=True)
class SweepGrid:
    alphas: tuple
    temperatures: tuple
    per_cell: SimulationConfig

    def __post_init__(self):
        if not self.alphas:
            raise ConfigError("sweep needs at least one alpha")
        if not self.temperatures:
            raise ConfigError("sweep needs at least one temperature")

    def cells(self) -> list[SimulationConfig]:
        """One config per (alpha, T), ordered by alpha then T, seeded by cell index."""
        pairs = sorted(
            ((a, t) for a in self.alphas for t in self.temperatures),
            key=lambda p: (p[0], p[1].sort_key()),
        )
        base = self.per_cell
        return [
            replace(
                base,
                params=StrategyParams(a, t, Mode.PROBABILISTIC),
                seed=derive_seed(base.seed, i),
            )
            for i, (a, t) in enumerate(pairs)
        ]


def build_grid(settings: dict) -> SweepGrid:
    base = build_config(settings)
    try:
        alphas = tuple(float(a) for a in _as_list(settings["alphas"] if settings["alphas"] is not None else settings["alpha"]))
        temps = tuple(Temperature.parse(t) for t in _as_list(settings["temperatures"]))
        for a in alphas:
            StrategyParams(a, temps[0] if temps else Temperature.parse("inf"))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return SweepGrid(alphas, temps, base)


def _cell_row(cfg: SimulationConfig) -> list[str]:
    series = run(cfg)
    s = stats.summary(series)
    return [fmt(cfg.params.alpha), str(cfg.params.temperature), fmt(s.mean), fmt(s.std), str(len(series))]


SWEEP_HEADER = ["alpha", "temperature", "mean_f", "std_f", "n_evenings"]


def sweep(grid: SweepGrid, workers: int = 1) -> list[list[str]]:
    cells = grid.cells()
    if workers <= 1:
        return [_cell_row(c) for c in cells]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_cell_row, cells))


# -- census ------------------------------------------------------------------

CENSUS_HEADER = ["m", "empirical_fraction", "poisson_pmf", "deviation"]


def census_rows(cfg: SimulationConfig) -> list[list[str]]:
    p = cfg.params
    if p.mode is not Mode.PROBABILISTIC or p.alpha != 0 or p.temperature.kind is not TemperatureKind.INFINITE:
        raise ConfigError("census needs the random-choice regime: --alpha 0 --temperature inf")
    hist = occupancy_census(cfg)
    rows = []
    for m, frac in zip(range(hist.densities.size), hist.masses):
        pmf = analytics.poisson_pmf(cfg.density, m)
        rows.append([str(m), fmt(frac), fmt(pmf), fmt(abs(frac - pmf))])
    return rows


# -- analytic ----------------------------------------------------------------

def analytic_query(args: argparse.Namespace) -> analytics.AnalyticPrediction:
    try:
        if args.poisson_utilization:
            return analytics.predict_poisson_utilization(_required(args.lam, "--lambda"))
        if args.poisson_pmf:
            return analytics.predict_poisson_pmf(_required(args.lam, "--lambda"), _as_int("m", _required(args.m, "--m")))
        if args.rank:
            return analytics.predict_rank(_as_int("n", _required(args.n, "--n")))
        return analytics.predict_avoid_crowd(args.tol)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _required(value, flag: str):
    if value is None:
        raise ConfigError(f"{flag} is required for this query")
    return value


# -- argument parsing --------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, help="number of restaurants (default 1000)")
    p.add_argument("--agents", type=int, help="number of agents (default: same as --n)")
    p.add_argument("--alpha", type=float, help="rank exponent (default 0)")
    p.add_argument("--temperature", help="noise scale: 'inf', '0' or a positive number (default inf)")
    p.add_argument("--evenings", type=int, help="evenings to simulate, burn-in included (default 101000)")
    p.add_argument("--burn-in", dest="burn_in", type=int, help="evenings discarded first (default min(1000, evenings/10))")
    p.add_argument("--seed", type=int, help="base seed, unsigned 64-bit (default 0)")
    p.add_argument("--mode", choices=["probabilistic", "dictated"], help="choice mode (default probabilistic)")
    p.add_argument("--out", help="output directory (default ./kpr-output)")
    p.add_argument("--config", help="JSON config file; flags override its values")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kpr", description="Kolkata Paise Restaurant game simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one simulation and report D(f)")
    _add_common(p)

    p = sub.add_parser("sweep", help="mean utilization over an (alpha, T) grid, as CSV")
    _add_common(p)
    p.add_argument("--alphas", help="comma-separated alpha values (default: --alpha)")
    p.add_argument("--temperatures", help="comma-separated temperatures, e.g. 0,0.5,10,inf")
    p.add_argument("--workers", type=int, help="worker processes (default 1)")

    p = sub.add_parser("census", help="crowd-size distribution vs Poisson, as CSV")
    _add_common(p)

    p = sub.add_parser("analytic", help="closed-form predictions, as JSON")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--poisson-utilization", action="store_true", help="1 - exp(-lambda)")
    which.add_argument("--poisson-pmf", action="store_true", help="P(m arrivals) for Poisson(lambda)")
    which.add_argument("--rank", action="store_true", help="strict-rank pairing estimate for even N")
    which.add_argument("--fixed-point", action="store_true", help="avoid-crowd self-consistent utilization")
    p.add_argument("--lambda", dest="lam", type=float, help="agents per restaurant")
    p.add_argument("--m", type=int, help="crowd size for --poisson-pmf")
    p.add_argument("--n", type=int, help="number of restaurants for --rank")
    p.add_argument("--tol", type=float, default=1e-12, help="residual tolerance for --fixed-point")
    return parser


def _cmd_simulate(args) -> int:
    settings = effective_settings(args)
    cfg = build_config(settings)
    report = simulate(cfg)
    report_path, _ = write_report(report, Path(settings["out"]))
    s = report.summary
    print(f"config {json.dumps(cfg.as_dict(), sort_keys=True)}")
    print(f"mean {fmt(s.mean)} std {fmt(s.std)} mode {fmt(s.mode)} "
          f"skewness {fmt(s.skewness)} excess_kurtosis {fmt(s.excess_kurtosis)} evenings {s.n}")
    if report.prediction is not None:
        print(f"analytic {report.prediction.source.value} {fmt(report.prediction.value)} "
              f"deviation {fmt(report.deviation)}")
    print(f"report {report_path}")
    return 0


def _cmd_sweep(args) -> int:
    settings = effective_settings(args)
    grid = build_grid(settings)
    workers = _as_int("workers", settings["workers"])
    if workers < 1:
        raise ConfigError("workers must be at least 1")
    rows = sweep(grid, workers)
    text = write_csv(Path(settings["out"]) / "sweep.csv", SWEEP_HEADER, rows)
    sys.stdout.write(text)
    return 0


def _cmd_census(args) -> int:
    settings = effective_settings(args)
    cfg = build_config(settings)
    rows = census_rows(cfg)
    text = write_csv(Path(settings["out"]) / f"census-{cfg.digest()}.csv", CENSUS_HEADER, rows)
    sys.stdout.write(text)
    return 0


def _cmd_analytic(args) -> int:
    print(json.dumps(analytic_query(args).as_dict(), sort_keys=True))
    return 0


COMMANDS = {
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "census": _cmd_census,
    "analytic": _cmd_analytic,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"kpr {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"kpr {args.command}: failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
