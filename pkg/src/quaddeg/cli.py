"""Command-line driver producing plot-ready data.

Commands
--------
verify    spin, channel and solver invariant suites; exit 1 if any fails
scaling   eta sweep for the MLS channel at spin --j
gpc       eta sweep for the generalized Pauli channel at dimension --d
capacity  coherent information and lower bounds for the MLS channel (both modes)
diamond   ||N_p - id||_diamond with its lower and upper bounds (MLS, or GPC if --d)

CSV columns
-----------
scaling/gpc: family,p,a,eta,eta_lower,eta_upper,floor,error
    followed by one line "#summary,slope,<v>,intercept,<v>,residual,<v>,points,<n>"
capacity:    mode,p,ic,eta,delta,lower_bound
diamond:     family,p,diamond,lower_singlet,upper_maxnorm

Floats are written with 17 significant digits.

Exit codes: 0 success, 1 verification failure, 2 invalid configuration,
3 every sweep point failed.
"""
from __future__ import annotations

import argparse
import io
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import checks
from .capacity import A_MODES, capacity_curve, optimal_etas
from .channels import GpcParams, MlsParams, choi, gpc_channel, identity_channel, mls_channel
from .degrade import GPC, MLS, ScalingRecord, fit_slope, scaling_sweep
from .diamond import diamond_lower_entangled, diamond_norm, diamond_upper_maxnorm, maximally_entangled
from .spin import SpinSystem, make_spin, singlet_state

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_ALL_FAILED = 0, 1, 2, 3
COMMANDS = ("verify", "scaling", "capacity", "diamond", "gpc")
FAULTS = ("spin", "channels", "sdp")

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    j: str = "1"
    d: int | None = None
    p_min: float = 1e-3
    p_max: float = 1e-1
    points: int = 9
    log_grid: bool = True
    a: str = "optimal"
    format: str = "csv"
    out: str = "-"
    seed: int = 0
    inject_fault: str | None = None

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        try:
            make_spin(self.j)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.d is not None and not 2 <= self.d <= 8:
            raise ConfigError(f"--d must lie in [2, 8], got {self.d}")
        if self.points < 1:
            raise ConfigError("--points must be at least 1")
        # diamond also accepts the endpoints: p = 1 is the Landau-Streater channel
        closed = self.command == "diamond"
        for name, v in (("p-min", self.p_min), ("p-max", self.p_max)):
            ok = 0.0 <= v <= 1.0 if closed else 0.0 < v < 1.0
            if not ok or not math.isfinite(v):
                raise ConfigError(f"--{name} must lie in {'[0, 1]' if closed else '(0, 1)'}, got {v}")
        if self.p_min > self.p_max or (self.points > 1 and self.p_min == self.p_max):
            raise ConfigError("--p-min must be below --p-max")
        if self.log_grid and self.p_min <= 0:
            raise ConfigError("a log grid needs --p-min > 0")
        if self.command == "capacity" and self.p_max > 0.2:
            raise ConfigError("capacity grids must stay within (0, 0.2]")
        if self.a not in ("optimal", "zero"):
            try:
                a = float(self.a)
            except ValueError as exc:
                raise ConfigError(f"--a must be 'optimal', 'zero' or a number, got {self.a!r}") from exc
            if not a >= 0 or not math.isfinite(a):
                raise ConfigError(f"--a must be nonnegative, got {self.a}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"--format must be csv or json, got {self.format!r}")
        return self

    def grid(self) -> np.ndarray:
        if self.points == 1:
            return np.array([self.p_min])
        if self.log_grid:
            return np.logspace(np.log10(self.p_min), np.log10(self.p_max), self.points)
        return np.linspace(self.p_min, self.p_max, self.points)

    def family(self):
        if self.command == "gpc" or (self.command == "diamond" and self.d is not None):
            return GPC(self.d if self.d is not None else 2)
        return MLS(Fraction(self.j))

    def a_value(self, family) -> float:
        if self.a == "optimal":
            return family.optimal_a()
        if self.a == "zero":
            return 0.0
        return float(self.a)


def _g(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % x
    return str(x).replace(",", ";").replace("\n", " ")


def _csv(header: Sequence[str], rows: Sequence[Sequence], trailer: Sequence[str] = ()) -> str:
    lines = [",".join(header)] + [",".join(_g(v) for v in r) for r in rows] + list(trailer)
    return "\n".join(lines) + "\n"


def _json_num(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


def _json(cfg: RunConfig, header: Sequence[str], rows: Sequence[Sequence], summary: dict) -> str:
    records = [{k: _json_num(v) for k, v in zip(header, r)} for r in rows]
    doc = {
        "config": asdict(cfg),
        "records": records,
        "summary": {k: _json_num(v) for k, v in summary.items()},
    }
    return json.dumps(doc, indent=2, sort_keys=False, allow_nan=False) + "\n"


def _emit(cfg: RunConfig, text: str, stdout) -> None:
    if cfg.out == "-":
        (stdout or sys.stdout).write(text)
        return
    with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


SCALING_COLUMNS = ("family", "p", "a", "eta", "eta_lower", "eta_upper", "floor", "error")


def _scaling_row(r: ScalingRecord):
    return (r.family, r.p, r.a, r.eta, r.eta_lower, r.eta_upper, r.floor, r.error)


def cmd_scaling(cfg: RunConfig, stdout=None) -> int:
    fam = cfg.family()
    a = cfg.a_value(fam)
    records = scaling_sweep(fam, cfg.grid(), a)
    ok = [r for r in records if not r.failed]
    summary = {"family": fam.tag, "a": a, "slope": None, "intercept": None, "residual": None,
               "points": 0, "failed": len(records) - len(ok)}
    try:
        fit = fit_slope(records)
        summary.update(slope=fit.slope, intercept=fit.intercept, residual=fit.residual, points=fit.points)
    except ValueError as exc:
        log.warning("no slope fit: %s", exc)
        summary["fit_error"] = str(exc)
    rows = [_scaling_row(r) for r in records]
    if cfg.format == "json":
        text = _json(cfg, SCALING_COLUMNS, rows, summary)
    else:
        trailer = ["#summary," + ",".join(
            f"{k},{_g(summary[k])}" for k in ("slope", "intercept", "residual", "points"))]
        text = _csv(SCALING_COLUMNS, rows, trailer)
    _emit(cfg, text, stdout)
    return EXIT_ALL_FAILED if not ok else EXIT_OK


CAPACITY_COLUMNS = ("mode", "p", "ic", "eta", "delta", "lower_bound")


def cmd_capacity(cfg: RunConfig, stdout=None) -> int:
    grid = cfg.grid()
    etas = optimal_etas(cfg.j, grid)
    rows = []
    curves = {}
    for mode in A_MODES:
        curves[mode] = capacity_curve(cfg.j, grid, mode, etas=etas)
        rows += [(mode, c.p, c.ic, c.eta, c.delta, c.lower_bound) for c in curves[mode]]
    dominates = all(o.lower_bound >= g.lower_bound for o, g in zip(curves["optimal"], curves["generic15"]))
    summary = {"j": cfg.j, "optimal_dominates": dominates,
               "gap_at_min_p": curves["optimal"][0].ic - curves["optimal"][0].lower_bound}
    if cfg.format == "json":
        text = _json(cfg, CAPACITY_COLUMNS, rows, summary)
    else:
        text = _csv(CAPACITY_COLUMNS, rows)
    _emit(cfg, text, stdout)
    return EXIT_OK


DIAMOND_COLUMNS = ("family", "p", "diamond", "lower_singlet", "upper_maxnorm")


def cmd_diamond(cfg: RunConfig, stdout=None) -> int:
    fam = cfg.family()
    rows = []
    for p in cfg.grid():
        if isinstance(fam, GPC):
            ch = gpc_channel(GpcParams(fam.d, float(p)))
            probe = maximally_entangled(fam.d)
        else:
            s = make_spin(fam.j)
            ch = mls_channel(MlsParams(fam.j, float(p)), s)
            probe = singlet_state(s)
        phi = choi(ch) - choi(identity_channel(ch.d_in))
        rows.append((fam.tag, float(p), diamond_norm(phi), diamond_lower_entangled(phi, probe),
                     diamond_upper_maxnorm(phi)))
    if cfg.format == "json":
        text = _json(cfg, DIAMOND_COLUMNS, rows, {"family": fam.tag})
    else:
        text = _csv(DIAMOND_COLUMNS, rows)
    _emit(cfg, text, stdout)
    return EXIT_OK


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    value: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.value <= self.tol


def _faulty_spin(j) -> SpinSystem:
    s = make_spin(j)
    return SpinSystem(s.j, s.d, s.j1, s.j2, s.j3 * (1.0 + 1e-6))


def _suite_spin(cfg: RunConfig) -> list[CheckResult]:
    out = []
    for j in checks.SPINS:
        s = _faulty_spin(j) if cfg.inject_fault == "spin" else make_spin(j)
        for name, v in checks.spin_defects(s).items():
            out.append(CheckResult("spin", f"j={j} {name}", v, 1e-12))
        for name, v in checks.singlet_defects(s).items():
            out.append(CheckResult("spin", f"j={j} singlet_{name}", v, 1e-12))
    return out


def _suite_channels(cfg: RunConfig) -> list[CheckResult]:
    out = []
    for p in (0.05, 0.2):
        for j in ("1/2", "1", "3/2"):
            out.append(CheckResult("channels", f"mls j={j} p={p} eigen", checks.mls_eigen_defect(j, p), 1e-12))
        for d in (2, 3):
            out.append(CheckResult("channels", f"gpc d={d} p={p} eigen", checks.gpc_eigen_defect(d, p), 1e-12))
    for j in ("1", "3/2"):
        out.append(CheckResult("channels", f"j={j} blockform",
                               checks.blockform_defect(j, 0.1, seed=cfg.seed), 1e-12))
        out.append(CheckResult("channels", f"j={j} environment_pi", checks.environment_pi_defect(j, 0.1), 1e-12))
        s = make_spin(j)
        ch = (checks.dropped_kraus_mls(j, 0.1) if cfg.inject_fault == "channels"
              else mls_channel(MlsParams(s.j, 0.1), s))
        out.append(CheckResult("channels", f"j={j} covariance",
                               checks.covariance_max_defect(ch, j, 20, 5, seed=cfg.seed), 1e-10))
    return out


def _suite_sdp(cfg: RunConfig) -> list[CheckResult]:
    health = checks.sdp_health(seed=cfg.seed)
    out = [
        CheckResult("sdp", "random_channel_diamond", health["random_channel_diamond"], 1e-6),
        CheckResult("sdp", "lambda_max_rel", health["lambda_max_rel"], 1e-7),
    ]
    ident = choi(identity_channel(2))
    if cfg.inject_fault == "sdp":
        ident = ident * 1.01
    out.append(CheckResult("sdp", "identity_diamond", abs(diamond_norm(ident) - 1.0), 1e-6))
    s = make_spin("1/2")
    ls = choi(mls_channel(MlsParams(s.j, 1.0), s)) - choi(identity_channel(2))
    out.append(CheckResult("sdp", "ls_minus_id", abs(diamond_norm(ls) - 2.0), 1e-6))
    return out


SUITES: dict[str, Callable[[RunConfig], list[CheckResult]]] = {
    "spin": _suite_spin,
    "channels": _suite_channels,
    "sdp": _suite_sdp,
}


def cmd_verify(cfg: RunConfig, stdout=None) -> int:
    results = []
    for suite, run in SUITES.items():
        results += run(cfg)
    failed = sorted({r.suite for r in results if not r.passed})
    if cfg.format == "json":
        rows = [(r.suite, r.name, r.value, r.tol, r.passed) for r in results]
        summary = {"passed": not failed, "failed_suites": ",".join(failed)}
        text = _json(cfg, ("suite", "check", "defect", "tol", "passed"), rows, summary)
    else:
        buf = io.StringIO()
        for r in results:
            buf.write(f"{'PASS' if r.passed else 'FAIL'} {r.suite:8s} {r.name:32s} {r.value:.3e} (tol {r.tol:.0e})\n")
        for suite in SUITES:
            mine = [r for r in results if r.suite == suite]
            worst = max(mine, key=lambda r: r.value / r.tol)
            status = "PASS" if suite not in failed else "FAIL"
            buf.write(f"suite {suite}: {status} (worst {worst.name} {worst.value:.3e})\n")
        text = buf.getvalue()
    _emit(cfg, text, stdout)
    if failed:
        sys.stderr.write(f"verification failed: {', '.join(failed)}\n")
        return EXIT_VERIFY
    return EXIT_OK


HANDLERS = {
    "verify": cmd_verify,
    "scaling": cmd_scaling,
    "gpc": cmd_scaling,
    "capacity": cmd_capacity,
    "diamond": cmd_diamond,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="quaddeg",
        description="Approximate degradability of spin and qudit depolarizing channels.",
        epilog=__doc__.split("\n\n", 1)[1],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    ap.add_argument("--command", required=True, choices=COMMANDS)
    ap.add_argument("--j", default="1", help="spin label such as 1 or 3/2 (default 1)")
    ap.add_argument("--d", type=int, default=None, help="qudit dimension for gpc/diamond")
    ap.add_argument("--p-min", type=float, default=1e-3)
    ap.add_argument("--p-max", type=float, default=1e-1)
    ap.add_argument("--p", type=float, default=None, help="single noise level; overrides the grid")
    ap.add_argument("--points", type=int, default=9)
    ap.add_argument("--log-grid", action=argparse.BooleanOptionalAction, default=True,
                    help="log-spaced grid (default) or --no-log-grid for linear")
    ap.add_argument("--a", default="optimal", help="optimal, zero, or a nonnegative number")
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    ap.add_argument("--out", default="-", help="output path, '-' for stdout")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--inject-fault", choices=FAULTS, default=None, help=argparse.SUPPRESS)
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    p_min, p_max, points = ns.p_min, ns.p_max, ns.points
    if ns.p is not None:
        p_min = p_max = ns.p
        points = 1
    log_grid = ns.log_grid and p_min > 0
    return RunConfig(ns.command, str(ns.j), ns.d, p_min, p_max, points, log_grid, str(ns.a),
                     ns.format, ns.out, ns.seed, ns.inject_fault)


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns).validate()
    except ConfigError as exc:
        sys.stderr.write(f"invalid configuration: {exc}\n")
        return EXIT_CONFIG
    return HANDLERS[cfg.command](cfg)


if __name__ == "__main__":
    sys.exit(main())
