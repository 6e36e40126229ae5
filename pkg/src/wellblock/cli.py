"""Command-line front end: config ingestion, dispatch, CSV/JSON writers.

Subcommands: ``radius``, ``simulate``, ``verify``, ``sweep``.  Runs are
described by a YAML config (see docs/ for annotated examples); unknown keys
are rejected by name.  All output is machine-first: CSV (RFC-4180-style
quoting, LF line endings, 17 significant digits) or JSON with identical
values.  Exit codes: 0 success, 2 config error, 3 solver/simulation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional

import yaml

from . import analytic, fdsim, harness, mbal, solvers
from .core import (FluidRockParams, GridSpec, MBCoefficients, RadialAnnulus,
                   Regime, Slab1D, validate_problem)
from .errors import ConfigError, DomainError, WellblockError

__all__ = ["RunConfig", "cmd_radius", "cmd_verify", "cmd_sweep",
           "cmd_simulate", "main"]

_REGIMES = {"ss": Regime.STEADY_STATE, "pss": Regime.PSEUDO_STEADY_STATE,
            "bd": Regime.BOUNDARY_DOMINATED}


def _reject_unknown(mapping, allowed, where):
    if not isinstance(mapping, dict):
        raise ConfigError(f"section '{where}' must be a mapping")
    unknown = sorted(set(mapping) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key '{unknown[0]}' in '{where}'")


@dataclass(frozen=True)
class RunConfig:
    """Deterministic description of one run; round-trips losslessly."""

    regime: str
    geometry: dict
    grid: dict
    params: dict = field(default_factory=dict)
    solver: dict = field(default_factory=dict)
    rate: float = 1.0
    boundary_pressure: float = 0.0
    verify: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    simulate: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.regime not in _REGIMES:
            raise ConfigError(f"regime must be one of {sorted(_REGIMES)}, got '{self.regime}'")
        _reject_unknown(self.geometry, {"kind", "r_e", "r_w"}, "geometry")
        if self.geometry.get("kind") not in ("slab", "radial"):
            raise ConfigError("geometry.kind must be 'slab' or 'radial'")
        _reject_unknown(self.grid, {"delta", "n", "tau"}, "grid")
        _reject_unknown(self.params, {"conductivity", "porosity",
                                      "compressibility", "thickness"}, "params")
        _reject_unknown(self.solver, {"abs_tol", "max_iter"}, "solver")
        _reject_unknown(self.verify, {"deltas", "discrepancy_tol", "mb_fd_tol",
                                      "r0_override"}, "verify")
        _reject_unknown(self.sweep, {"parameter", "values"}, "sweep")
        _reject_unknown(self.simulate, {"t_end", "tau", "scheme", "source",
                                        "sample_interval"}, "simulate")

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        _reject_unknown(data, {"regime", "geometry", "grid", "params", "solver",
                               "rate", "boundary_pressure", "verify", "sweep",
                               "simulate"}, "<root>")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = yaml.safe_load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError(f"config is not valid YAML: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config root must be a mapping")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return asdict(self)

    # -- construction of domain objects ------------------------------------
    def build_params(self) -> FluidRockParams:
        try:
            return FluidRockParams(**self.params)
        except DomainError as exc:
            raise ConfigError(f"params: {exc}") from exc

    def build_geometry(self):
        g = dict(self.geometry)
        kind = g.pop("kind")
        try:
            if kind == "slab":
                return Slab1D(r_e=float(g["r_e"]))
            return RadialAnnulus(r_w=float(g["r_w"]), r_e=float(g["r_e"]))
        except (KeyError, DomainError) as exc:
            raise ConfigError(f"geometry: {exc}") from exc

    def build_grid(self) -> GridSpec:
        try:
            return GridSpec(delta=float(self.grid["delta"]),
                            n=int(self.grid["n"]),
                            tau=float(self.grid.get("tau", 1e-6)))
        except (KeyError, DomainError, ValueError) as exc:
            raise ConfigError(f"grid: {exc}") from exc

    def build_problem(self):
        try:
            return validate_problem(self.build_params(), self.build_geometry(),
                                    self.build_grid())
        except DomainError as exc:
            raise ConfigError(f"invalid problem: {exc}") from exc


# ---------------------------------------------------------------------------
# writers
# ---------------------------------------------------------------------------

def _fmt(value):
    if isinstance(value, float):
        return format(value, ".17g")
    return value


def write_records(records, fmt: str, out_path: Optional[str], quiet: bool) -> str:
    """Emit records as CSV or JSON; returns the rendered text."""
    if fmt == "csv":
        buf = io.StringIO()
        if records:
            keys = list(records[0].keys())
            w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
            w.writeheader()
            for rec in records:
                w.writerow({k: _fmt(v) for k, v in rec.items()})
        text = buf.getvalue()
    else:
        text = json.dumps({"records": records}, indent=2) + "\n"
    if out_path:
        with open(out_path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    if not quiet and not out_path:
        sys.stdout.write(text)
    return text


def _error_record(exc: Exception) -> dict:
    rec = {"error": type(exc).__name__, "message": str(exc)}
    scan = getattr(exc, "scan", None)
    if scan:
        rec["scan"] = [[x, f] for x, f in scan]
    violations = getattr(exc, "violations", None)
    if violations:
        rec["violations"] = [list(v) for v in violations]
    return rec


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_radius(config: RunConfig, fmt: str = "json", out: Optional[str] = None,
               quiet: bool = False) -> int:
    """Solve one radius and emit a single record."""
    problem = config.build_problem()
    regime = _REGIMES[config.regime]
    sol = solvers.solve_radius(problem, regime)
    geom = problem.geometry
    rec = {
        "regime": config.regime,
        "geometry": "slab" if isinstance(geom, Slab1D) else "radial",
        "delta": problem.grid.delta,
        "r_e": geom.r_e,
        "r_w": getattr(geom, "r_w", math.nan),
        "r0": sol.r0,
        "residual": sol.residual,
        "iterations": sol.iterations,
        "method": sol.method.value,
    }
    if isinstance(geom, Slab1D) and regime is Regime.BOUNDARY_DOMINATED:
        rec["approx"] = solvers.r0_bd_1d_approx(problem.params, problem.grid, geom)
    write_records([rec], fmt, out, quiet)
    return 0


def cmd_verify(config: RunConfig, fmt: str = "json", out: Optional[str] = None,
               quiet: bool = False) -> int:
    """Run a gluing ladder and emit one report per level.

    Exit 0 only if every level meets its tolerances (config
    verify.discrepancy_tol / verify.mb_fd_tol; defaults 1e-2 / 1e-2 for the
    transient regimes, whose coarse levels carry O(delta^2) discretisation
    error, and 1e-9 / 1e-9 for the steady regime where the glue is exact).
    """
    problem = config.build_problem()
    if not isinstance(problem.geometry, Slab1D):
        raise ConfigError("verify ladders are defined on the slab geometry")
    regime = _REGIMES[config.regime]
    deltas = config.verify.get("deltas")
    if not deltas:
        raise ConfigError("verify.deltas must list >= 2 grid levels")
    defaults = (1e-9, 1e-9) if regime is Regime.STEADY_STATE else (1e-2, 1e-2)
    disc_tol = float(config.verify.get("discrepancy_tol", defaults[0]))
    mb_tol = float(config.verify.get("mb_fd_tol", defaults[1]))
    override = config.verify.get("r0_override")
    if override is not None and regime is not Regime.STEADY_STATE:
        raise ConfigError("verify.r0_override is supported for the steady regime only")
    reports = harness.run_glue_study(regime, problem.params, problem.geometry,
                                     deltas, q=config.rate,
                                     p_e=config.boundary_pressure)
    if override is not None:
        reports = [_apply_override(r, float(override), problem, config) for r in reports]
    records = []
    ok = True
    for rep in reports:
        rec = {"regime": config.regime, "delta": rep.delta, "r0": rep.r0,
               "fd_p0": rep.fd_p0, "analytic_at_r0": rep.analytic_at_r0,
               "discrepancy": rep.discrepancy, "mb_analytic": rep.mb_analytic,
               "mb_fd": rep.mb_fd, "error": rep.error or ""}
        rec.update({k: v for k, v in rep.aux.items()})
        records.append(rec)
        if rep.error or not (rep.discrepancy <= disc_tol and rep.mb_fd <= mb_tol):
            ok = False
    write_records(records, fmt, out, quiet)
    return 0 if ok else 3


def _apply_override(rep: harness.GlueReport, r0: float, problem, config):
    """Recompute the glue comparison at a forced well-block radius."""
    params, geom = problem.params, problem.geometry
    profile = analytic.ss_profile_1d(params, geom, config.rate,
                                     config.boundary_pressure)
    n = round(geom.r_e / rep.delta)
    grid = GridSpec(delta=rep.delta, n=n, tau=1e-3)
    coeffs = MBCoefficients.for_slab(params, grid)
    ana = mbal.build_ss_samples_1d(profile, r0, rep.delta, (0.0,), grid.tau)
    mb_ana = max(abs(mbal.mb_residual(s, coeffs, rep.delta)) for s in ana)
    glue = profile.pressure(r0)
    return harness.GlueReport(rep.regime, rep.delta, r0, rep.fd_p0, glue,
                              abs(rep.fd_p0 - glue), mb_ana, rep.mb_fd, rep.aux)


def cmd_sweep(config: RunConfig, fmt: str = "csv", out: Optional[str] = None,
              quiet: bool = False) -> int:
    """Sweep one parameter and emit the table."""
    sw = config.sweep
    if not sw.get("values"):
        raise ConfigError("sweep.values must be a nonempty list")
    if "parameter" not in sw:
        raise ConfigError("sweep.parameter is required")
    geom = config.build_geometry()
    spec = harness.SweepSpec(
        regime=_REGIMES[config.regime],
        geometry_kind="slab" if isinstance(geom, Slab1D) else "radial",
        parameter=sw["parameter"],
        values=tuple(float(v) for v in sw["values"]),
        delta=float(config.grid.get("delta", 1.0)),
        r_e=geom.r_e,
        r_w=getattr(geom, "r_w", 0.1),
        tau=float(config.grid.get("tau", 1e-6)),
        params=config.build_params())
    rows = harness.run_sweep(spec)
    records = [{"value": r.value, "r0": r.r0 if r.r0 is not None else math.nan,
                "residual": r.residual if r.residual is not None else math.nan,
                "iterations": r.iterations if r.iterations is not None else -1,
                "method": r.method or "", "error": r.error or ""}
               for r in rows]
    write_records(records, fmt, out, quiet)
    return 3 if any(r.error for r in rows) else 0


def cmd_simulate(config: RunConfig, fmt: str = "csv", out: Optional[str] = None,
                 quiet: bool = False) -> int:
    """Run the finite-difference simulator and dump sampled fields."""
    problem = config.build_problem()
    sim = config.simulate
    if "t_end" not in sim:
        raise ConfigError("simulate.t_end is required")
    kind = {"ss": "steady", "pss": "pseudo_steady", "bd": "boundary_dominated"}
    boundary = fdsim.BoundarySpec(kind[config.regime], config.boundary_pressure)
    series = fdsim.fd_transient(
        problem, boundary,
        q=float(sim.get("source", config.rate)),
        t_end=float(sim["t_end"]),
        scheme=sim.get("scheme", "implicit"),
        tau=float(sim["tau"]) if "tau" in sim else None,
        sample_interval=(float(sim["sample_interval"])
                         if "sample_interval" in sim else None))
    if fmt == "csv" and out:
        fdsim.series_to_csv(series, out)
        return 0
    records = []
    for fld in series.fields:
        flat = fld.pressures.ravel()
        records.append({"t": fld.t,
                        "well_value": fld.well_value(),
                        "min": float(flat.min()), "max": float(flat.max())})
    write_records(records, fmt, out, quiet)
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser():
    parser = argparse.ArgumentParser(prog="wellblock",
                                     description="Equivalent well-block radius toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("radius", "simulate", "verify", "sweep"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--format", choices=("csv", "json"),
                       default="json" if name in ("radius", "verify") else "csv")
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--quiet", action="store_true")
    return parser


_COMMANDS = {"radius": cmd_radius, "verify": cmd_verify, "sweep": cmd_sweep,
             "simulate": cmd_simulate}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = RunConfig.load(args.config)
        return _COMMANDS[args.command](config, fmt=args.format, out=args.out,
                                       quiet=args.quiet)
    except ConfigError as exc:
        write_records([_error_record(exc)], "json", args.out, args.quiet)
        return 2
    except WellblockError as exc:
        write_records([_error_record(exc)], "json", args.out, args.quiet)
        return 3


if __name__ == "__main__":
    sys.exit(main())
