"""Command-line entry point: ``ctap-yield {yield,sensitivity,evolve,triple}``.

Every subcommand also reads ``--config FILE`` (flat key=value, ``#``
comments; keys are flag names with or without dashes). Flags given on the
command line override file values.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .config import read_key_value
from .ctap import (
    PulseSchedule,
    adiabaticity_analytic,
    bright_energies,
    metrics_from_distances,
    tmax_for_adiabaticity,
)
from .errors import ConfigError, CTAPError, DomainError
from .implant import EmpiricalSource, ParametricSource, read_srim_file, resolve_strategy, sample_positions
from .physics import DonorTriple, MaterialParams, pair_distances
from .propagator import DEFAULT_STEPS, evolve
from .reporting import fmt, write_csv, write_json
from .yields import evaluate_population


@dataclass
class RunConfig:
    strategy: str = "P14keV"
    samples: int = 100_000
    seed: int = 0
    adiabaticity: float = 0.01
    threshold_ns: float = 1.0
    bohr_nm: Optional[float] = None
    hartree_mev: Optional[float] = None
    out_dir: str = "."
    srim_file: Optional[str] = None
    threads: Optional[int] = None
    # evolve
    w12: Optional[float] = None
    w23: Optional[float] = None
    omega13: float = 0.0
    steps: int = DEFAULT_STEPS
    # sensitivity
    bohr_values: str = "2.5,3.0,3.5"
    # triple
    positions: Optional[list] = field(default=None)

    def validate(self):
        if self.samples < 1:
            raise ConfigError(f"samples must be >= 1, got {self.samples}")
        if not 0 < self.adiabaticity < 1:
            raise ConfigError(f"adiabaticity must lie in (0, 1), got {self.adiabaticity}")
        if not self.threshold_ns > 0:
            raise ConfigError(f"threshold-ns must be positive, got {self.threshold_ns}")
        if self.threads is not None and self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        return self

    def material(self, bohr: Optional[float] = None) -> MaterialParams:
        base = MaterialParams()
        return MaterialParams(
            bohr_radius=bohr if bohr is not None else (self.bohr_nm or base.bohr_radius),
            hartree=self.hartree_mev or base.hartree,
        )

    def worker_count(self) -> int:
        return self.threads or os.cpu_count() or 1


_CASTS = {
    "samples": int, "seed": int, "threads": int, "steps": int,
    "adiabaticity": float, "threshold_ns": float, "bohr_nm": float,
    "hartree_mev": float, "w12": float, "w23": float, "omega13": float,
}


def _from_file(path) -> dict:
    known = {f.name for f in fields(RunConfig)} - {"positions"}
    out = {}
    for key, raw in read_key_value(path).items():
        name = key.lstrip("-").replace("-", "_")
        if name not in known:
            raise ConfigError(f"{path}: unknown config key {key!r}")
        try:
            out[name] = _CASTS.get(name, str)(raw)
        except ValueError:
            raise ConfigError(f"{path}: {key}={raw!r} has the wrong type") from None
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        values.update(_from_file(args.config))
    names = {f.name for f in fields(RunConfig)}
    values.update({k: v for k, v in vars(args).items() if k in names and v is not None})
    return RunConfig(**values).validate()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(2)


def _make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; flags override it")
    common.add_argument("--adiabaticity", type=float, help="target adiabaticity A (default 0.01)")
    common.add_argument("--bohr-nm", type=float, help="effective Bohr radius (default 3.0 nm)")
    common.add_argument("--hartree-mev", type=float, help="effective Hartree (default 40 meV)")
    common.add_argument("--out-dir", help="directory for output files (default .)")

    sampling = argparse.ArgumentParser(add_help=False)
    sampling.add_argument("--strategy", help="preset name or strategy file (default P14keV)")
    sampling.add_argument("--samples", type=int, help="number of triples (default 100000)")
    sampling.add_argument("--seed", type=int, help="64-bit master seed (default 0)")
    sampling.add_argument("--threshold-ns", type=float, help="CTAP time budget (default 1 ns)")
    sampling.add_argument("--srim-file", help="SRIM RANGE_3D file used instead of the Gaussian model")
    sampling.add_argument("--threads", type=int, help="worker processes (default: all cores)")

    p = _Parser(prog="ctap-yield", description="Yield analysis for implanted three-donor CTAP devices.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("yield", parents=[common, sampling], help="sample triples and write the yield report")

    sens = sub.add_parser("sensitivity", parents=[common, sampling], help="yield versus Bohr radius")
    sens.add_argument("--bohr-values", help="comma-separated Bohr radii in nm (default 2.5,3.0,3.5)")

    ev = sub.add_parser("evolve", parents=[common], help="integrate one CTAP run and write time series")
    ev.add_argument("--w12", type=float, help="peak 1-2 coupling, meV")
    ev.add_argument("--w23", type=float, help="peak 2-3 coupling, meV")
    ev.add_argument("--omega13", type=float, help="constant 1-3 coupling, meV (default 0)")
    ev.add_argument("--steps", type=int, help=f"RK4 steps (default {DEFAULT_STEPS})")

    tr = sub.add_parser("triple", parents=[common], help="metrics for one explicit donor triple")
    tr.add_argument("--positions", type=float, nargs=9, metavar="X",
                    help="x1 y1 z1 x2 y2 z2 x3 y3 z3 in nm")
    return p


def _source(cfg: RunConfig):
    strategy = resolve_strategy(cfg.strategy)
    if cfg.srim_file:
        return EmpiricalSource(read_srim_file(cfg.srim_file)), strategy
    return ParametricSource(strategy), strategy


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_yield(cfg: RunConfig):
    source, strategy = _source(cfg)
    pos = sample_positions(source, strategy, cfg.seed, cfg.samples, threads=cfg.worker_count())
    report = evaluate_population(pos, cfg.material(), cfg.adiabaticity, cfg.threshold_ns)
    out = _out_dir(cfg)
    report.write_json(out / "yield_report.json")
    report.write_cdf_csv(out / "tmax_cdf.csv")
    print(f"yield={fmt(report.yield_fraction)} j_ok={fmt(report.j_below_one_fraction)} n={report.n_samples}")
    return report


def cmd_sensitivity(cfg: RunConfig):
    try:
        radii = [float(v) for v in cfg.bohr_values.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"bad --bohr-values {cfg.bohr_values!r}") from None
    source, strategy = _source(cfg)
    pos = sample_positions(source, strategy, cfg.seed, cfg.samples, threads=cfg.worker_count())
    rows = []
    for a in radii:
        rep = evaluate_population(pos, cfg.material(bohr=a), cfg.adiabaticity, cfg.threshold_ns)
        rows.append((a, rep.yield_fraction, rep.j_below_one_fraction, rep.too_close_fraction))
        print(f"bohr_nm={fmt(a)} yield={fmt(rep.yield_fraction)} j_ok={fmt(rep.j_below_one_fraction)}")
    write_csv(_out_dir(cfg) / "sensitivity.csv", ("bohr_nm", "yield", "j_ok", "too_close"), rows)
    return rows


def cmd_evolve(cfg: RunConfig):
    if cfg.w12 is None or cfg.w23 is None:
        raise ConfigError("evolve needs --w12 and --w23")
    t_max = tmax_for_adiabaticity(cfg.w12, cfg.w23, cfg.adiabaticity)
    sched = PulseSchedule(cfg.w12, cfg.w23, t_max)
    result = evolve(sched, cfg.omega13, steps=cfg.steps, record=True)
    traj = result.trajectory
    ts = np.clip(traj[:, 0], 0.0, t_max)
    s2 = np.sin(np.pi * ts / (2.0 * t_max)) ** 2
    energies = [bright_energies(cfg.w12 * a, cfg.w23 * (1.0 - a)) for a in s2]
    adiab = adiabaticity_analytic(ts, sched)

    out = _out_dir(cfg)
    write_csv(out / "trajectory.csv", ("t_ns", "p1", "p2", "p3"), traj)
    write_csv(out / "eigenvalues.csv", ("t_ns", "E_minus", "E_0", "E_plus"),
              [(t, *e) for t, e in zip(ts, energies)])
    write_csv(out / "adiabaticity.csv", ("t_ns", "A"), zip(ts, adiab))
    summary = {
        "w12_meV": cfg.w12, "w23_meV": cfg.w23, "omega13_meV": cfg.omega13,
        "adiabaticity": cfg.adiabaticity, "t_max_ns": t_max, "steps": cfg.steps,
        "fidelity": result.fidelity, "max_p2": result.max_p2, "norm_drift": result.norm_drift,
    }
    write_json(out / "evolution.json", summary)
    print(f"fidelity={fmt(result.fidelity)} max_p2={fmt(result.max_p2)} t_max_ns={fmt(t_max)}")
    return result


def cmd_triple(cfg: RunConfig):
    if cfg.positions is None:
        raise ConfigError("triple needs --positions x1 y1 z1 x2 y2 z2 x3 y3 z3")
    triple = DonorTriple.from_array(cfg.positions)
    d12, d23, d13 = pair_distances(triple)
    if min(d12, d23, d13) == 0.0:
        raise DomainError("coincident donors: degenerate geometry")
    metrics = metrics_from_distances(d12, d23, d13, cfg.material(), cfg.adiabaticity)
    print(json.dumps(asdict(metrics), indent=2))
    return metrics


COMMANDS = {
    "yield": cmd_yield,
    "sensitivity": cmd_sensitivity,
    "evolve": cmd_evolve,
    "triple": cmd_triple,
}


def main(argv=None) -> int:
    args = _make_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        COMMANDS[args.command](cfg)
    except (CTAPError, OSError, ValueError) as exc:
        msg = " ".join(str(exc).split())
        sys.stderr.write(f"error: {msg}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
