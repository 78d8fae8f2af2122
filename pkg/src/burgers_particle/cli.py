"""Command-line entry point: ``burgers-particle {run,converge,bounds,verify}``.

Exit codes: 0 success, 1 configuration or usage error, 2 solver failure,
3 I/O error, 4 ``verify`` finished but at least one check failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from . import diagnostics as dg
from .core import SimConfig, validate_config
from .discretization import run_simulation
from .errors import (DegenerateFit, DegenerateStudy, DomainError, EvaluationError, InvalidConfig,
                     SolverError)
from .verification import MODES, refinement_study

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO, EXIT_CHECK = 0, 1, 2, 3, 4

TRAJECTORY_COLUMNS = ("t", "h", "g", "E", "diss_cum", "u", "P", "A1", "A2", "V_eps", "jump",
                      "kappa1", "kappa2", "residual")
BOUNDS_COLUMNS = ("t", "Q", "C", "alpha", "kappa1", "kappa2", "eps", "eta")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which is reserved for solver failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


@dataclass
class RunArtifacts:
    trajectory_csv: str
    diagnostics_csv: str
    summary_json: str
    plots: list = field(default_factory=list)


class OutputWriter:
    """Stage files in a scratch directory and move them into place only if all succeed."""

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        self._staged: Dict[str, str] = {}
        self._tmp: Optional[tempfile.TemporaryDirectory] = None

    def __enter__(self):
        os.makedirs(self.out_dir, exist_ok=True)
        self._tmp = tempfile.TemporaryDirectory(dir=self.out_dir, prefix=".staging-")
        return self

    def path(self, name: str) -> str:
        p = os.path.join(self._tmp.name, name)
        self._staged[name] = p
        return p

    def final(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def __exit__(self, exc_type, exc, tb):
        try:
            if exc_type is None:
                for name, p in self._staged.items():
                    if os.path.exists(p):
                        os.replace(p, self.final(name))
        finally:
            self._tmp.cleanup()
        return False


def _load_config(path: str) -> SimConfig:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return validate_config(SimConfig.from_json(text))


def _write_csv(path: str, columns, data) -> None:
    arr = np.column_stack([np.asarray(c, dtype=float) for c in data]) + 0.0  # no "-0" cells
    if not np.all(np.isfinite(arr)):
        bad = [name for name, c in zip(columns, data) if not np.all(np.isfinite(c))]
        raise ValueError(f"non-finite values in columns {bad}")
    np.savetxt(path, arr, delimiter=",", fmt="%.17g", header=",".join(columns), comments="")


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def _finite_or_none(x):
    return float(x) if x is not None and math.isfinite(x) else None


def build_summary(cfg: SimConfig, traj, table, constants, residual, weak, seed) -> dict:
    """Everything ``run`` reports besides the per-sample tables."""
    envelope = "exp(-t/4)" if cfg.K == 0 else "16 exp(-eta t)"
    try:
        fit = dg.decay_fit(traj.t, table.E, bound=lambda t: constants.energy_envelope(t, table.E[0]))
        decay = fit.to_dict()
    except DegenerateFit as exc:
        violations, _ = dg.envelope_violations(
            traj.t, table.E, lambda t: constants.energy_envelope(t, table.E[0]))
        decay = {"rate": None, "violations": violations, "note": str(exc)}
    decay["envelope"] = envelope
    decay["worst_ratio"] = _finite_or_none(decay.get("worst_ratio"))
    decay["verdict"] = "PASS" if decay["violations"] == 0 else "FAIL"
    if decay.get("rate") is not None:
        decay["rate_verdict"] = "PASS" if cfg.K > 0 or decay["rate"] >= 0.25 else "FAIL"
    corridor = dg.corridor_violations(traj, constants)
    summary = {
        "config": cfg.to_dict(),
        "config_digest": cfg.digest(),
        "seed": seed,
        "n_samples": len(traj),
        "constants": constants.to_dict(),
        "decay": decay,
        "energy_identity": {"max_abs": residual.max_abs, "relative": residual.relative},
        "corridor": {"violations": corridor, "verdict": "PASS" if corridor == 0 else "FAIL"},
        "weak_residual": {"max_abs": weak.max_abs, "tests": list(weak.names)},
        "final_state": {"t": float(traj.t[-1]), "h": float(traj.h[-1]), "g": float(traj.g[-1])},
        "picard_iterations_max": int(np.max(traj.picard_iterations)),
    }
    if cfg.K == 0:
        summary["h_star"] = dg.h_star_estimate(traj).to_dict()
        summary["h_star"]["verdict"] = "PASS" if summary["h_star"]["theorem_violations"] == 0 else "FAIL"
    return summary


def cmd_run(config_path: str, out_dir: str, plots: bool = False, seed: Optional[int] = None,
            sample_every: int = 1) -> RunArtifacts:
    cfg = _load_config(config_path)
    traj = run_simulation(cfg, sample_every=sample_every)
    constants = dg.trajectory_constants(traj)
    table = dg.diagnostics_table(traj, constants=constants)
    residual = dg.energy_identity_residual(traj)
    weak = dg.weak_residual(traj)
    summary = build_summary(cfg, traj, table, constants, residual, weak, seed)

    with OutputWriter(out_dir) as out:
        _write_csv(out.path("trajectory.csv"), TRAJECTORY_COLUMNS,
                   [traj.t, traj.h, traj.g, table.E, traj.dissipation_cum, table.u, table.P,
                    table.A1, table.A2, table.V_eps, table.jump, table.kappa1, table.kappa2,
                    residual.series])
        diag_cols = list(dg.RECORD_FIELDS) + [f"weak_{n}" for n in weak.names]
        diag_data = [getattr(table, name) for name in dg.RECORD_FIELDS] + list(weak.residuals)
        _write_csv(out.path("diagnostics.csv"), diag_cols, diag_data)
        _write_json(out.path("summary.json"), summary)
        plot_names = []
        if plots:
            from .plots import write_run_plots

            staged = write_run_plots(out._tmp.name, table, traj, constants)
            for p in staged:
                name = os.path.basename(p)
                out._staged[name] = p
                plot_names.append(out.final(name))
    return RunArtifacts(out.final("trajectory.csv"), out.final("diagnostics.csv"),
                        out.final("summary.json"), plot_names)


def cmd_converge(config_path: str, out_dir: str, levels: int = 3, mode: str = "both",
                 jobs: int = 1) -> dict:
    if levels < 3:
        raise UsageError("--levels must be at least 3")
    cfg = _load_config(config_path)
    study = refinement_study(cfg, levels=levels, mode=mode, jobs=jobs)
    try:
        order = study.observed_order
        status = "OK"
    except DegenerateStudy:
        order, status = None, "DEGENERATE"
    report = {"config_digest": cfg.digest(), "mode": mode, "target": study.target,
              "levels": [list(lv) for lv in study.levels], "errors": list(study.errors),
              "orders": [_finite_or_none(o) for o in study.orders], "observed_order": order,
              "status": status}
    with OutputWriter(out_dir) as out:
        study.write_csv(out.path("study.csv"))
        _write_json(out.path("study.json"), report)
    return report


def cmd_bounds(config_path: str, out_dir: str, t_max: Optional[float] = None, samples: int = 101,
               alpha: float = 1.0) -> str:
    cfg = _load_config(config_path)
    if samples < 2:
        raise UsageError("--samples must be at least 2")
    t_max = cfg.t_final if t_max is None else t_max
    if not t_max > 0:
        raise UsageError("--t-max must be positive")
    c = dg.stability_constants(cfg, alpha=alpha)
    t = np.linspace(0.0, t_max, samples)
    k1, k2 = dg.kappa_bounds(cfg, t, c)
    n = t.size
    with OutputWriter(out_dir) as out:
        _write_csv(out.path("bounds.csv"), BOUNDS_COLUMNS,
                   [t, np.full(n, c.Q), np.full(n, c.C), np.full(n, c.alpha), k1, k2,
                    np.full(n, c.eps), np.full(n, c.eta)])
    return out.final("bounds.csv")


def cmd_verify(out_dir: Optional[str] = None, criteria=None) -> list:
    from .suite import ScenarioSuite

    results = []
    suite = ScenarioSuite()
    for n in criteria or sorted(suite.checks()):
        if n not in suite.checks():
            raise UsageError(f"unknown criterion {n}; choose from 1-10")
        r = suite.check(n)
        print(r.line(), flush=True)
        results.append(r)
    if out_dir is not None:
        with OutputWriter(out_dir) as out:
            _write_json(out.path("verify.json"),
                        {"passed": all(r.passed for r in results),
                         "checks": [r.to_dict() for r in results]})
    return results


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="burgers-particle",
                     description="Viscous Burgers flow with an embedded point particle under feedback")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress at INFO level")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="simulate one configuration and write diagnostics")
    p.add_argument("config", help="JSON configuration file")
    p.add_argument("--out", default="out", help="output directory (default: out)")
    p.add_argument("--plots", action="store_true", help="also write SVG figures")
    p.add_argument("--seed", type=int, default=None, help="reserved; the dynamics are deterministic")
    p.add_argument("--sample-every", type=int, default=1, help="store every k-th step (default: 1)")

    p = sub.add_parser("converge", help="refinement study of one configuration")
    p.add_argument("config")
    p.add_argument("--out", default="out")
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--mode", choices=MODES, default="both",
                   help="space: n×2, dt/4; time: dt/2; both: n×2, dt/2")
    p.add_argument("--jobs", type=int, default=1, help="parallel runs (default: 1)")
    p.add_argument("--seed", type=int, default=None, help="reserved")

    p = sub.add_parser("bounds", help="tabulate corridor and decay constants without simulating")
    p.add_argument("config")
    p.add_argument("--out", default="out")
    p.add_argument("--t-max", type=float, default=None, help="end of the table (default: t_final)")
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--alpha", type=float, default=1.0, help="distance-to-wall bound for eps, eta")
    p.add_argument("--seed", type=int, default=None, help="reserved")

    p = sub.add_parser("verify", help="run the acceptance checks")
    p.add_argument("--out", default=None, help="also write verify.json here")
    p.add_argument("--criteria", type=int, nargs="+", default=None, help="subset of checks (1-10)")
    p.add_argument("--seed", type=int, default=None, help="reserved")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            if args.sample_every < 1:
                raise UsageError("--sample-every must be ≥ 1")
            art = cmd_run(args.config, args.out, plots=args.plots, seed=args.seed,
                          sample_every=args.sample_every)
            print(f"wrote {art.trajectory_csv}, {art.diagnostics_csv}, {art.summary_json}")
        elif args.command == "converge":
            report = cmd_converge(args.config, args.out, args.levels, args.mode, args.jobs)
            order = report["observed_order"]
            print(f"status {report['status']}, observed order "
                  f"{'n/a' if order is None else f'{order:.3f}'}")
        elif args.command == "bounds":
            print(f"wrote {cmd_bounds(args.config, args.out, args.t_max, args.samples, args.alpha)}")
        elif args.command == "verify":
            results = cmd_verify(args.out, args.criteria)
            if not all(r.passed for r in results):
                return EXIT_CHECK
    except (UsageError, InvalidConfig, EvaluationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
