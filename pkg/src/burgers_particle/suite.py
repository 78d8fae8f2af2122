"""Scenario suite behind ``verify`` and the acceptance tests.

Each check runs (or reuses) the scenarios it needs and returns a
:class:`CheckResult` holding the measured quantities and a verdict. Runs are
cached per :class:`ScenarioSuite` instance, so checks that share a scenario
share one integration.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np

from . import diagnostics as dg
from .control import MovingKinkForcing
from .core import SimConfig, Trajectory, validate_config
from .discretization import run_simulation
from .errors import CollisionAbort
from .verification import convergence_order, refinement_study

logger = logging.getLogger(__name__)

SINE_DATA = dict(v0="sin(pi*y)", g0=0.5, h0=0.2, h1=0.0)
BASE_GRID = dict(n_cells=64, dt=1e-3)
LONG_HORIZON = 40.0
ENERGY_HORIZON = 2.0
WEAK_HORIZON = 2.0


@dataclass
class CheckResult:
    number: int
    title: str
    passed: bool
    measured: Dict[str, float] = field(default_factory=dict)
    detail: str = ""

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        values = ", ".join(f"{k}={_fmt(v)}" for k, v in self.measured.items())
        return f"[{verdict}] criterion {self.number}: {self.title} | {values}"

    def to_dict(self) -> dict:
        return {"number": self.number, "title": self.title, "passed": bool(self.passed),
                "measured": {k: _plain(v) for k, v in self.measured.items()},
                "detail": self.detail}


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.4g}"


def _plain(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


def sine_config(K: float, t_final: float = LONG_HORIZON, **changes) -> SimConfig:
    fields = dict(SINE_DATA, K=K, t_final=t_final, **BASE_GRID)
    fields.update(changes)
    return validate_config(SimConfig(**fields))


def equilibrium_config(h: float = 0.3, K: float = 5.0, steps: int = 10_000) -> SimConfig:
    return validate_config(SimConfig(K=K, h1=h, h0=h, g0=0.0, v0="0", t_final=steps * 1e-3,
                                     **BASE_GRID))


class ScenarioSuite:
    """Lazily runs and caches the named scenarios of the acceptance checks."""

    def __init__(self):
        self._runs: Dict[str, Trajectory] = {}
        self.collisions = 0

    def scenarios(self) -> Dict[str, Callable[[], SimConfig]]:
        return {
            "sine_K0": lambda: sine_config(0.0),
            "sine_K1": lambda: sine_config(1.0),
            "equilibrium": equilibrium_config,
        }

    def run(self, name: str) -> Trajectory:
        if name not in self._runs:
            cfg = self.scenarios()[name]()
            logger.info("running scenario %s", name)
            try:
                self._runs[name] = run_simulation(cfg)
            except CollisionAbort:
                self.collisions += 1
                raise
        return self._runs[name]

    def all_runs(self) -> Dict[str, Trajectory]:
        return {name: self.run(name) for name in self.scenarios()}

    # -- criteria ------------------------------------------------------------

    def energy_identity(self) -> CheckResult:
        measured, ok = {}, True
        for K in (0.0, 1.0):
            cfg = sine_config(K, t_final=ENERGY_HORIZON, dt=4e-4)
            study = refinement_study(cfg, levels=3, mode="time",
                                     metric=lambda tr: dg.energy_identity_residual(tr).relative)
            rel = study.errors[-1]
            order = convergence_order(study)
            measured[f"rel_residual_K{K:g}"] = rel
            measured[f"order_K{K:g}"] = order
            ok &= rel <= 1e-3 and order >= 0.9
        return CheckResult(1, "energy identity", ok, measured,
                           "n_cells=64, dt=4e-4/2e-4/1e-4, t_final=2; residual relative to E(0)")

    def decay_free(self) -> CheckResult:
        tr = self.run("sine_K0")
        E = dg.diagnostics_table(tr).E
        fit = dg.decay_fit(tr.t, E, bound=(E[0], 0.25))
        ok = fit.violations == 0 and fit.rate >= 0.25
        return CheckResult(2, "K=0 energy decay", ok,
                           {"violations": fit.violations, "fitted_rate": fit.rate,
                            "worst_ratio": fit.worst_ratio})

    def particle_limit(self) -> CheckResult:
        rep = dg.h_star_estimate(self.run("sine_K0"))
        return CheckResult(3, "K=0 particle limit", rep.theorem_violations == 0,
                           {"h_star": rep.h_star, "violations": rep.theorem_violations,
                            "tail_gap": rep.tail_gap, "tail_bound": rep.tail_bound,
                            "tail_ok": rep.tail_ok})

    def decay_controlled(self) -> CheckResult:
        tr = self.run("sine_K1")
        c = dg.trajectory_constants(tr)
        E = dg.diagnostics_table(tr, constants=c).E
        fit = dg.decay_fit(tr.t, E, bound=(16.0 * E[0], c.eta))
        gap = abs(tr.h[-1] - tr.config.h1)
        ok = fit.violations == 0 and gap <= 1e-3
        return CheckResult(4, "K>0 energy decay", ok,
                           {"eta": c.eta, "violations": fit.violations, "fitted_rate": fit.rate,
                            "h_final_gap": gap})

    def corridor(self) -> CheckResult:
        measured, total = {}, 0
        try:
            runs = self.all_runs()
        except CollisionAbort as exc:
            return CheckResult(5, "particle corridor", False, {"collisions": self.collisions},
                               str(exc))
        for name, tr in runs.items():
            v = dg.corridor_violations(tr, dg.stability_constants(tr.config))
            measured[f"violations_{name}"] = v
            total += v
        measured["collisions"] = self.collisions
        return CheckResult(5, "particle corridor", total == 0 and self.collisions == 0, measured)

    def lyapunov_sandwich(self) -> CheckResult:
        tr = self.run("sine_K1")
        c = dg.trajectory_constants(tr)
        tab = dg.diagnostics_table(tr, constants=c)
        slack = 1.0 + dg.ENVELOPE_SLACK
        lower = int(np.count_nonzero(0.25 * tab.E > tab.V_eps * slack))
        upper = int(np.count_nonzero(tab.V_eps > 2.0 * tab.E * slack))
        decay, _ = dg.envelope_violations(tab.t, tab.V_eps, (tab.V_eps[0], c.eta))
        ok = lower == 0 and upper == 0 and decay == 0
        return CheckResult(6, "Lyapunov sandwich", ok,
                           {"eps": c.eps, "alpha": c.alpha, "lower_violations": lower,
                            "upper_violations": upper, "decay_violations": decay})

    def inequality_chain(self) -> CheckResult:
        slack = 1.0 + dg.ENVELOPE_SLACK
        a2 = trace = a1 = 0
        worst_a2 = worst_trace = 0.0
        for tr in self.all_runs().values():
            tab = dg.diagnostics_table(tr)
            a2 += int(np.count_nonzero(np.abs(tab.A2) > 4.0 * tab.D * slack))
            trace += int(np.count_nonzero(tr.g ** 2 > 2.0 * tab.D * slack))
            a1 += int(np.count_nonzero(np.abs(tab.A1) > 6.0 * tab.D * slack))
            with np.errstate(divide="ignore", invalid="ignore"):
                pos = tab.D > 0
                if np.any(pos):
                    worst_a2 = max(worst_a2, float(np.max(np.abs(tab.A2[pos]) / (4 * tab.D[pos]))))
                    worst_trace = max(worst_trace, float(np.max(tr.g[pos] ** 2 / (2 * tab.D[pos]))))
        return CheckResult(7, "inequality chain", a2 == 0 and trace == 0,
                           {"A2_violations": a2, "trace_violations": trace,
                            "A2_worst_ratio": worst_a2, "trace_worst_ratio": worst_trace,
                            "A1_violations_reported": a1})

    def weak_conformance(self) -> CheckResult:
        measured, ok = {}, True
        for K in (0.0, 1.0):
            cfg = sine_config(K, t_final=WEAK_HORIZON, n_cells=32, dt=2e-3)
            E0 = {}

            def metric(tr):
                res = dg.weak_residual(tr).max_abs
                e0 = float(dg.diagnostics_table(tr).E[0])
                E0[tr.n_cells] = e0
                return res / e0

            study = refinement_study(cfg, levels=3, mode="both", metric=metric)
            base = study.errors[1]  # (64, 1e-3)
            order = convergence_order(study)
            measured[f"base_rel_residual_K{K:g}"] = base
            measured[f"order_K{K:g}"] = order
            ok &= base <= 1e-2 and order >= 0.9
        return CheckResult(8, "weak-form conformance", ok, measured,
                           "levels (32,2e-3),(64,1e-3),(128,5e-4); residual relative to E(0)")

    def mms_convergence(self) -> CheckResult:
        f = MovingKinkForcing()
        base = dict(K=1.0, h1=0.0, forcing=f, t_final=0.5, **f.initial_fields())
        space = refinement_study(SimConfig(n_cells=8, dt=1 / 64, scheme="crank_nicolson_picard",
                                           **base), levels=3, mode="space")
        time = refinement_study(SimConfig(n_cells=256, dt=0.04, scheme="semi_implicit_euler",
                                          **base), levels=3, mode="time")
        p_space, p_time = convergence_order(space), convergence_order(time)
        return CheckResult(9, "MMS convergence", p_space >= 1.8 and p_time >= 0.9,
                           {"space_order": p_space, "time_order": p_time,
                            "space_finest_error": space.errors[-1],
                            "time_finest_error": time.errors[-1]})

    def equilibrium(self) -> CheckResult:
        tr = self.run("equilibrium")
        s0 = tr.initial
        dev = max(float(np.max(np.abs(tr.V - s0.V))), float(np.max(np.abs(tr.h - s0.h))),
                  float(np.max(np.abs(tr.g - s0.g))))
        return CheckResult(10, "equilibrium fixed point", dev <= 1e-13,
                           {"steps": len(tr) - 1, "max_deviation": dev})

    def checks(self) -> Dict[int, Callable[[], CheckResult]]:
        return {1: self.energy_identity, 2: self.decay_free, 3: self.particle_limit,
                4: self.decay_controlled, 5: self.corridor, 6: self.lyapunov_sandwich,
                7: self.inequality_chain, 8: self.weak_conformance, 9: self.mms_convergence,
                10: self.equilibrium}

    def check(self, number: int) -> CheckResult:
        return self.checks()[number]()


def run_acceptance(numbers: Optional[list] = None, suite: Optional[ScenarioSuite] = None) -> list:
    suite = ScenarioSuite() if suite is None else suite
    numbers = sorted(suite.checks()) if numbers is None else numbers
    return [suite.check(n) for n in numbers]
