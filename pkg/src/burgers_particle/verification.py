"""Refinement studies, fine-grid references and manufactured-solution errors."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import SimConfig, Trajectory, validate_config
from .discretization import mass_matrix, run_simulation
from .errors import DegenerateStudy, InvalidConfig
from .geometry import ReferenceGrid

MODES = ("space", "time", "both")


@dataclass(frozen=True)
class RefinementStudy:
    """Errors of one scenario over a sequence of refined (n_cells, dt) levels.

    ``target`` says what the errors are measured against: ``analytic``
    (manufactured solution), ``reference`` (an extra finer run) or ``metric``
    (the quantity is itself an error, e.g. an identity residual).
    """

    levels: tuple
    errors: tuple
    mode: str = "both"
    target: str = "reference"
    label: str = ""
    orders: tuple = field(init=False)

    def __post_init__(self):
        if len(self.levels) < 3:
            raise InvalidConfig(["a refinement study needs at least 3 levels"])
        if len(self.errors) != len(self.levels):
            raise ValueError("one error per level required")
        e = np.asarray(self.errors, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            orders = np.log2(e[:-1] / e[1:])
        object.__setattr__(self, "orders", tuple(float(o) for o in orders))

    @property
    def degenerate(self) -> bool:
        return any(e == 0 for e in self.errors)

    @property
    def observed_order(self) -> float:
        return convergence_order(self)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["level", "n_cells", "dt", "error", "order"])
            for k, ((n, dt), err) in enumerate(zip(self.levels, self.errors)):
                order = "" if k == 0 or not math.isfinite(self.orders[k - 1]) \
                    else "%.17g" % self.orders[k - 1]
                w.writerow([k, n, "%.17g" % dt, "%.17g" % err, order])


def convergence_order(study) -> float:
    """Median of the pairwise orders log2(e_k / e_{k+1}).

    ``study`` may be a :class:`RefinementStudy` or a plain error sequence.
    """
    errors = study.errors if isinstance(study, RefinementStudy) else tuple(study)
    e = np.asarray(errors, dtype=float)
    if e.size < 2:
        raise DegenerateStudy("need at least two errors")
    if np.any(e == 0):
        raise DegenerateStudy("an error vanished; the observed order is undefined")
    return float(np.median(np.log2(e[:-1] / e[1:])))


def refine_levels(n_cells: int, dt: float, count: int, mode: str = "both") -> list:
    """Level sequence starting at (n_cells, dt).

    ``space`` doubles n and divides dt by 4 (dt ∝ Δξ²), ``time`` halves dt at
    fixed n, ``both`` doubles n and halves dt.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    n_factor, dt_factor = {"space": (2, 4), "time": (1, 2), "both": (2, 2)}[mode]
    return [(n_cells * n_factor ** k, dt / dt_factor ** k) for k in range(count)]


def reference_solve(cfg: SimConfig, refine_factor: int = 4) -> Trajectory:
    """Run ``cfg`` at (n_cells·r, dt/r²) to serve as a reference solution."""
    if refine_factor < 4 or int(refine_factor) != refine_factor:
        raise ValueError("refine_factor must be an integer ≥ 4")
    r = int(refine_factor)
    return run_simulation(validate_config(cfg.replace(n_cells=cfg.n_cells * r, dt=cfg.dt / r ** 2)))


def _final_gap(coarse: Trajectory, fine: Trajectory) -> float:
    """Distance between final states: L² over the coarse nodes plus |Δg| + |Δh|."""
    ratio = fine.n_cells // coarse.n_cells
    if ratio * coarse.n_cells != fine.n_cells:
        raise ValueError("reference grid must nest the coarse grid")
    d = coarse.V[-1] - fine.V[-1][::ratio]
    M = mass_matrix(ReferenceGrid(coarse.n_cells), coarse.h[-1], particle_mass=0.0)
    return (math.sqrt(max(M.quadratic_form(d), 0.0)) + abs(coarse.g[-1] - fine.g[-1])
            + abs(coarse.h[-1] - fine.h[-1]))


def mms_error(traj: Trajectory) -> float:
    """Final-time error against the manufactured solution of the run's forcing."""
    f = traj.config.forcing
    if f is None or not f.has_exact_solution():
        raise ValueError("trajectory has no manufactured solution")
    grid = ReferenceGrid(traj.n_cells)
    T, h = float(traj.t[-1]), float(traj.h[-1])
    side = np.where(grid.xi < 0, -1.0, 1.0)
    d = traj.V[-1] - f.v_exact(T, grid.physical_nodes(h), side)
    M = mass_matrix(grid, h, particle_mass=0.0)
    return (math.sqrt(max(M.quadratic_form(d), 0.0)) + abs(traj.g[-1] - f.g_exact(T))
            + abs(traj.h[-1] - f.h_exact(T)))


def _run_one(args):
    cfg, sample_every = args
    return run_simulation(validate_config(cfg), sample_every=sample_every)


def run_levels(configs: Sequence[SimConfig], jobs: int = 1, sample_every: int = 1) -> list:
    """Run independent configurations, in parallel when ``jobs > 1``; order is preserved."""
    work = [(c, sample_every) for c in configs]
    if jobs <= 1 or len(work) == 1:
        return [_run_one(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one, work))


def refinement_study(cfg: SimConfig, levels: int = 3, mode: str = "both",
                     metric: Optional[Callable[[Trajectory], float]] = None,
                     jobs: int = 1, label: str = "") -> RefinementStudy:
    """Refine ``cfg`` ``levels`` times and measure the error of each level.

    With ``metric`` given, each level's error is ``metric(traj)``. Otherwise
    the manufactured solution is used when the forcing has one, and an extra
    level one step finer serves as reference for the rest.
    """
    if levels < 3:
        raise InvalidConfig(["a refinement study needs at least 3 levels"])
    cfg = validate_config(cfg)
    analytic = metric is None and cfg.forcing is not None and cfg.forcing.has_exact_solution()
    extra = 0 if (metric is not None or analytic) else 1
    grid_levels = refine_levels(cfg.n_cells, cfg.dt, levels + extra, mode)
    configs = [cfg.replace(n_cells=n, dt=dt) for n, dt in grid_levels]
    trajs = run_levels(configs, jobs=jobs)
    if metric is not None:
        errors, target = [float(metric(tr)) for tr in trajs], "metric"
    elif analytic:
        errors, target = [mms_error(tr) for tr in trajs], "analytic"
    else:
        errors = [_final_gap(tr, trajs[-1]) for tr in trajs[:-1]]
        target = "reference"
    return RefinementStudy(levels=tuple(grid_levels[:levels]), errors=tuple(errors),
                           mode=mode, target=target, label=label)


def _perturbed_v0(cfg: SimConfig, delta: float):
    v0 = cfg.v0
    if isinstance(v0, str):
        return f"({v0}) + {delta!r}"
    if isinstance(v0, (int, float)):
        return float(v0) + delta
    if callable(v0):
        return lambda y: np.asarray(v0(y), dtype=float) + delta
    return tuple(float(x) + delta for x in v0)


def continuity_probe(cfg: SimConfig, delta: float) -> float:
    """sup_t of the state distance between ``cfg`` and a copy with (v0, g0, h0) shifted by ``delta``.

    The distance is max|ΔV| + |Δg| + |Δh| on the shared sample grid.
    """
    if delta < 0:
        raise ValueError("delta must be ≥ 0")
    base = run_simulation(validate_config(cfg))
    if delta == 0:
        return 0.0
    other_cfg = cfg.replace(v0=_perturbed_v0(cfg, delta), g0=cfg.g0 + delta, h0=cfg.h0 + delta)
    other = run_simulation(validate_config(other_cfg))
    dist = (np.max(np.abs(base.V - other.V), axis=1) + np.abs(base.g - other.g)
            + np.abs(base.h - other.h))
    return float(np.max(dist))
