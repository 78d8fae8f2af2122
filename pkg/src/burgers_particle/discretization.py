"""Monolithic P1 finite elements on the moving, interface-fitted mesh.

Fluid and particle share one unknown vector: the particle velocity is the
nodal value at the interface node, so the hydrodynamic force (the jump of
v_y) never has to be computed explicitly. Writing the weak form with
basis functions that move with the mesh gives, row by row,

    M(h) V' − W(g) V + C(V) V + A(h) V = u e_p + loads

with
    M  consistent mass, plus the unit particle mass on the interface row,
    A  stiffness (∫ v_y ψ_y),
    C  convection in the skew form (1/3)[(v²)_y + v v_y]; for P1 this is the
       skew tridiagonal matrix with off-diagonals ±(V_k + V_{k+1})/6,
    W  ALE correction ∫ w ψ_j' ψ_i, w the mesh velocity.

C is exactly skew, and the W term cancels the energy change caused by the
moving mesh, so the semi-discrete energy obeys dE/dt = −2∫v_y² exactly.
All four operators are tridiagonal.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .control import ControlLaw, _mms_load, control_force
from .core import SimConfig, State, Trajectory, ValidatedConfig, initialize_state
from .errors import CollisionAbort, GeometryError, LinearSolveFailure, NonConvergence, SolverError
from .geometry import GeometrySnapshot, ReferenceGrid
from .linalg import Tridiagonal, solve_tridiagonal

logger = logging.getLogger(__name__)


def mass_matrix(grid: ReferenceGrid, h: float, particle_mass: float = 1.0) -> Tridiagonal:
    L = grid.element_lengths(h)
    M = Tridiagonal(L / 6.0, np.zeros(grid.n_nodes), L / 6.0)
    M.diag[:-1] += L / 3.0
    M.diag[1:] += L / 3.0
    M.diag[grid.particle_index] += particle_mass
    return M


def stiffness_matrix(grid: ReferenceGrid, h: float) -> Tridiagonal:
    inv = 1.0 / grid.element_lengths(h)
    A = Tridiagonal(-inv, np.zeros(grid.n_nodes), -inv)
    A.diag[:-1] += inv
    A.diag[1:] += inv
    return A


def convection_matrix(V) -> Tridiagonal:
    V = np.asarray(V, dtype=float)
    s = (V[:-1] + V[1:]) / 6.0
    return Tridiagonal(-s, np.zeros(V.size), s)


def ale_matrix(grid: ReferenceGrid, g: float) -> Tridiagonal:
    """W_ij = ∫ w ψ_j' ψ_i dy; geometry independent because w and ψ' both scale with 1/J."""
    w = grid.mesh_velocity(g)
    a = (2.0 * w[:-1] + w[1:]) / 6.0
    b = (2.0 * w[1:] + w[:-1]) / 6.0
    W = Tridiagonal(-b, np.zeros(grid.n_nodes), a)
    W.diag[:-1] -= a
    W.diag[1:] += b
    return W


@dataclass
class AssembledOperators:
    """Operators of one geometry snapshot (see module docstring)."""

    M: Tridiagonal
    A: Tridiagonal
    C: Tridiagonal
    W: Tridiagonal
    b: np.ndarray
    geom: GeometrySnapshot

    def transport(self) -> Tridiagonal:
        """A + C − W: everything acting on V besides the mass."""
        return self.A + self.C - self.W


def assemble(grid: ReferenceGrid, geom: GeometrySnapshot, V=None, u: float = 0.0,
             loads: Optional[np.ndarray] = None) -> AssembledOperators:
    """Assemble mass, stiffness, convection (about ``V``), ALE and load for one geometry."""
    if not (geom.J_left > 0 and geom.J_right > 0):
        raise GeometryError("subdomain Jacobians must be positive")
    V = np.zeros(grid.n_nodes) if V is None else np.asarray(V, dtype=float)
    b = np.zeros(grid.n_nodes) if loads is None else np.array(loads, dtype=float)
    b[grid.particle_index] += u
    return AssembledOperators(
        M=mass_matrix(grid, geom.h),
        A=stiffness_matrix(grid, geom.h),
        C=convection_matrix(V),
        W=ale_matrix(grid, geom.g),
        b=b,
        geom=geom,
    )


def dissipation(grid: ReferenceGrid, V, h) -> np.ndarray:
    """∫ v_y² for P1 data (exact); broadcasts over leading axes."""
    V = np.asarray(V, dtype=float)
    L = grid.element_lengths(h)
    return np.sum(np.diff(V, axis=-1) ** 2 / L, axis=-1)


def _solve_interior(lhs: Tridiagonal, rhs: np.ndarray, t: float) -> np.ndarray:
    V = np.zeros(rhs.size)
    try:
        V[1:-1] = solve_tridiagonal(lhs.interior(), rhs[1:-1])
    except LinearSolveFailure as exc:
        raise LinearSolveFailure(str(exc), t=t) from None
    if not np.all(np.isfinite(V)):
        raise LinearSolveFailure("non-finite solution", t=t)
    return V


def _check_position(h: float, t: float) -> None:
    if not (-1.0 < h < 1.0) or not np.isfinite(h):
        raise CollisionAbort(f"particle left (−1,1): h={h!r}", t=t)


@dataclass
class StepResult:
    state: State
    dissipation: float  # 2 ∫_{t_n}^{t_{n+1}} ∫ v_y², scheme-consistent quadrature
    iterations: int = 1


def _step_semi_implicit(state: State, cfg: SimConfig, law: ControlLaw, grid: ReferenceGrid,
                        t_new: float, ops: Optional[AssembledOperators]) -> StepResult:
    dt = t_new - state.t
    ip = grid.particle_index
    if ops is None:
        u = control_force(law, state.t, state.h)
        loads = _mms_load(cfg.forcing, t_new, grid, state.h, law) if cfg.forcing is not None else None
        ops = assemble(grid, GeometrySnapshot(state.h, state.g), state.V, u=u, loads=loads)
    lhs = ops.M + ops.transport().scaled(dt)
    rhs = ops.M.matvec(state.V) + dt * ops.b
    V = _solve_interior(lhs, rhs, t_new)
    g = V[ip]
    h = state.h + dt * g
    _check_position(h, t_new)
    diss = 2.0 * dt * float(dissipation(grid, V, ops.geom.h))
    return StepResult(State(t=t_new, V=V, h=h, g=g), diss)


def _step_crank_nicolson(state: State, cfg: SimConfig, law: ControlLaw, grid: ReferenceGrid,
                         t_new: float) -> StepResult:
    """Midpoint rule with Picard iteration on geometry, mesh speed and convection velocity.

    The particle follows the trapezoid rule h_{n+1} = h_n + dt (g_n + g_{n+1})/2,
    so the midpoint feedback force is affine in g_{n+1} and is kept implicit.
    """
    dt = t_new - state.t
    t_mid = state.t + 0.5 * dt
    ip = grid.particle_index
    Vn = state.V
    V_iter = Vn.copy()
    h_iter = state.h + dt * state.g
    gain = law.gain
    u_explicit = control_force(law, t_mid, state.h + 0.25 * dt * state.g)
    delta = np.inf
    for k in range(1, cfg.picard_max + 1):
        g_iter = V_iter[ip]
        h_mid = 0.5 * (state.h + h_iter)
        if not -1.0 < h_mid < 1.0:
            raise CollisionAbort(f"Picard iterate left (−1,1): h={h_mid!r}", t=t_new)
        g_mid = 0.5 * (state.g + g_iter)
        loads = _mms_load(cfg.forcing, t_mid, grid, h_mid, law) if cfg.forcing is not None else None
        ops = assemble(grid, GeometrySnapshot(h_mid, g_mid), 0.5 * (Vn + V_iter),
                       u=u_explicit, loads=loads)
        T_half = ops.transport().scaled(0.5 * dt)
        lhs = ops.M + T_half
        lhs.diag[ip] += 0.25 * gain * dt * dt
        rhs = ops.M.matvec(Vn) - T_half.matvec(Vn) + dt * ops.b
        V_new = _solve_interior(lhs, rhs, t_new)
        h_new = state.h + 0.5 * dt * (state.g + V_new[ip])
        delta = max(float(np.max(np.abs(V_new - V_iter))), abs(h_new - h_iter))
        V_iter, h_iter = V_new, h_new
        if delta <= cfg.picard_tol:
            break
    else:
        raise NonConvergence(
            f"Picard iteration did not reach {cfg.picard_tol:g} in {cfg.picard_max} sweeps "
            f"(last update {delta:.3e})", t=t_new)
    _check_position(h_iter, t_new)
    h_mid = 0.5 * (state.h + h_iter)
    diss = 2.0 * dt * float(dissipation(grid, 0.5 * (Vn + V_iter), h_mid))
    return StepResult(State(t=t_new, V=V_iter, h=h_iter, g=V_iter[ip]), diss, k)


def advance(state: State, cfg: ValidatedConfig, law: Optional[ControlLaw] = None,
            t_new: Optional[float] = None, ops: Optional[AssembledOperators] = None,
            grid: Optional[ReferenceGrid] = None) -> StepResult:
    """One time step returning the new state and its dissipation increment."""
    grid = ReferenceGrid(cfg.n_cells) if grid is None else grid
    law = ControlLaw.from_config(cfg) if law is None else law
    t_new = state.t + cfg.dt if t_new is None else t_new
    if cfg.scheme == "crank_nicolson_picard":
        return _step_crank_nicolson(state, cfg, law, grid, t_new)
    return _step_semi_implicit(state, cfg, law, grid, t_new, ops)


def step(state: State, cfg: ValidatedConfig, ops: Optional[AssembledOperators] = None) -> State:
    """Advance ``state`` by ``cfg.dt``.

    For the semi-implicit scheme ``ops`` may carry operators already assembled
    at the state's geometry; the Crank–Nicolson scheme reassembles inside its
    Picard loop and ignores it.

    Raises
    ------
    NonConvergence, CollisionAbort, LinearSolveFailure
    """
    return advance(state, cfg, ops=ops).state


def run_simulation(cfg: ValidatedConfig, sample_every: int = 1) -> Trajectory:
    """Integrate from the initial data to ``t_final``.

    Every step contributes to ``dissipation_cum``; states are stored every
    ``sample_every`` steps (the last step is always stored).
    """
    if sample_every < 1:
        raise ValueError("sample_every must be ≥ 1")
    grid = ReferenceGrid(cfg.n_cells)
    law = ControlLaw.from_config(cfg)
    state = initialize_state(cfg)
    n_steps = cfg.n_steps
    n_samples = n_steps // sample_every + 1 + (1 if n_steps % sample_every else 0)

    t = np.empty(n_samples)
    V = np.empty((n_samples, grid.n_nodes))
    h = np.empty(n_samples)
    g = np.empty(n_samples)
    diss = np.empty(n_samples)
    u = np.empty(n_samples)
    iters = np.zeros(n_samples, dtype=int)

    def record(j, s, d, it):
        t[j], V[j], h[j], g[j], diss[j] = s.t, s.V, s.h, s.g, d
        u[j] = control_force(law, s.t, s.h)
        iters[j] = it

    record(0, state, 0.0, 0)
    cum = 0.0
    j = 1
    for n in range(1, n_steps + 1):
        t_new = n * cfg.dt
        try:
            result = advance(state, cfg, law, t_new, grid=grid)
        except SolverError as exc:
            logger.error("simulation aborted: %s", exc)
            raise
        state = result.state
        cum += result.dissipation
        if n % sample_every == 0 or n == n_steps:
            record(j, state, cum, result.iterations)
            j += 1
    return Trajectory(config=cfg, t=t[:j], V=V[:j], h=h[:j], g=g[:j], dissipation_cum=diss[:j],
                      controls=u[:j], picard_iterations=iters[:j])
