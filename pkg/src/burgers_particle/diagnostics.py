"""Energy-type functionals, stability constants and decay checks on discrete solutions.

All spatial integrals are exact for the P1 data (closed-form element
formulas, or 3-point Gauss where a user profile is involved). The array
helpers prefixed with ``_`` take nodal values of shape ``(..., 2N+1)`` and
positions of shape ``(...)`` so a whole trajectory is processed at once.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from . import quadrature
from .control import ControlLaw, control_force
from .core import SimConfig, State, Trajectory, initialize_state
from .errors import DegenerateFit, DomainError, NotApplicable, QuadratureError
from .geometry import ReferenceGrid, mesh_velocity

ENVELOPE_SLACK = 1e-6
_CHUNK = 2048


# -- vectorized element formulas --------------------------------------------

def _grid_of(V) -> ReferenceGrid:
    return ReferenceGrid((np.shape(V)[-1] - 1) // 2)


def _hat_nodes(grid: ReferenceGrid) -> np.ndarray:
    # the hat function φ is 1 − |ξ| in reference coordinates, whatever h is
    return 1.0 - np.abs(grid.xi)


def _l2_sq(V, h, grid=None) -> np.ndarray:
    grid = _grid_of(V) if grid is None else grid
    V = np.asarray(V, dtype=float)
    a, b = V[..., :-1], V[..., 1:]
    return np.sum(grid.element_lengths(h) * (a * a + a * b + b * b), axis=-1) / 3.0


def _grad_sq(V, h, grid=None) -> np.ndarray:
    grid = _grid_of(V) if grid is None else grid
    V = np.asarray(V, dtype=float)
    return np.sum(np.diff(V, axis=-1) ** 2 / grid.element_lengths(h), axis=-1)


def _hat_moments(V, h, grid=None):
    """Per-element ∫ v φ dy and ∫ v v_y φ dy, each of shape ``(..., 2N)``."""
    grid = _grid_of(V) if grid is None else grid
    V = np.asarray(V, dtype=float)
    p = _hat_nodes(grid)
    pa, pb = p[:-1], p[1:]
    a, b = V[..., :-1], V[..., 1:]
    core = (2.0 * a * pa + a * pb + b * pa + 2.0 * b * pb) / 6.0
    return grid.element_lengths(h) * core, (b - a) * core


def _P(V, h, g, grid=None):
    vphi, _ = _hat_moments(V, h, grid)
    return np.sum(vphi, axis=-1) + g


def _A1_A2(V, h, g, grid=None):
    grid = _grid_of(V) if grid is None else grid
    vphi, vvyphi = _hat_moments(V, h, grid)
    N = grid.n_cells
    h = np.asarray(h, dtype=float)
    # on the left ∫ v (1+y) = (1+h) ∫ v φ, on the right ∫ v (1−y) = (1−h) ∫ v φ
    left = np.sum(vphi[..., :N], axis=-1)
    right = np.sum(vphi[..., N:], axis=-1)
    A1 = -g / (1.0 + h) * left + g / (1.0 - h) * right
    A2 = np.sum(vvyphi, axis=-1)
    return A1, A2


def _jump(V, h, grid=None):
    grid = _grid_of(V) if grid is None else grid
    V = np.asarray(V, dtype=float)
    i = grid.particle_index
    h = np.asarray(h, dtype=float)
    right = (V[..., i + 1] - V[..., i]) / (grid.dxi * (1.0 - h))
    left = (V[..., i] - V[..., i - 1]) / (grid.dxi * (1.0 + h))
    return right - left


def _energy(V, h, g, K, h1, grid=None):
    return _l2_sq(V, h, grid) + np.asarray(g) ** 2 + K * (np.asarray(h) - h1) ** 2


# -- single-state operations ---------------------------------------------------

def compute_energy(state: State, K: float, h1: float) -> float:
    """E = ∫ v² + g² + K (h − h1)²."""
    return float(_energy(state.V, state.h, state.g, K, h1))


def compute_P(state: State) -> float:
    """P = ∫ φ v + g, the momentum seen by the hat test function."""
    return float(_P(state.V, state.h, state.g))


def compute_A1_A2(state: State):
    """A1 = ∫ v ∂_t φ (with ḣ = g) and A2 = ∫ v v_y φ."""
    A1, A2 = _A1_A2(state.V, state.h, state.g)
    return float(A1), float(A2)


def compute_jump(state: State) -> float:
    """Difference of the one-sided slopes at the particle, right minus left."""
    return float(_jump(state.V, state.h))


def appendix_functionals(state: State, K: float = 0.0, h1: float = 0.0):
    """(W1, W2, D) = (½(∫v² + g²), ½K(h − h1)², ∫ v_y²).

    ``D`` is computed from nodal slopes, so it is meaningful even when the end
    values are not zero.
    """
    W1 = 0.5 * (float(_l2_sq(state.V, state.h)) + state.g ** 2)
    W2 = 0.5 * K * (state.h - h1) ** 2
    D = float(_grad_sq(state.V, state.h))
    return W1, W2, D


def admissible_eps(eps: float, K: float) -> bool:
    return 0.0 <= eps <= min(0.125, K / 8.0) * (1.0 + 1e-12)


def lyapunov_V(state: State, eps: float, K: float, h1: float) -> float:
    """Perturbed Lyapunov functional E − ε (h1 − h) P."""
    if not admissible_eps(eps, K):
        raise DomainError(f"eps={eps} must satisfy 0 ≤ eps ≤ min(1/8, K/8)")
    return compute_energy(state, K, h1) - eps * (h1 - state.h) * compute_P(state)


# -- constants -------------------------------------------------------------------

@dataclass(frozen=True)
class StabilityConstants:
    """Constants of the corridor and decay estimates.

    ``Q`` is the initial energy, ``C`` the corridor constant, ``alpha`` the
    distance-to-wall bound used for ``eps`` and ``eta``.
    """

    K: float
    h0: float
    Q: float
    C: float
    alpha: float
    eps: float
    eta: float

    def energy_envelope(self, t, E0: Optional[float] = None):
        """Decay bound on E: E0 e^{−t/4} for K = 0, 16 E0 e^{−η t} otherwise."""
        E0 = self.Q if E0 is None else E0
        t = np.asarray(t, dtype=float)
        if self.K == 0:
            return E0 * np.exp(-0.25 * t)
        return 16.0 * E0 * np.exp(-self.eta * t)

    def to_dict(self) -> dict:
        return asdict(self)


def corridor_constant(Q: float) -> float:
    return 10.0 * (Q + math.sqrt(Q))


def eps_eta(K: float, alpha: float):
    """ε and η of the perturbed Lyapunov argument; K = 0 gives (0, 1/4)."""
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0,1], got {alpha}")
    if K == 0:
        return 0.0, 0.25
    denom = 34.0 + 2.0 / (K * alpha * alpha)
    eps = 1.0 / (16.0 * denom)
    eta = 0.25 * min(1.0 / denom, 0.75 * K * eps)
    return eps, eta


def stability_constants(cfg: SimConfig, alpha: float = 1.0, Q: Optional[float] = None) -> StabilityConstants:
    """Evaluate Q, C, ε and η for ``cfg``.

    ``Q`` defaults to the discrete initial energy ‖v0‖² + g0² + K(h1 − h0)².
    """
    if Q is None:
        Q = compute_energy(initialize_state(cfg), cfg.K, cfg.h1)
    eps, eta = eps_eta(cfg.K, alpha)
    return StabilityConstants(K=cfg.K, h0=cfg.h0, Q=Q, C=corridor_constant(Q), alpha=alpha,
                              eps=eps, eta=eta)


def kappa_bounds(cfg: SimConfig, t, constants: Optional[StabilityConstants] = None):
    """Distances κ1(t), κ2(t) the particle keeps from the left and right wall."""
    c = stability_constants(cfg) if constants is None else constants
    t = np.asarray(t, dtype=float)
    h0 = cfg.h0
    with np.errstate(over="ignore"):
        growth = np.exp(c.C + 2.0 * cfg.K * t)
    k1 = 2.0 / (1.0 + max(2.0, (1.0 - h0) / (1.0 + h0)) * growth)
    k2 = 2.0 / (1.0 + max(2.0, (1.0 + h0) / (1.0 - h0)) * growth)
    if k1.ndim == 0:
        return float(k1), float(k2)
    return k1, k2


def empirical_alpha(traj: Trajectory) -> float:
    """Smallest distance from the particle to a wall along the trajectory."""
    h = np.asarray(traj.h)
    if h.size == 0:
        raise ValueError("empty trajectory")
    return float(np.min(np.minimum(1.0 - h, 1.0 + h)))


def trajectory_constants(traj: Trajectory) -> StabilityConstants:
    """Stability constants with α taken from the computed orbit."""
    cfg = traj.config
    Q = float(_energy(traj.V[0], traj.h[0], traj.g[0], cfg.K, cfg.h1))
    return stability_constants(cfg, alpha=min(1.0, empirical_alpha(traj)), Q=Q)


# -- trajectory-level evaluation ------------------------------------------------

@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    E: float
    P: float
    A1: float
    A2: float
    V_eps: float
    jump: float
    kappa1: float
    kappa2: float
    u: float
    W1: float
    W2: float
    D: float


RECORD_FIELDS = tuple(DiagnosticsRecord.__dataclass_fields__)


@dataclass(frozen=True)
class DiagnosticsTable:
    """Column-wise diagnostics of a trajectory (one entry per stored sample)."""

    t: np.ndarray
    E: np.ndarray
    P: np.ndarray
    A1: np.ndarray
    A2: np.ndarray
    V_eps: np.ndarray
    jump: np.ndarray
    kappa1: np.ndarray
    kappa2: np.ndarray
    u: np.ndarray
    W1: np.ndarray
    W2: np.ndarray
    D: np.ndarray
    eps: float = 0.0

    def __len__(self):
        return self.t.size

    def record(self, k: int) -> DiagnosticsRecord:
        return DiagnosticsRecord(**{name: float(getattr(self, name)[k]) for name in RECORD_FIELDS})

    def records(self):
        return [self.record(k) for k in range(len(self))]


def diagnostics_table(traj: Trajectory, eps: Optional[float] = None,
                      constants: Optional[StabilityConstants] = None) -> DiagnosticsTable:
    """Evaluate every functional at every stored sample.

    ``eps`` defaults to the value of :func:`trajectory_constants` (0 when K = 0).
    """
    cfg = traj.config
    grid = ReferenceGrid(traj.n_cells)
    constants = trajectory_constants(traj) if constants is None else constants
    eps = constants.eps if eps is None else eps
    if not admissible_eps(eps, cfg.K):
        raise DomainError(f"eps={eps} must satisfy 0 ≤ eps ≤ min(1/8, K/8)")
    cols = {name: [] for name in ("E", "P", "A1", "A2", "jump", "L2", "D")}
    for start in range(0, len(traj), _CHUNK):
        sl = slice(start, start + _CHUNK)
        V, h, g = traj.V[sl], traj.h[sl], traj.g[sl]
        L2 = _l2_sq(V, h, grid)
        cols["L2"].append(L2)
        cols["E"].append(L2 + g * g + cfg.K * (h - cfg.h1) ** 2)
        cols["P"].append(_P(V, h, g, grid))
        A1, A2 = _A1_A2(V, h, g, grid)
        cols["A1"].append(A1)
        cols["A2"].append(A2)
        cols["jump"].append(_jump(V, h, grid))
        cols["D"].append(_grad_sq(V, h, grid))
    c = {k: np.concatenate(v) for k, v in cols.items()}
    k1, k2 = kappa_bounds(cfg, traj.t, constants)
    return DiagnosticsTable(
        t=np.array(traj.t), E=c["E"], P=c["P"], A1=c["A1"], A2=c["A2"],
        V_eps=c["E"] - eps * (cfg.h1 - traj.h) * c["P"], jump=c["jump"],
        kappa1=np.broadcast_to(k1, traj.t.shape).copy(),
        kappa2=np.broadcast_to(k2, traj.t.shape).copy(),
        u=np.array(traj.controls), W1=0.5 * (c["L2"] + traj.g ** 2),
        W2=0.5 * cfg.K * (traj.h - cfg.h1) ** 2, D=c["D"], eps=eps,
    )


@dataclass(frozen=True)
class EnergyResidual:
    series: np.ndarray
    max_abs: float
    E0: float

    @property
    def relative(self) -> float:
        return self.max_abs / self.E0 if self.E0 > 0 else self.max_abs


def energy_identity_residual(traj: Trajectory, K: Optional[float] = None,
                             h1: Optional[float] = None) -> EnergyResidual:
    """r(t) = E(t) + 2∫∫ v_y² − E(0) along the trajectory."""
    cfg = traj.config
    K = cfg.K if K is None else K
    h1 = cfg.h1 if h1 is None else h1
    E = _energy(traj.V, traj.h, traj.g, K, h1)
    r = E + traj.dissipation_cum - E[0]
    return EnergyResidual(series=r, max_abs=float(np.max(np.abs(r))), E0=float(E[0]))


def corridor_violations(traj: Trajectory, constants: Optional[StabilityConstants] = None) -> int:
    """Samples where h leaves [−1 + κ1(t), 1 − κ2(t)]."""
    k1, k2 = kappa_bounds(traj.config, traj.t, constants)
    h = traj.h
    return int(np.count_nonzero((h < -1.0 + k1) | (h > 1.0 - k2)))


# -- decay --------------------------------------------------------------------

@dataclass(frozen=True)
class DecayFit:
    rate: float
    intercept: float
    window: tuple
    n_samples: int
    violations: int = 0
    worst_ratio: float = float("nan")

    def to_dict(self) -> dict:
        return {"rate": self.rate, "intercept": self.intercept, "window": list(self.window),
                "n_samples": self.n_samples, "violations": self.violations,
                "worst_ratio": self.worst_ratio}


def envelope_violations(t, values, bound, slack: float = ENVELOPE_SLACK):
    """Count samples with ``values > bound(t) (1 + slack)``; also return max values/bound."""
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    if callable(bound):
        b = np.asarray(bound(t), dtype=float)
    else:
        scale, rate = bound
        b = scale * np.exp(-rate * t)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(b > 0, values / b, np.where(values > 0, np.inf, 0.0))
    return int(np.count_nonzero(values > b * (1.0 + slack))), float(np.max(ratio))


def decay_fit(t, E, bound=None, window: Optional[Sequence[float]] = None,
              slack: float = ENVELOPE_SLACK) -> DecayFit:
    """Least-squares slope of −log E against t on ``window`` (default second half).

    ``bound`` is either a callable of t or a pair ``(b, r)`` meaning b e^{−r t};
    the envelope is checked on every sample, not only the window.
    """
    t = np.asarray(t, dtype=float)
    E = np.asarray(E, dtype=float)
    if window is None:
        window = (0.5 * t[-1], t[-1])
    mask = (t >= window[0]) & (t <= window[1])
    if np.count_nonzero(mask) < 3:
        raise DegenerateFit("fewer than 3 samples in the fit window")
    Ew = E[mask]
    if np.any(Ew <= 0) or not np.all(np.isfinite(Ew)):
        raise DegenerateFit("energy must be positive and finite on the fit window")
    slope, intercept = np.polyfit(t[mask], -np.log(Ew), 1)
    violations, worst = (0, float("nan")) if bound is None else envelope_violations(t, E, bound, slack)
    return DecayFit(rate=float(slope), intercept=float(intercept),
                    window=(float(window[0]), float(window[1])), n_samples=int(mask.sum()),
                    violations=violations, worst_ratio=worst)


@dataclass(frozen=True)
class HStarReport:
    """Limit position of a free (K = 0) particle and the two convergence checks.

    ``theorem_violations`` counts samples with |h − h*|² > e^{−t/4} (‖v0‖² + g0²)
    on [0, window_end]; the tail check compares |h − h*| at ``tail_time`` with
    (√E0 / 8) e^{−t/8}.
    """

    h_star: float
    window_end: float
    theorem_violations: int
    theorem_worst_ratio: float
    tail_time: float
    tail_gap: float
    tail_bound: float

    @property
    def tail_ok(self) -> bool:
        return self.tail_gap <= self.tail_bound * (1.0 + ENVELOPE_SLACK)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["tail_ok"] = self.tail_ok
        return out


def h_star_estimate(traj: Trajectory) -> HStarReport:
    cfg = traj.config
    if cfg.K > 0:
        raise NotApplicable("h* is only defined for the uncontrolled case K = 0")
    t = traj.t
    h_star = float(traj.h[-1])
    t_final = float(t[-1])
    margin = min(10.0, t_final / 4.0)
    window_end = t_final - margin
    E0 = float(_l2_sq(traj.V[0], traj.h[0]) + traj.g[0] ** 2)
    mask = t <= window_end + 1e-12
    gap_sq = (traj.h[mask] - h_star) ** 2
    violations, worst = envelope_violations(t[mask], gap_sq, (E0, 0.25))
    k = int(np.searchsorted(t, window_end - 1e-12))
    k = min(k, t.size - 1)
    tail_time = float(t[k])
    return HStarReport(
        h_star=h_star, window_end=window_end, theorem_violations=violations,
        theorem_worst_ratio=worst, tail_time=tail_time,
        tail_gap=float(abs(traj.h[k] - h_star)),
        tail_bound=math.sqrt(E0) / 8.0 * math.exp(-tail_time / 8.0),
    )


# -- weak formulation ---------------------------------------------------------

@dataclass(frozen=True)
class TestPair:
    """Test function ψ(t, y) = p(ξ(y, t)) a(t) with l(t) = p(0) a(t).

    ``p`` must vanish at ξ = ±1; ``dp`` is its derivative in ξ (one-sided
    values at ξ = 0 are never requested because 0 is always an element end).
    """

    name: str
    p: Callable
    dp: Callable
    a: Callable = field(default=lambda t: np.ones_like(np.asarray(t, dtype=float)))
    da: Callable = field(default=lambda t: np.zeros_like(np.asarray(t, dtype=float)))


def _const(value):
    return lambda t: np.full(np.shape(t), value, dtype=float)


def hat_test_pair() -> TestPair:
    """(ψ, l) = (φ, 1)."""
    return TestPair("hat", p=lambda x: 1.0 - np.abs(x), dp=lambda x: -np.sign(x),
                    a=_const(1.0), da=_const(0.0))


def default_test_family() -> list:
    """Five test pairs mixing kinked/smooth profiles and constant/varying time factors."""
    pi = np.pi
    return [
        hat_test_pair(),
        TestPair("bubble", p=lambda x: 1.0 - x * x, dp=lambda x: -2.0 * x,
                 a=_const(1.0), da=_const(0.0)),
        TestPair("sine_cos_t", p=lambda x: np.sin(pi * x), dp=lambda x: pi * np.cos(pi * x),
                 a=np.cos, da=lambda t: -np.sin(t)),
        TestPair("hat_sq_decay", p=lambda x: (1.0 - np.abs(x)) ** 2,
                 dp=lambda x: -2.0 * np.sign(x) * (1.0 - np.abs(x)),
                 a=lambda t: np.exp(-t), da=lambda t: -np.exp(-t)),
        TestPair("cos_linear_t", p=lambda x: np.cos(0.5 * pi * x),
                 dp=lambda x: -0.5 * pi * np.sin(0.5 * pi * x),
                 a=lambda t: 1.0 + np.asarray(t, dtype=float), da=_const(1.0)),
    ]


@dataclass(frozen=True)
class WeakResidual:
    """Residual of the weak identity per test pair (rows) and sample time (columns)."""

    t: np.ndarray
    names: tuple
    residuals: np.ndarray

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.residuals)))

    def by_name(self, name: str) -> np.ndarray:
        return self.residuals[self.names.index(name)]


def _weak_terms(traj: Trajectory, pair: TestPair, grid: ReferenceGrid, law: ControlLaw, sl):
    """Instantaneous spatial integrals needed by the weak identity for samples ``sl``."""
    cfg = traj.config
    t = traj.t[sl]
    V, h, g = traj.V[sl], traj.h[sl], traj.g[sl]
    xi = quadrature.element_xi(grid)                      # (2N, 3)
    # Gauss points are interior, so kinks at ξ = 0 never get sampled
    p, dp = pair.p(xi), pair.dp(xi)
    a = np.asarray(pair.a(t), dtype=float)[:, None, None]
    da = np.asarray(pair.da(t), dtype=float)[:, None, None]
    J = grid.jacobians(h)[..., None]                       # (T, 2N, 1)
    w = mesh_velocity(xi, 1.0)[None] * g[:, None, None]    # (T, 2N, 3)
    v = quadrature.interpolate(V)                          # (T, 2N, 3)
    vy = quadrature.slopes(V, grid, h)[..., None]
    psi = p * a
    psi_y = dp * a / J
    psi_t = da * p - a * dp * w / J
    terms = {
        "v_psi": quadrature.integrate(v * psi, grid, h),
        "v_psi_t": quadrature.integrate(v * psi_t, grid, h),
        "vy_psiy": quadrature.integrate(vy * psi_y, grid, h),
        "v2_psiy": quadrature.integrate(v * v * psi_y, grid, h),
    }
    if cfg.forcing is not None:
        y = quadrature.element_y(grid, h)
        side = np.broadcast_to(grid.element_side[:, None], y.shape)
        f = np.stack([cfg.forcing.fluid_source(tk, y[k], side[k]) for k, tk in enumerate(t)])
        terms["f_psi"] = quadrature.integrate(f * psi, grid, h)
        terms["F"] = np.array([cfg.forcing.particle_source(tk, law) for tk in t])
    return terms


def weak_residual(traj: Trajectory, test_family: Optional[Sequence[TestPair]] = None) -> WeakResidual:
    """Evaluate the weak identity (every term, control and sources included) along ``traj``.

    Time integrals use the trapezoid rule on the stored samples, so store
    every step when the residual is meant to measure the scheme.
    """
    test_family = default_test_family() if test_family is None else list(test_family)
    if not (np.all(np.isfinite(traj.V)) and np.all(np.isfinite(traj.h))):
        raise QuadratureError("trajectory contains non-finite values")
    grid = ReferenceGrid(traj.n_cells)
    law = ControlLaw.from_config(traj.config)
    t = traj.t
    u = np.array([control_force(law, tk, hk) for tk, hk in zip(t, traj.h)])
    rows = []
    for pair in test_family:
        chunks = [_weak_terms(traj, pair, grid, law, slice(s, s + _CHUNK))
                  for s in range(0, len(traj), _CHUNK)]
        T = {k: np.concatenate([c[k] for c in chunks]) for k in chunks[0]}
        p0 = float(pair.p(np.array(0.0)))
        l = p0 * np.asarray(pair.a(t), dtype=float)
        ldot = p0 * np.asarray(pair.da(t), dtype=float)
        integral = lambda f: cumulative_trapezoid(f, t, initial=0.0)  # noqa: E731
        r = (T["v_psi"] - T["v_psi"][0] + traj.g * l - traj.g[0] * l[0]
             - integral(traj.g * ldot) - integral(T["v_psi_t"]) + integral(T["vy_psiy"])
             - 0.5 * integral(T["v2_psiy"]) - integral(u * l))
        if "f_psi" in T:
            r = r - integral(T["f_psi"]) - integral(T["F"] * l)
        if not np.all(np.isfinite(r)):
            raise QuadratureError(f"non-finite residual for test pair {pair.name!r}")
        rows.append(r)
    return WeakResidual(t=np.array(t), names=tuple(p.name for p in test_family),
                        residuals=np.vstack(rows))


def hat_balance(traj: Trajectory) -> np.ndarray:
    """Defect of the particle-position balance obtained by testing with (φ, 1).

    ln((1+h)/(1+h0)) − ln((1−h)/(1−h0)) − [∫u + P(0) − P(t) + ∫A1 − ∫A2],
    zero for exact solutions.
    """
    cfg = traj.config
    grid = ReferenceGrid(traj.n_cells)
    law = ControlLaw.from_config(cfg)
    P = _P(traj.V, traj.h, traj.g, grid)
    A1, A2 = _A1_A2(traj.V, traj.h, traj.g, grid)
    u = np.array([control_force(law, tk, hk) for tk, hk in zip(traj.t, traj.h)])
    h, h0 = traj.h, traj.h[0]
    lhs = np.log((1.0 + h) / (1.0 + h0)) - np.log((1.0 - h) / (1.0 - h0))
    integral = lambda f: cumulative_trapezoid(f, traj.t, initial=0.0)  # noqa: E731
    return lhs - (integral(u) + P[0] - P + integral(A1) - integral(A2))
