"""Control inputs acting on the particle and manufactured-solution sources.

The feedback law is the spring-like ``u = K (h1 − h)``; there is deliberately
no derivative term. Open-loop signals and the manufactured sources used for
verification live here too, all as plain closed-form callables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import quadrature
from .geometry import ReferenceGrid

# -- open-loop signals -------------------------------------------------------

OPEN_LOOP_KINDS = ("zero", "step", "sine", "samples")


@dataclass(frozen=True)
class OpenLoopSignal:
    """Prescribed control u(t).

    ``kind`` is one of ``zero``, ``step`` (``amplitude`` once ``t >= t_on``),
    ``sine`` (``amplitude * sin(omega t + phase)``) or ``samples`` (piecewise
    linear through ``times``/``values``, held constant outside).
    """

    kind: str = "zero"
    amplitude: float = 0.0
    omega: float = 1.0
    phase: float = 0.0
    t_on: float = 0.0
    times: tuple = ()
    values: tuple = ()

    def __post_init__(self):
        if self.kind not in OPEN_LOOP_KINDS:
            raise ValueError(f"open-loop kind must be one of {OPEN_LOOP_KINDS}")
        if self.kind == "samples":
            times = np.asarray(self.times, dtype=float)
            if times.size < 1 or times.size != len(self.values):
                raise ValueError("samples signal needs matching non-empty times and values")
            if np.any(np.diff(times) <= 0):
                raise ValueError("sample times must be strictly increasing")

    def __call__(self, t: float) -> float:
        if self.kind == "zero":
            return 0.0
        if self.kind == "step":
            return self.amplitude if t >= self.t_on else 0.0
        if self.kind == "sine":
            return self.amplitude * math.sin(self.omega * t + self.phase)
        return float(np.interp(t, self.times, self.values))

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "step":
            out.update(amplitude=self.amplitude, t_on=self.t_on)
        elif self.kind == "sine":
            out.update(amplitude=self.amplitude, omega=self.omega, phase=self.phase)
        elif self.kind == "samples":
            out.update(times=list(self.times), values=list(self.values))
        return out


def make_open_loop(spec) -> OpenLoopSignal:
    if isinstance(spec, OpenLoopSignal):
        return spec
    if isinstance(spec, str):
        return OpenLoopSignal(kind=spec)
    spec = dict(spec)
    for key in ("times", "values"):
        if key in spec:
            spec[key] = tuple(float(x) for x in spec[key])
    return OpenLoopSignal(**spec)


# -- manufactured solutions --------------------------------------------------

class MMSForcing:
    """Source pair (fluid f(t, y), particle F(t)) together with the exact solution it produces.

    ``side`` arguments are −1 for the fluid left of the particle and +1 for the
    right part; the exact velocity may have a kink at the particle, so each side
    has its own closed form.
    """

    name = "zero"

    def fluid_source(self, t, y, side):
        return np.zeros_like(np.asarray(y, dtype=float))

    def particle_source(self, t, law: Optional["ControlLaw"] = None) -> float:
        return 0.0

    def has_exact_solution(self) -> bool:
        return False

    def to_dict(self) -> dict:
        return {"name": self.name}

    def __eq__(self, other):
        return type(self) is type(other) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(tuple(sorted(self.to_dict().items())))

    def __repr__(self):
        params = ", ".join(f"{k}={v!r}" for k, v in self.to_dict().items() if k != "name")
        return f"{type(self).__name__}({params})"


class ZeroForcing(MMSForcing):
    name = "zero"


class MovingKinkForcing(MMSForcing):
    """Exact solution with an oscillating particle and a velocity kink at the particle.

        h*(t) = a sin(ω t)
        v*(t, y) = h*'(t) φ(y; h*(t)) + β e^{−t} (1 − y²)(y − h*(t))

    φ is the hat function (1 at the particle, 0 at the walls), so v* satisfies
    the wall conditions and v*(t, h*(t)) = h*'(t). The sources are obtained by
    substituting (v*, h*) into the Burgers equation and Newton's law.
    """

    name = "moving_kink"

    def __init__(self, amplitude: float = 0.1, omega: float = 1.0, beta: float = 0.5):
        if abs(amplitude) >= 1:
            raise ValueError("amplitude must be below 1 so the particle stays inside")
        self.amplitude = float(amplitude)
        self.omega = float(omega)
        self.beta = float(beta)

    def to_dict(self) -> dict:
        return {"name": self.name, "amplitude": self.amplitude, "omega": self.omega,
                "beta": self.beta}

    def has_exact_solution(self) -> bool:
        return True

    # particle
    def h_exact(self, t):
        return self.amplitude * np.sin(self.omega * t)

    def g_exact(self, t):
        return self.amplitude * self.omega * np.cos(self.omega * t)

    def accel_exact(self, t):
        return -self.amplitude * self.omega**2 * np.sin(self.omega * t)

    def _parts(self, t, y, side):
        y = np.asarray(y, dtype=float)
        side = np.asarray(side, dtype=float)
        h, s, sdot = self.h_exact(t), self.g_exact(t), self.accel_exact(t)
        left = side < 0
        J = np.where(left, 1.0 + h, 1.0 - h)
        phi = np.where(left, (y + 1.0) / J, (1.0 - y) / J)
        phi_t = np.where(left, -(y + 1.0) * s / J**2, (1.0 - y) * s / J**2)
        phi_y = np.where(left, 1.0 / J, -1.0 / J)
        E = self.beta * math.exp(-t)
        q = E * (1.0 - y**2) * (y - h)
        q_t = -q - E * s * (1.0 - y**2)
        q_y = E * ((1.0 - y**2) - 2.0 * y * (y - h))
        q_yy = E * (-6.0 * y + 2.0 * h)
        v = s * phi + q
        v_t = sdot * phi + s * phi_t + q_t
        v_y = s * phi_y + q_y
        return v, v_t, v_y, q_yy

    def v_exact(self, t, y, side):
        return self._parts(t, y, side)[0]

    def fluid_source(self, t, y, side):
        v, v_t, v_y, v_yy = self._parts(t, y, side)
        return v_t + v * v_y - v_yy

    def jump_exact(self, t) -> float:
        """[v*_y] at the particle: only the hat part has different one-sided slopes."""
        h = self.h_exact(t)
        return -2.0 * self.g_exact(t) / (1.0 - h * h)

    def particle_source(self, t, law: Optional["ControlLaw"] = None) -> float:
        u = 0.0 if law is None else control_force(law, t, float(self.h_exact(t)))
        return float(self.accel_exact(t) - self.jump_exact(t) - u)

    def initial_fields(self) -> dict:
        """Config fields (v0 expression, h0, g0) matching the exact solution at t = 0."""
        a, w, b = self.amplitude, self.omega, self.beta
        return {
            "v0": f"{a * w!r}*(1 - abs(y)) + {b!r}*y*(1 - y**2)",
            "h0": 0.0,
            "g0": a * w,
        }


FORCINGS = {"zero": ZeroForcing, "moving_kink": MovingKinkForcing}


def make_forcing(spec) -> MMSForcing:
    if isinstance(spec, MMSForcing):
        return spec
    if isinstance(spec, str):
        spec = {"name": spec}
    spec = dict(spec)
    name = spec.pop("name", None)
    if name not in FORCINGS:
        raise ValueError(f"unknown forcing {name!r}; available: {sorted(FORCINGS)}")
    return FORCINGS[name](**spec)


# -- control laws --------------------------------------------------------------

@dataclass(frozen=True)
class ControlLaw:
    """Which input drives the particle: ``feedback``, ``open_loop`` or ``none``."""

    variant: str = "none"
    K: float = 0.0
    h1: float = 0.0
    signal: Optional[OpenLoopSignal] = None
    mms: Optional[MMSForcing] = field(default=None, compare=False)

    def __post_init__(self):
        if self.variant not in ("feedback", "open_loop", "none"):
            raise ValueError(f"unknown control variant {self.variant!r}")
        if self.variant == "feedback":
            if self.K < 0:
                raise ValueError("feedback gain K must be ≥ 0")
            if not -1.0 < self.h1 < 1.0:
                raise ValueError("target h1 must lie in (−1,1)")
        if self.variant == "open_loop" and self.signal is None:
            raise ValueError("open_loop control needs a signal")

    @classmethod
    def feedback(cls, K: float, h1: float, mms=None) -> "ControlLaw":
        return cls("feedback", K=K, h1=h1, mms=mms)

    @classmethod
    def open_loop(cls, signal: OpenLoopSignal, mms=None) -> "ControlLaw":
        return cls("open_loop", signal=signal, mms=mms)

    @classmethod
    def from_config(cls, cfg) -> "ControlLaw":
        if cfg.open_loop is not None:
            return cls.open_loop(cfg.open_loop, mms=cfg.forcing)
        return cls.feedback(cfg.K, cfg.h1, mms=cfg.forcing)

    @property
    def gain(self) -> float:
        """Slope of −u with respect to h (K for feedback, 0 otherwise)."""
        return self.K if self.variant == "feedback" else 0.0


def control_force(law: ControlLaw, t: float, h: float) -> float:
    """Force applied to the particle at time t when it sits at h."""
    if law.variant == "feedback":
        return law.K * (law.h1 - h)
    if law.variant == "open_loop":
        return law.signal(t)
    return 0.0


def mms_forcing(sources: Optional[MMSForcing], t: float, state, law: Optional[ControlLaw] = None,
                h: Optional[float] = None) -> np.ndarray:
    """Load vector of the manufactured sources: ∫ f ψ_i on fluid rows plus F(t) on the particle row.

    The geometry is that of ``state`` unless ``h`` is given (schemes that
    freeze or average the geometry pass it explicitly).
    """
    n_cells = (np.asarray(state.V).size - 1) // 2
    grid = ReferenceGrid(n_cells)
    return _mms_load(sources, t, grid, state.h if h is None else h, law)


def _mms_load(sources, t, grid: ReferenceGrid, h, law=None) -> np.ndarray:
    if sources is None:
        return np.zeros(grid.n_nodes)
    y = quadrature.element_y(grid, h)
    side = np.broadcast_to(grid.element_side[:, None], y.shape)
    f = np.asarray(sources.fluid_source(t, y, side), dtype=float)
    load = quadrature.load_vector(np.broadcast_to(f, y.shape), grid, h)
    load[grid.particle_index] += sources.particle_source(t, law)
    load[0] = 0.0
    load[-1] = 0.0
    return load
