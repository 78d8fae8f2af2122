"""Configuration, discrete state and trajectory containers.

Everything here is an immutable value once built. The fluid velocity lives on
a fixed reference grid of ``2 * n_cells + 1`` nodes; node ``n_cells`` carries
the particle, so the particle velocity ``g`` is stored twice (as ``g`` and as
``V[n_cells]``) and the two copies are always bitwise equal.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence, Union

import numpy as np

from . import geometry
from .control import MMSForcing, OpenLoopSignal, make_forcing, make_open_loop
from .errors import EvaluationError, InvalidConfig

SCHEMES = ("semi_implicit_euler", "crank_nicolson_picard")

Profile = Union[str, float, Sequence[float], Callable[[np.ndarray], np.ndarray]]

# names available inside string profiles such as "sin(pi*y)"
_EXPR_NAMESPACE = {
    name: getattr(np, name)
    for name in (
        "sin", "cos", "tan", "exp", "log", "sqrt", "abs", "tanh", "sinh",
        "cosh", "arctan", "where", "minimum", "maximum", "sign", "pi",
    )
}
_EXPR_NAMESPACE["__builtins__"] = {}


@dataclass(frozen=True)
class SimConfig:
    """Problem and scheme description.

    ``v0`` may be a callable of the physical coordinate, a string expression in
    ``y`` (e.g. ``"sin(pi*y)"``), a constant, or nodal samples on the mapped
    reference grid (length ``2*n_cells + 1``). ``forcing`` is an optional
    manufactured-solution source and ``open_loop`` replaces the feedback law
    by a prescribed time signal.
    """

    K: float = 0.0
    h1: float = 0.0
    h0: float = 0.0
    g0: float = 0.0
    v0: Profile = "0"
    n_cells: int = 32
    dt: float = 1e-3
    t_final: float = 1.0
    picard_tol: float = 1e-11
    picard_max: int = 50
    scheme: str = "semi_implicit_euler"
    forcing: Optional[MMSForcing] = None
    open_loop: Optional[OpenLoopSignal] = None

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_final / self.dt)))

    @property
    def n_nodes(self) -> int:
        return 2 * self.n_cells + 1

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)

    # -- JSON ---------------------------------------------------------------
    def to_dict(self) -> dict:
        v0 = self.v0
        if callable(v0):
            raise TypeError("a callable v0 cannot be serialized; use an expression string")
        if isinstance(v0, np.ndarray):
            v0 = v0.tolist()
        elif isinstance(v0, (list, tuple)):
            v0 = [float(x) for x in v0]
        return {
            "K": self.K,
            "h1": self.h1,
            "h0": self.h0,
            "g0": self.g0,
            "v0": v0,
            "n_cells": self.n_cells,
            "dt": self.dt,
            "t_final": self.t_final,
            "picard_tol": self.picard_tol,
            "picard_max": self.picard_max,
            "scheme": self.scheme,
            "forcing": None if self.forcing is None else self.forcing.to_dict(),
            "open_loop": None if self.open_loop is None else self.open_loop.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    @classmethod
    def from_dict(cls, data: dict) -> "SimConfig":
        if not isinstance(data, dict):
            raise InvalidConfig("config document must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InvalidConfig([f"unknown key {k!r}" for k in unknown])
        kwargs = dict(data)
        try:
            if kwargs.get("forcing") is not None:
                kwargs["forcing"] = make_forcing(kwargs["forcing"])
            if kwargs.get("open_loop") is not None:
                kwargs["open_loop"] = make_open_loop(kwargs["open_loop"])
        except (TypeError, ValueError, KeyError) as exc:
            raise InvalidConfig(str(exc)) from exc
        return cls(**kwargs)

    @classmethod
    def from_json(cls, text: str) -> "SimConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"malformed JSON: {exc}") from exc
        return cls.from_dict(data)


# validated configs are plain SimConfigs with normalized field types
ValidatedConfig = SimConfig


def _is_real(x) -> bool:
    return isinstance(x, (int, float, np.integer, np.floating)) and not isinstance(x, bool)


def validate_config(cfg: SimConfig) -> ValidatedConfig:
    """Check every invariant of ``cfg`` and return a normalized copy.

    Raises
    ------
    InvalidConfig
        With one message per violated field.
    """
    errors = []

    def real(name):
        value = getattr(cfg, name)
        if not _is_real(value) or not math.isfinite(value):
            errors.append(f"{name} must be a finite number")
            return None
        return float(value)

    K, h1, h0, g0 = real("K"), real("h1"), real("h0"), real("g0")
    dt, t_final, picard_tol = real("dt"), real("t_final"), real("picard_tol")

    if K is not None and K < 0:
        errors.append("K ≥ 0 required")
    for name, value in (("h0", h0), ("h1", h1)):
        if value is not None and not -1.0 < value < 1.0:
            errors.append(f"{name} must lie strictly inside (−1,1)")
    if dt is not None and dt <= 0:
        errors.append("dt must be > 0")
    if t_final is not None and dt is not None and dt > 0 and t_final < dt:
        errors.append("t_final must be ≥ dt")
    if picard_tol is not None and picard_tol <= 0:
        errors.append("picard_tol must be > 0")

    n_cells = cfg.n_cells
    if not isinstance(n_cells, (int, np.integer)) or isinstance(n_cells, bool):
        errors.append("n_cells must be an integer")
        n_cells = None
    elif n_cells < 4:
        errors.append("n_cells must be ≥ 4")
    picard_max = cfg.picard_max
    if not isinstance(picard_max, (int, np.integer)) or isinstance(picard_max, bool) or picard_max < 1:
        errors.append("picard_max must be an integer ≥ 1")
    if cfg.scheme not in SCHEMES:
        errors.append(f"scheme must be one of {', '.join(SCHEMES)}")
    if cfg.forcing is not None and not isinstance(cfg.forcing, MMSForcing):
        errors.append("forcing must be an MMSForcing instance or null")
    if cfg.open_loop is not None and not isinstance(cfg.open_loop, OpenLoopSignal):
        errors.append("open_loop must be an OpenLoopSignal instance or null")

    v0 = cfg.v0
    if isinstance(v0, str):
        try:
            compile(v0, "<v0>", "eval")
        except SyntaxError as exc:
            errors.append(f"v0 expression does not parse: {exc.msg}")
    elif callable(v0) or _is_real(v0):
        pass
    else:
        try:
            samples = np.asarray(v0, dtype=float)
        except (TypeError, ValueError):
            errors.append("v0 must be a callable, expression, number or sample list")
        else:
            if samples.ndim != 1:
                errors.append("v0 samples must be one-dimensional")
            elif n_cells is not None and samples.size != 2 * n_cells + 1:
                errors.append(f"v0 samples must have length 2*n_cells+1 = {2 * n_cells + 1}")
            else:
                v0 = tuple(float(x) for x in samples)

    if errors:
        raise InvalidConfig(errors)
    return dataclasses.replace(
        cfg, K=K, h1=h1, h0=h0, g0=g0, dt=dt, t_final=t_final, picard_tol=picard_tol,
        n_cells=int(n_cells), picard_max=int(picard_max), v0=v0,
    )


@dataclass(frozen=True)
class State:
    """Discrete solution at one time."""

    t: float
    V: np.ndarray
    h: float
    g: float

    def __post_init__(self):
        V = np.array(self.V, dtype=float)
        V.setflags(write=False)
        object.__setattr__(self, "V", V)

    @property
    def n_cells(self) -> int:
        return (self.V.size - 1) // 2

    @property
    def particle_index(self) -> int:
        return self.n_cells

    def check(self) -> None:
        """Assert the structural invariants (ends zero, shared particle node)."""
        assert self.V[0] == 0.0 and self.V[-1] == 0.0
        assert self.V[self.particle_index] == self.g
        assert -1.0 < self.h < 1.0

    def __eq__(self, other):
        if not isinstance(other, State):
            return NotImplemented
        return (self.t == other.t and self.h == other.h and self.g == other.g
                and np.array_equal(self.V, other.V))

    __hash__ = None


def evaluate_profile(v0: Profile, y: np.ndarray) -> np.ndarray:
    """Evaluate an initial profile at physical points ``y``."""
    y = np.asarray(y, dtype=float)
    if isinstance(v0, str):
        values = eval(v0, dict(_EXPR_NAMESPACE), {"y": y})  # noqa: S307 - restricted namespace
    elif callable(v0):
        values = v0(y)
    elif _is_real(v0):
        values = float(v0)
    else:
        values = np.asarray(v0, dtype=float)
        if values.shape != y.shape:
            raise EvaluationError("nodal samples do not match the grid")
    return np.broadcast_to(np.asarray(values, dtype=float), y.shape).copy()


def initialize_state(cfg: ValidatedConfig) -> State:
    """Build the t = 0 state: sample ``v0`` at the mapped nodes, pin ends and particle."""
    grid = geometry.ReferenceGrid(cfg.n_cells)
    y = grid.physical_nodes(cfg.h0)
    try:
        V = evaluate_profile(cfg.v0, y)
    except (NameError, TypeError, ValueError, ArithmeticError) as exc:
        if isinstance(exc, EvaluationError):
            raise
        raise EvaluationError(f"cannot evaluate v0: {exc}") from exc
    if not np.all(np.isfinite(V)):
        bad = np.flatnonzero(~np.isfinite(V))
        raise EvaluationError(f"v0 is non-finite at nodes {bad.tolist()}")
    V[0] = 0.0
    V[-1] = 0.0
    g0 = float(cfg.g0)
    V[grid.particle_index] = g0
    return State(t=0.0, V=V, h=float(cfg.h0), g=g0)


@dataclass(frozen=True)
class Trajectory:
    """Time-indexed states stored column-wise.

    ``V`` has shape ``(n_samples, 2*n_cells + 1)``; ``dissipation_cum[k]`` is the
    accumulated ``2 ∫∫ v_y²`` up to ``t[k]`` and ``controls[k]`` the control
    value at ``t[k]``.
    """

    config: SimConfig
    t: np.ndarray
    V: np.ndarray
    h: np.ndarray
    g: np.ndarray
    dissipation_cum: np.ndarray
    controls: np.ndarray
    picard_iterations: np.ndarray = field(default=None)

    def __post_init__(self):
        for name in ("t", "V", "h", "g", "dissipation_cum", "controls"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return self.t.size

    def state(self, k: int) -> State:
        return State(t=float(self.t[k]), V=self.V[k], h=float(self.h[k]), g=float(self.g[k]))

    @property
    def states(self) -> list:
        return [self.state(k) for k in range(len(self))]

    @property
    def initial(self) -> State:
        return self.state(0)

    @property
    def final(self) -> State:
        return self.state(len(self) - 1)

    @property
    def n_cells(self) -> int:
        return (self.V.shape[1] - 1) // 2
