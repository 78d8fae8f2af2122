"""Simulation and verification lab for a viscous Burgers fluid coupled to a point mass."""

from .control import ControlLaw, MovingKinkForcing, OpenLoopSignal, control_force, mms_forcing
from .core import SimConfig, State, Trajectory, initialize_state, validate_config
from .discretization import assemble, run_simulation, step
from .geometry import ReferenceGrid, eval_phi, map_to_physical, map_to_reference, mesh_velocity

__version__ = "0.1.0"

__all__ = [
    "ControlLaw", "MovingKinkForcing", "OpenLoopSignal", "ReferenceGrid", "SimConfig", "State",
    "Trajectory", "assemble", "control_force", "eval_phi", "initialize_state", "map_to_physical",
    "map_to_reference", "mesh_velocity", "mms_forcing", "run_simulation", "step", "validate_config",
]
