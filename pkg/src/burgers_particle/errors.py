"""Exception hierarchy for the simulation lab."""

from __future__ import annotations


class BurgersParticleError(Exception):
    """Base class for all package errors."""


class InvalidConfig(BurgersParticleError, ValueError):
    """Raised when a configuration violates one or more invariants.

    The individual messages are kept in ``violations`` (one per field problem).
    """

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class EvaluationError(BurgersParticleError, ValueError):
    pass


class DomainError(BurgersParticleError, ValueError):
    pass


class GeometryError(BurgersParticleError, ValueError):
    pass


class SolverError(BurgersParticleError, RuntimeError):
    """Base for failures raised while time stepping; carries the failing time."""

    def __init__(self, message, t=None):
        self.t = t
        if t is not None:
            message = f"{message} (at t={t:.17g})"
        super().__init__(message)


class NonConvergence(SolverError):
    pass


class CollisionAbort(SolverError):
    pass


class LinearSolveFailure(SolverError):
    pass


class DegenerateFit(BurgersParticleError, ValueError):
    pass


class NotApplicable(BurgersParticleError, ValueError):
    pass


class QuadratureError(BurgersParticleError, ValueError):
    pass


class DegenerateStudy(BurgersParticleError, ValueError):
    pass
