"""Interface-fitted coordinates.

The physical domain (−1, 1) is split at the particle position ``h`` and each
piece is mapped affinely onto a half of the reference interval [−1, 1], so the
particle always sits at ξ = 0:

    y = h + ξ (1 + h)   for ξ ≤ 0
    y = h + ξ (1 − h)   for ξ ≥ 0

The Jacobians ``1 ± h`` are constant on each half.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GeometryError


def _check_position(h):
    h = np.asarray(h, dtype=float)
    if not np.all((h > -1.0) & (h < 1.0)):
        raise DomainError(f"particle position must lie in (−1,1), got {h}")
    return h


def _check_closed(name, x):
    x = np.asarray(x, dtype=float)
    if not np.all((x >= -1.0) & (x <= 1.0)):
        raise DomainError(f"{name} must lie in [−1,1]")
    return x


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def map_to_physical(xi, h):
    """Reference coordinate ξ ∈ [−1,1] to physical y for particle position h."""
    xi = _check_closed("xi", xi)
    h = _check_position(h)
    y = np.where(xi <= 0.0, h + xi * (1.0 + h), h + xi * (1.0 - h))
    # endpoints and the interface are reproduced exactly
    y = np.where(xi == -1.0, -1.0, np.where(xi == 1.0, 1.0, np.where(xi == 0.0, h, y)))
    return _scalar_or_array(y)


def map_to_reference(y, h):
    """Inverse of :func:`map_to_physical`."""
    y = _check_closed("y", y)
    h = _check_position(h)
    xi = np.where(y <= h, (y - h) / (1.0 + h), (y - h) / (1.0 - h))
    xi = np.where(y == -1.0, -1.0, np.where(y == 1.0, 1.0, np.where(y == h, 0.0, xi)))
    return _scalar_or_array(xi)


def mesh_velocity(xi, g):
    """ALE mesh velocity at reference coordinate ξ when the particle moves with speed g."""
    xi = _check_closed("xi", xi)
    w = np.where(xi <= 0.0, (xi + 1.0) * g, (1.0 - xi) * g)
    return _scalar_or_array(w)


def eval_phi(y, h):
    """Hat-shaped test function: 1 at the particle, 0 at both walls, affine in between."""
    y = _check_closed("y", y)
    h = _check_position(h)
    phi = np.where(y < h, (y + 1.0) / (1.0 + h), (1.0 - y) / (1.0 - h))
    phi = np.where(y == h, 1.0, phi)
    return _scalar_or_array(phi)


class ReferenceGrid:
    """Uniform nodes on [−1, 0] and [0, 1] with ``n_cells`` cells each."""

    def __init__(self, n_cells: int):
        if n_cells < 1:
            raise ValueError("n_cells must be positive")
        self.n_cells = int(n_cells)
        right = np.arange(self.n_cells + 1) / self.n_cells
        self.xi = np.concatenate([-right[::-1], right[1:]])
        self.xi.setflags(write=False)
        self.dxi = 1.0 / self.n_cells
        # +1 for elements right of the particle, -1 for the left ones
        self.element_side = np.repeat([-1.0, 1.0], self.n_cells)
        self.element_side.setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return self.xi.size

    @property
    def n_elements(self) -> int:
        return 2 * self.n_cells

    @property
    def particle_index(self) -> int:
        return self.n_cells

    def physical_nodes(self, h):
        return map_to_physical(self.xi, h)

    def jacobians(self, h):
        """Per-element Jacobian dy/dξ; ``h`` may be an array (leading axes broadcast)."""
        h = np.asarray(h, dtype=float)[..., None]
        return np.where(self.element_side < 0, 1.0 + h, 1.0 - h)

    def element_lengths(self, h):
        return self.dxi * self.jacobians(h)

    def mesh_velocity(self, g):
        return mesh_velocity(self.xi, g)

    def __repr__(self):
        return f"ReferenceGrid(n_cells={self.n_cells})"


@dataclass(frozen=True)
class GeometrySnapshot:
    """Geometry of one time level: interface position and the particle speed driving the mesh."""

    h: float
    g: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.h) or self.h <= -1.0 or self.h >= 1.0:
            raise GeometryError(f"non-positive subdomain Jacobian for h={self.h}")

    @property
    def J_left(self) -> float:
        return 1.0 + self.h

    @property
    def J_right(self) -> float:
        return 1.0 - self.h

    def node_mesh_velocity(self, grid: ReferenceGrid) -> np.ndarray:
        return grid.mesh_velocity(self.g)
