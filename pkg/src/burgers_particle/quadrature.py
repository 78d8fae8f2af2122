"""Element quadrature on the reference grid.

Every integral over (−1, 1) is split into the 2N elements; on each element the
integrand is sampled at Gauss–Legendre points of the reference coordinate and
weighted by the physical element length, so piecewise polynomials of degree
≤ 5 are integrated exactly. Leading axes of ``V`` and ``h`` (time samples)
broadcast.
"""

from __future__ import annotations

import numpy as np

from .geometry import ReferenceGrid

GAUSS_NODES, GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(3)
# barycentric position of each Gauss point inside an element, in [0, 1]
GAUSS_LAMBDA = 0.5 * (GAUSS_NODES + 1.0)
GAUSS_W01 = 0.5 * GAUSS_WEIGHTS


def element_xi(grid: ReferenceGrid) -> np.ndarray:
    """Reference coordinates of the Gauss points, shape ``(2N, 3)``."""
    left = grid.xi[:-1, None]
    return left + grid.dxi * GAUSS_LAMBDA[None, :]


def element_y(grid: ReferenceGrid, h) -> np.ndarray:
    """Physical coordinates of the Gauss points, shape ``(..., 2N, 3)``."""
    h = np.asarray(h, dtype=float)[..., None, None]
    xi = element_xi(grid)
    side = grid.element_side[:, None]
    J = np.where(side < 0, 1.0 + h, 1.0 - h)
    return h + xi * J


def interpolate(V) -> np.ndarray:
    """P1 values at the Gauss points, shape ``(..., 2N, 3)``."""
    V = np.asarray(V, dtype=float)
    a = V[..., :-1, None]
    b = V[..., 1:, None]
    return a + (b - a) * GAUSS_LAMBDA


def slopes(V, grid: ReferenceGrid, h) -> np.ndarray:
    """Per-element physical derivative v_y, shape ``(..., 2N)``."""
    V = np.asarray(V, dtype=float)
    return np.diff(V, axis=-1) / grid.element_lengths(h)


def integrate(values, grid: ReferenceGrid, h) -> np.ndarray:
    """∫ over (−1,1) of a quantity sampled at the Gauss points (shape ``(..., 2N, 3)``)."""
    L = grid.element_lengths(h)
    return np.sum(np.sum(values * GAUSS_W01, axis=-1) * L, axis=-1)


def load_vector(values, grid: ReferenceGrid, h) -> np.ndarray:
    """Assemble ∫ f ψ_i dy for f sampled at the Gauss points of a single geometry."""
    L = grid.element_lengths(h)
    wf = values * GAUSS_W01 * L[..., None]
    out = np.zeros(grid.n_nodes)
    out[:-1] += np.sum(wf * (1.0 - GAUSS_LAMBDA), axis=-1)
    out[1:] += np.sum(wf * GAUSS_LAMBDA, axis=-1)
    return out
