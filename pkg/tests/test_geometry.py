import numpy as np
import pytest
from hypothesis import given, strategies as st

from burgers_particle.errors import DomainError, GeometryError
from burgers_particle.geometry import (GeometrySnapshot, ReferenceGrid, eval_phi, map_to_physical,
                                       map_to_reference, mesh_velocity)


class TestMaps:
    @pytest.mark.parametrize("xi, h, y", [(0.0, 0.3, 0.3), (-0.5, 0.0, -0.5), (0.5, 0.5, 0.75)])
    def test_map_to_physical(self, xi, h, y):
        assert map_to_physical(xi, h) == pytest.approx(y, abs=1e-15)

    @pytest.mark.parametrize("y, h, xi", [(0.37, 0.37, 0.0), (-1.0, 0.9, -1.0), (0.75, 0.5, 0.5)])
    def test_map_to_reference(self, y, h, xi):
        assert map_to_reference(y, h) == pytest.approx(xi, abs=1e-15)

    def test_left_branch_matches_wall_form(self):
        xi = np.linspace(-1, 0, 11)
        for h in (-0.7, 0.0, 0.4):
            assert np.allclose(map_to_physical(xi, h), -1 + (xi + 1) * (1 + h), atol=1e-15)

    @pytest.mark.parametrize("h", np.round(np.arange(-0.9, 0.91, 0.1), 10))
    def test_round_trip_grid_nodes(self, h):
        grid = ReferenceGrid(32)
        back = map_to_reference(map_to_physical(grid.xi, h), h)
        assert np.all(np.abs(back - grid.xi) <= 4 * np.spacing(np.maximum(np.abs(grid.xi), 1.0)))

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            map_to_physical(1.5, 0.0)
        with pytest.raises(DomainError):
            map_to_physical(0.0, 1.0)
        with pytest.raises(DomainError):
            map_to_reference(-1.2, 0.0)
        with pytest.raises(DomainError):
            eval_phi(0.0, -1.0)


class TestMeshVelocity:
    @pytest.mark.parametrize("xi, g, w", [(0.0, 2.0, 2.0), (-1.0, 5.0, 0.0), (0.5, 1.0, 0.5)])
    def test_examples(self, xi, g, w):
        assert mesh_velocity(xi, g) == w

    @given(st.floats(-1, 1), st.floats(-10, 10), st.floats(-10, 10))
    def test_linear_in_g(self, xi, g1, g2):
        assert mesh_velocity(xi, g1 + g2) == pytest.approx(mesh_velocity(xi, g1) + mesh_velocity(xi, g2),
                                                           abs=1e-12)
        assert mesh_velocity(-1.0, g1) == 0.0 and mesh_velocity(1.0, g1) == 0.0


class TestPhi:
    def test_examples(self):
        assert eval_phi(0.42, 0.42) == 1.0
        assert eval_phi(0.5, 0.0) == pytest.approx(0.5)
        assert eval_phi(-0.5, 0.5) == pytest.approx(1 / 3)

    @given(st.floats(-1, 1), st.floats(-0.99, 0.99))
    def test_bounded(self, y, h):
        v = eval_phi(y, h)
        assert 0.0 <= v <= 1.0

    def test_vanishes_at_walls(self):
        for h in (-0.5, 0.0, 0.8):
            assert eval_phi(-1.0, h) == 0.0 and eval_phi(1.0, h) == 0.0


class TestReferenceGrid:
    def test_structure(self):
        grid = ReferenceGrid(8)
        assert grid.n_nodes == 17 and grid.particle_index == 8
        assert grid.xi[8] == 0.0 and grid.xi[0] == -1.0 and grid.xi[-1] == 1.0
        assert np.all(np.diff(grid.xi) > 0)
        assert np.array_equal(grid.xi, -grid.xi[::-1])

    def test_physical_nodes_put_particle_on_node(self):
        grid = ReferenceGrid(8)
        y = grid.physical_nodes(0.3)
        assert y[8] == 0.3 and y[0] == -1.0 and y[-1] == 1.0
        assert grid.element_lengths(0.3).sum() == pytest.approx(2.0, abs=1e-14)

    def test_snapshot(self):
        s = GeometrySnapshot(0.25, 1.0)
        assert s.J_left + s.J_right == 2.0 and s.J_left == 1.25
        with pytest.raises(GeometryError):
            GeometrySnapshot(1.0)
