import numpy as np
import pytest
import sympy as sp

from burgers_particle.control import (ControlLaw, MovingKinkForcing, OpenLoopSignal, ZeroForcing,
                                      control_force, make_forcing, mms_forcing)
from burgers_particle.core import State
from burgers_particle.geometry import ReferenceGrid


class TestControlForce:
    def test_feedback(self):
        assert control_force(ControlLaw.feedback(2.0, 0.3), 0.0, 0.1) == pytest.approx(0.4)

    def test_zero_gain(self):
        law = ControlLaw.feedback(0.0, 0.7)
        assert all(control_force(law, 0.0, h) == 0.0 for h in (-0.9, 0.0, 0.5))

    def test_at_target(self):
        assert control_force(ControlLaw.feedback(5.0, 0.2), 1.0, 0.2) == 0.0

    def test_affine_slope(self):
        law = ControlLaw.feedback(3.0, 0.1)
        h = np.linspace(-0.9, 0.9, 7)
        u = np.array([control_force(law, 0.0, x) for x in h])
        assert np.allclose(np.diff(u) / np.diff(h), -3.0)

    def test_none_and_open_loop(self):
        assert control_force(ControlLaw(), 2.0, 0.3) == 0.0
        law = ControlLaw.open_loop(OpenLoopSignal("step", amplitude=1.5, t_on=1.0))
        assert control_force(law, 0.5, 0.0) == 0.0 and control_force(law, 1.0, 0.0) == 1.5

    def test_invalid(self):
        with pytest.raises(ValueError):
            ControlLaw.feedback(-1.0, 0.0)
        with pytest.raises(ValueError):
            ControlLaw.feedback(1.0, 1.0)


class TestOpenLoop:
    def test_sine_and_samples(self):
        s = OpenLoopSignal("sine", amplitude=2.0, omega=3.0)
        assert s(0.5) == pytest.approx(2.0 * np.sin(1.5))
        p = OpenLoopSignal("samples", times=(0.0, 1.0), values=(0.0, 2.0))
        assert p(0.25) == 0.5 and p(5.0) == 2.0

    def test_bad_samples(self):
        with pytest.raises(ValueError):
            OpenLoopSignal("samples", times=(1.0, 0.0), values=(0.0, 1.0))


class TestManufacturedSources:
    def test_zero_load(self):
        state = State(0.0, np.zeros(17), 0.1, 0.0)
        assert np.all(mms_forcing(ZeroForcing(), 0.3, state) == 0)
        assert np.all(mms_forcing(None, 0.3, state) == 0)

    @pytest.fixture(scope="class")
    @classmethod
    def symbolic(cls):
        """Sources of the moving-kink solution derived independently with sympy."""
        t, y, a, w, b, K, h1 = sp.symbols("t y a omega beta K h1", real=True)
        h = a * sp.sin(w * t)
        hd = sp.diff(h, t)
        q = b * sp.exp(-t) * (1 - y**2) * (y - h)
        vL = hd * (y + 1) / (1 + h) + q
        vR = hd * (1 - y) / (1 - h) + q
        f = {s: sp.diff(v, t) + v * sp.diff(v, y) - sp.diff(v, y, 2) for s, v in ((-1, vL), (1, vR))}
        jump = (sp.diff(vR, y) - sp.diff(vL, y)).subs(y, h)
        F = sp.diff(h, t, 2) - jump - K * (h1 - h)
        args = (t, y, a, w, b)
        return ({s: sp.lambdify(args, e, "numpy") for s, e in f.items()},
                sp.lambdify((t, a, w, b, K, h1), F, "numpy"),
                {s: sp.lambdify(args, v, "numpy") for s, v in ((-1, vL), (1, vR))})

    @pytest.mark.parametrize("a, w, b", [(0.1, 1.0, 0.5), (0.4, 2.5, -1.0)])
    def test_fluid_source_matches_sympy(self, symbolic, a, w, b):
        f_sym, _, v_sym = symbolic
        mk = MovingKinkForcing(a, w, b)
        for t in (0.0, 0.3, 1.7):
            h = a * np.sin(w * t)
            yl = np.linspace(-1, h, 9)
            yr = np.linspace(h, 1, 9)
            assert np.allclose(mk.fluid_source(t, yl, -1), f_sym[-1](t, yl, a, w, b), atol=1e-12)
            assert np.allclose(mk.fluid_source(t, yr, 1), f_sym[1](t, yr, a, w, b), atol=1e-12)
            assert np.allclose(mk.v_exact(t, yl, -1), v_sym[-1](t, yl, a, w, b), atol=1e-14)

    @pytest.mark.parametrize("K, h1", [(0.0, 0.0), (2.0, 0.3)])
    def test_particle_source_matches_sympy(self, symbolic, K, h1):
        _, F_sym, _ = symbolic
        mk = MovingKinkForcing(0.2, 1.5, 0.7)
        law = ControlLaw.feedback(K, h1)
        for t in (0.0, 0.8, 2.0):
            assert mk.particle_source(t, law) == pytest.approx(F_sym(t, 0.2, 1.5, 0.7, K, h1), abs=1e-12)

    def test_exact_solution_compatible(self):
        mk = MovingKinkForcing(0.3, 2.0, 0.5)
        for t in (0.0, 0.4, 1.1):
            h = mk.h_exact(t)
            assert mk.v_exact(t, h, -1) == pytest.approx(mk.g_exact(t))
            assert mk.v_exact(t, h, 1) == pytest.approx(mk.g_exact(t))
            assert mk.v_exact(t, -1.0, -1) == pytest.approx(0.0, abs=1e-15)
            assert mk.v_exact(t, 1.0, 1) == pytest.approx(0.0, abs=1e-15)

    def test_load_vector_matches_fine_quadrature(self):
        mk = MovingKinkForcing()
        grid = ReferenceGrid(8)
        t = 0.3
        h = float(mk.h_exact(t))
        state = State(t, np.zeros(grid.n_nodes), h, 0.0)
        law = ControlLaw.feedback(1.0, 0.0)
        load = mms_forcing(mk, t, state, law)
        y = grid.physical_nodes(h)
        gx, gw = np.polynomial.legendre.leggauss(12)
        expected = np.zeros(grid.n_nodes)
        for e in range(grid.n_elements):
            a, b = y[e], y[e + 1]
            x = 0.5 * (a + b) + 0.5 * (b - a) * gx
            fx = mk.fluid_source(t, x, -1 if e < grid.particle_index else 1) * 0.5 * (b - a) * gw
            expected[e] += np.sum(fx * (b - x) / (b - a))
            expected[e + 1] += np.sum(fx * (x - a) / (b - a))
        expected[grid.particle_index] += mk.particle_source(t, law)
        expected[0] = expected[-1] = 0.0
        # 3-point Gauss against 12-point: difference is the quadrature error only
        assert np.allclose(load, expected, atol=1e-6)

    def test_make_forcing(self):
        assert make_forcing("moving_kink") == MovingKinkForcing()
        with pytest.raises(ValueError):
            make_forcing("nope")
