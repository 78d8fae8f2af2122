import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from burgers_particle import SimConfig, State, initialize_state, validate_config
from burgers_particle.control import MovingKinkForcing, OpenLoopSignal
from burgers_particle.errors import EvaluationError, InvalidConfig
from burgers_particle.geometry import ReferenceGrid

from conftest import make_config


class TestValidateConfig:
    def test_accepts_valid(self):
        cfg = validate_config(SimConfig(K=1, h0=0, h1=0.5, n_cells=32, dt=1e-3, t_final=1))
        assert cfg.K == 1.0 and isinstance(cfg.K, float)
        assert cfg.n_steps == 1000
        assert cfg.n_nodes == 65

    def test_h0_on_wall_rejected(self):
        with pytest.raises(InvalidConfig, match=r"h0 must lie strictly inside \(−1,1\)"):
            validate_config(SimConfig(h0=1.0))

    def test_negative_gain_rejected(self):
        with pytest.raises(InvalidConfig, match="K ≥ 0 required"):
            validate_config(SimConfig(K=-0.5))

    @pytest.mark.parametrize("changes, message", [
        ({"n_cells": 3}, "n_cells must be ≥ 4"),
        ({"dt": 0.0}, "dt must be > 0"),
        ({"dt": 0.1, "t_final": 0.05}, "t_final must be ≥ dt"),
        ({"h1": -1.0}, "h1 must lie strictly inside"),
        ({"scheme": "rk4"}, "scheme must be one of"),
        ({"picard_max": 0}, "picard_max"),
        ({"v0": "sin(pi*"}, "does not parse"),
        ({"v0": [0.0, 1.0, 0.0]}, "length 2\\*n_cells\\+1"),
        ({"K": float("nan")}, "K must be a finite number"),
    ])
    def test_field_messages(self, changes, message):
        with pytest.raises(InvalidConfig, match=message):
            validate_config(SimConfig(**changes))

    def test_collects_all_violations(self):
        with pytest.raises(InvalidConfig) as info:
            validate_config(SimConfig(K=-1, h0=2.0, n_cells=2))
        assert len(info.value.violations) == 3

    def test_invalid_config_is_value_error(self):
        with pytest.raises(ValueError):
            validate_config(SimConfig(K=-1))


class TestConfigSerialization:
    def test_json_round_trip(self):
        cfg = make_config(forcing=MovingKinkForcing(0.2, 2.0, 0.1),
                          open_loop=OpenLoopSignal("sine", amplitude=0.3, omega=2.0))
        back = validate_config(SimConfig.from_json(cfg.to_json()))
        assert back == cfg
        assert back.digest() == cfg.digest()

    def test_unknown_key_rejected(self):
        with pytest.raises(InvalidConfig, match="unknown"):
            SimConfig.from_dict({"K": 1.0, "viscosity": 2.0})

    def test_malformed_json(self):
        with pytest.raises(InvalidConfig):
            SimConfig.from_json("{not json")

    def test_digest_changes_with_content(self):
        assert make_config(K=1.0).digest() != make_config(K=2.0).digest()

    def test_field_names(self):
        keys = set(json.loads(SimConfig().to_json()))
        assert {"K", "h1", "h0", "g0", "v0", "n_cells", "dt", "t_final", "picard_tol",
                "picard_max", "scheme", "forcing"} <= keys


class TestInitializeState:
    def test_zero_data(self):
        s = initialize_state(make_config(v0="0", g0=0.0, h0=0.2))
        assert np.all(s.V == 0) and s.h == 0.2 and s.g == 0.0 and s.t == 0.0

    def test_sine_compatibility(self):
        s = initialize_state(make_config(v0="sin(pi*y)", g0=0.0, h0=0.0))
        ip = s.particle_index
        assert s.V[ip] == 0.0 and s.V[0] == 0.0 and s.V[-1] == 0.0
        s.check()

    def test_g0_overrides_only_particle_node(self):
        cfg = make_config(v0="1 - y**2", g0=0.5, h0=0.0)
        s = initialize_state(cfg)
        grid = ReferenceGrid(cfg.n_cells)
        pointwise = 1.0 - grid.physical_nodes(0.0) ** 2
        differs = np.flatnonzero(s.V != pointwise)
        assert differs.tolist() == [grid.particle_index]
        assert s.V[grid.particle_index] == 0.5

    def test_callable_and_samples(self):
        cfg = make_config(v0=lambda y: np.sin(np.pi * y))
        by_callable = initialize_state(cfg)
        by_string = initialize_state(make_config())
        assert np.array_equal(by_callable.V, by_string.V)
        samples = initialize_state(make_config(v0=list(by_string.V)))
        assert np.array_equal(samples.V, by_string.V)

    def test_non_finite_profile(self):
        with np.errstate(invalid="ignore"), pytest.raises(EvaluationError):
            initialize_state(make_config(v0="sqrt(y)"))

    def test_unknown_name(self):
        with pytest.raises(EvaluationError):
            initialize_state(make_config(v0="gamma(y)"))

    def test_deterministic(self):
        assert initialize_state(make_config()) == initialize_state(make_config())

    @settings(max_examples=40, deadline=None)
    @given(h0=st.floats(-0.95, 0.95), g0=st.floats(-5, 5), k=st.integers(1, 4),
           n=st.integers(4, 24))
    def test_invariants_exact(self, h0, g0, k, n):
        s = initialize_state(make_config(h0=h0, g0=g0, v0=f"cos({k}*y)", n_cells=n))
        assert s.V[0] == 0.0 and s.V[-1] == 0.0 and s.V[s.particle_index] == g0
        assert s.V.size == 2 * n + 1


class TestState:
    def test_immutable(self):
        s = State(0.0, np.zeros(9), 0.0, 0.0)
        with pytest.raises(ValueError):
            s.V[1] = 1.0

    def test_equality(self):
        a = State(0.0, np.zeros(9), 0.1, 0.0)
        assert a == State(0.0, np.zeros(9), 0.1, 0.0)
        assert a != State(0.0, np.zeros(9), 0.2, 0.0)
