import numpy as np
import pytest

from burgers_particle import SimConfig, validate_config


def make_config(**changes):
    fields = dict(K=1.0, h1=0.0, h0=0.2, g0=0.5, v0="sin(pi*y)", n_cells=16, dt=2e-3, t_final=0.2)
    fields.update(changes)
    return validate_config(SimConfig(**fields))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def sine_cfg():
    return make_config()
