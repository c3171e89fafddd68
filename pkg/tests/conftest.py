"""Shared fixtures: default spectral grid, layer stacks, and a small turbulence setup.

The "tiny" turbulence configuration trades physical fidelity for speed; it
exercises every code path (screens, subharmonics, split-step, caching) in
about a second and is used wherever a test needs ensemble plumbing rather
than converged channel statistics.
"""

import numpy as np
import pytest

from satmodes.config import RunConfig
from satmodes.temporal import build_grid, pulse_sigma
from satmodes.atmosphere import build_layers
from satmodes.turbulence import TurbulenceParams, run_ensemble

WAVELENGTH_UM = 1.064
OMEGA0 = 1770349217395538.5        # 2 pi c / 1.064 um [rad/s]
SIGMA = 8325546111576.977          # 200 fs intensity-FWHM pulse [rad/s]


@pytest.fixture(scope="session")
def default_grid():
    return build_grid(OMEGA0, SIGMA)


@pytest.fixture(scope="session")
def stack_sea_level():
    return build_layers(0.0, 500e3, 0.0, OMEGA0)


@pytest.fixture(scope="session")
def stack_3000m():
    return build_layers(3000.0, 500e3, 0.0, OMEGA0)


def tiny_run_config(**overrides) -> RunConfig:
    base = dict(n_xy=128, extent=8.0, aperture_radius=2.0, n_realizations=3,
                n_screens=3, n_subharmonics=1, seed=11,
                l_values=(-1, 0, 1), d_values=(2,),
                eta1_values=(0.0, 0.1), detection_eta1_values=(0.0, 0.1))
    base.update(overrides)
    return RunConfig(**base)


@pytest.fixture(scope="session")
def tiny_config() -> RunConfig:
    return tiny_run_config()


@pytest.fixture(scope="session")
def tiny_params(tiny_config) -> TurbulenceParams:
    return tiny_config.turbulence_params()


@pytest.fixture(scope="session")
def tiny_ensemble(tiny_config, tiny_params):
    return run_ensemble(tiny_params, tiny_config.n_realizations, tiny_config.seed)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
