"""Shared fixtures for rinzelkit tests."""

import numpy as np
import pytest

from rinzelkit.analysis.certificate import certificate
from rinzelkit.model.params import FhrParams

EXAMPLE_A = -0.98
CERTIFIED_EPS1 = 1e-4


@pytest.fixture
def paper_params():
    """Worked-example constants at a = -0.98."""
    return FhrParams.paper_set(a=EXAMPLE_A)


@pytest.fixture
def certified(paper_params):
    """Valid certificate for the worked example with eps1 = 1e-4."""
    cert = certificate(paper_params, CERTIFIED_EPS1)
    assert cert.valid
    return cert


@pytest.fixture
def zero_source_params():
    """Parameters with C1 = 0 (I = c = h = 0 and a = eta + gamma), so C1/C = 0."""
    return FhrParams(D=1.0, a=2.0, I=0.0, eps=1.0, beta=1.0, c=0.0, d=1.0, h=0.0, delta=1.0, k=0.1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def sample_states(rng, n, max_energy):
    """n points with energy (u^2 + w^2 + y^2)/2 uniform in (0, max_energy]."""
    directions = rng.normal(size=(n, 3))
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    energies = rng.uniform(0.0, max_energy, size=n)
    energies = np.maximum(energies, 1e-6 * max_energy)
    return directions * np.sqrt(2.0 * energies)[:, None]
