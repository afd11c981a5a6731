"""
Fixtures compartidas: campos analíticos, generador sembrado y rutas de specs
"""

import numpy as np
import pytest

from src import samples
from src.config import SPECS_DIR
from src.sections import Section


# Punto interior de Schwarzschild (t, r, θ, φ) con M = 1
SCHWARZSCHILD_POINT = np.array([0.5, 5.0, 1.1, 0.4])
FLRW_POINT = np.array([1.2, 0.3, 0.6, 0.2])
UNIT_POINT = np.array([0.3, 0.45, 0.6, 0.7])


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope="session")
def minkowski_field():
    return samples.minkowski()


@pytest.fixture(scope="session")
def schwarzschild_field():
    return samples.schwarzschild(M=1.0)


@pytest.fixture(scope="session")
def schwarzschild_section(schwarzschild_field):
    return Section(schwarzschild_field)


@pytest.fixture(scope="session")
def schwarzschild_explicit(schwarzschild_field):
    """Schwarzschild con la conexión de espín escrita a mano"""
    return Section(schwarzschild_field, spin=samples.schwarzschild_spin())


@pytest.fixture(scope="session")
def flrw_field():
    return samples.flrw()


@pytest.fixture(scope="session")
def rindler_field():
    return samples.rindler()


@pytest.fixture(scope="session")
def specs_dir():
    return SPECS_DIR
