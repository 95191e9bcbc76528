# tests/conftest.py
"""Fixtures compartidos: parámetros del modelo y mallas de frecuencia"""

import pytest
from loguru import logger

from src.coupling import frequency_grid
from src.model import ModelParams


@pytest.fixture(autouse=True)
def quiet_logger():
    # sin sinks: los tests no escriben en data/logs
    logger.remove()
    yield
    logger.remove()


@pytest.fixture
def params():
    """Parámetros por defecto: 𝒜 = 32 meV, T = 0"""
    return ModelParams()


@pytest.fixture
def warm_params(params):
    return params.with_temperature(300.0)


@pytest.fixture(scope="session")
def omega():
    """Malla por defecto [−0.3, 0.4] eV con paso 0.1 meV"""
    return frequency_grid(-0.3, 0.4, 1e-4)


@pytest.fixture(scope="session")
def narrow_omega():
    return frequency_grid(-0.05, 0.15, 1e-4)


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    """Directorio de trabajo temporal para el CLI (reports/ y data/logs/ quedan dentro)"""
    monkeypatch.chdir(tmp_path)
    return tmp_path
