import os

import pytest

from bregmoreau.legendre import (kernel_boltzmann_shannon, kernel_energy,
                                 kernel_fermi_dirac)
from bregmoreau.objective import objective_abs_deviation
from bregmoreau.settings import ENV_PREFIX, reset_default_settings


KERNEL_FACTORIES = {
    'energy': kernel_energy,
    'bs': kernel_boltzmann_shannon,
    'fd': kernel_fermi_dirac,
}

# Base points well inside U for each kernel
INTERIOR_POINTS = {
    'energy': (-1.5, -0.2, 0.3, 0.5, 0.9, 2.0, 3.0),
    'bs': (0.05, 0.2, 0.45, 0.5, 0.8, 1.7, 3.0),
    'fd': (0.05, 0.2, 0.45, 0.5, 0.6, 0.8, 0.95),
}


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch):
    for name in list(os.environ):
        if name.startswith(ENV_PREFIX):
            monkeypatch.delenv(name)
    monkeypatch.setenv(ENV_PREFIX + 'CONFIG', os.devnull)
    reset_default_settings()
    yield
    reset_default_settings()


@pytest.fixture(params=sorted(KERNEL_FACTORIES))
def kernel(request):
    return KERNEL_FACTORIES[request.param]()


@pytest.fixture
def abs_half():
    return objective_abs_deviation(0.5)


@pytest.fixture
def ini_file():
    return os.path.join(os.path.dirname(os.path.abspath(__file__)),
                        'bregmoreau_test.ini')
