import math
import os
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, ROOT)

from fock_core import noon_state  # noqa: E402


SAMPLE_DIR = os.path.join(ROOT, 'sample_circuits')


@pytest.fixture
def tol():
    return 1e-12


@pytest.fixture
def state_tol():
    return 1e-10


@pytest.fixture
def noon2():
    return noon_state(2)


@pytest.fixture
def noon4_plus():
    return noon_state(4)


@pytest.fixture
def noon4_minus():
    return noon_state(4, sign=-1)


@pytest.fixture
def sample_path():
    def path(name):
        return os.path.join(SAMPLE_DIR, name)
    return path


@pytest.fixture
def inv_sqrt2():
    return 1 / math.sqrt(2)
