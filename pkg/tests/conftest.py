import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from jointlife import experiments


@pytest.fixture(scope="session")
def paper_family():
    return experiments.paper_contracts()


@pytest.fixture(scope="session")
def c_ref():
    return experiments.reference_copula()


@pytest.fixture(scope="session")
def marginal_65():
    return experiments.marginal_x(65.0)


@pytest.fixture(scope="session")
def marginal_62():
    return experiments.marginal_y(62.0)
