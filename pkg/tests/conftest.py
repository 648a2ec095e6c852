import numpy as np
import pytest

from dualgeo import DEFAULT_CONFIG, make_builtin

MODEL_SPECS = {
    "euclidean": ("euclidean", [3]),
    "sphere": ("sphere", [2, 1.0]),
    "categorical": ("categorical", [2]),
    "gaussian1d": ("gaussian1d", [2]),
    "alpha_categorical": ("alpha_categorical", [2, 0.5]),
}


@pytest.fixture(scope="session")
def cfg():
    return DEFAULT_CONFIG


@pytest.fixture(scope="session")
def models():
    return {name: make_builtin(*spec) for name, spec in MODEL_SPECS.items()}


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
