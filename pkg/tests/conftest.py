"""
Shared fixtures: the bundled Portland cement data and random full-rank tables.
"""
import numpy as np
import pandas as pd
import pytest

from src.models.risk import RiskMode
from src.services.datasets import load_dataset
from src.services.model_core import canonicalize, standardize
from src.services.shrink_paths import build_efficient_path, build_qm_path, build_yonx_path
from src.services.trace_io import assemble_traces

PORTLAND_X = ["p3ca", "p3cs", "p4caf", "p2cs"]


def random_table(rng: np.random.Generator, n: int, p: int) -> pd.DataFrame:
    """Table with a correlated outcome column 'y' and predictors x1..xp."""
    x = rng.normal(size=(n, p)) @ (np.eye(p) + 0.3 * rng.normal(size=(p, p)))
    y = x @ rng.normal(size=p) + rng.normal(size=n)
    frame = pd.DataFrame(x, columns=[f"x{j + 1}" for j in range(p)])
    frame.insert(0, "y", y)
    return frame


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


@pytest.fixture(scope="session")
def portland_frame():
    return load_dataset("portland").to_frame()


@pytest.fixture(scope="session")
def portland_model(portland_frame):
    return standardize(portland_frame, "heat", PORTLAND_X)


@pytest.fixture(scope="session")
def portland_cf(portland_model):
    return canonicalize(portland_model)


@pytest.fixture(scope="session")
def portland_path(portland_cf):
    return build_efficient_path(portland_cf, 20)


@pytest.fixture(scope="session")
def portland_bundle(portland_cf, portland_path):
    return assemble_traces(portland_cf, portland_path, RiskMode.ML)


@pytest.fixture(scope="session")
def qm5_path(portland_cf):
    return build_qm_path(portland_cf, -5.0, 20)


@pytest.fixture(scope="session")
def p2_model(portland_frame):
    return standardize(portland_frame, "heat", ["p3cs", "p2cs"])


@pytest.fixture(scope="session")
def p2_cf(p2_model):
    return canonicalize(p2_model)


@pytest.fixture(scope="session")
def yonx_model(portland_frame):
    return standardize(portland_frame, "heat", ["p4caf"])


@pytest.fixture(scope="session")
def yonx_cf(yonx_model):
    return canonicalize(yonx_model)


@pytest.fixture(scope="session")
def yonx_path(yonx_model):
    return build_yonx_path(yonx_model, 20)


@pytest.fixture(scope="session")
def exact_cf(portland_frame):
    return canonicalize(standardize(portland_frame, "heat", ["heat"]))
