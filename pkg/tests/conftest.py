import numpy as np
import pytest

from fhmix import Dataset


@pytest.fixture
def toy3() -> Dataset:
    """Intercept-only hand dataset: y = (0, 0, 3), all d = 1.

    OLS mean is 1, residuals (-1, -1, 2), leverage 1/3 per area, so the
    moment estimate of the effect variance is (6 - 2) / (3 - 1) = 2.
    """
    return Dataset(y=np.array([0.0, 0.0, 3.0]), d_var=np.ones(3),
                   X=np.ones((3, 1)))


def make_data(m: int = 40, seed: int = 5, outliers: int = 0) -> Dataset:
    """Mixed-variance dataset from the model, optional inflated effects
    on the first few areas."""
    rng = np.random.default_rng(seed)
    X = np.column_stack([np.ones(m), rng.normal(10.0, 1.4, m)])
    d = np.repeat([0.5, 1.0, 1.5, 2.0], m // 4) if m % 4 == 0 else rng.uniform(0.5, 2.0, m)
    v = rng.normal(0.0, 1.0, m)
    if outliers:
        v[:outliers] = rng.normal(0.0, 5.0, outliers)
    y = X @ np.array([20.0, 1.0]) + v + rng.standard_normal(m) * np.sqrt(d)
    return Dataset(y=y, d_var=d, X=X)


@pytest.fixture
def small_data() -> Dataset:
    return make_data(m=40, seed=5)


@pytest.fixture
def outlier_data() -> Dataset:
    return make_data(m=40, seed=11, outliers=4)
