import numpy as np
import pytest

from anisotex import FieldSpec, SampledField


@pytest.fixture
def zero_field():
    """A constant (zero) field: the degenerate input for estimator tests."""
    spec = FieldSpec.make(0.6, 0.4, grid_n=64, seed=0)
    return SampledField(values=np.zeros((64, 64)), spec=spec)


@pytest.fixture
def ramp_field():
    """f(x) = x1 on the grid: linear increments along axis 0, none along axis 1."""
    n = 128
    spec = FieldSpec.make(1.0, 0.5, grid_n=n, seed=0)
    i = np.arange(n) / n
    return SampledField(values=np.tile(i[:, None], (1, n)), spec=spec)
