import numpy as np
import pytest

from holderkit.core import SampleFunction


def identity_samples(xs):
    xs = np.asarray(xs, dtype=float)
    return SampleFunction.from_arrays(xs, xs)


@pytest.fixture
def three_point_identity():
    return identity_samples([0.0, 0.5, 1.0])


@pytest.fixture
def dyadic_grid():
    """{0} and 2^-j for j = 0..10, base point first."""
    return np.concatenate([[0.0], 2.0 ** -np.arange(11)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
