import numpy as np
import pytest
from scipy import stats

from renyirobust import Beta, Dirichlet, Normal, SeededStream, sample_beta, sample_dirichlet, sample_gamma, sample_normal
from renyirobust.errors import InvalidParameterError
from renyirobust.samplers import sample_posterior, stable_hash64


def test_same_seed_same_draws():
    a = sample_beta(SeededStream(11, 3), 0.5, 0.5, 1000)
    b = sample_beta(SeededStream(11, 3), 0.5, 0.5, 1000)
    np.testing.assert_array_equal(a, b)


def test_streams_are_distinct():
    a = sample_gamma(SeededStream(11, 0), 2.0, 1000)
    b = sample_gamma(SeededStream(11, 1), 2.0, 1000)
    c = sample_gamma(SeededStream(12, 0), 2.0, 1000)
    assert not np.array_equal(a, b) and not np.array_equal(a, c)


def test_substream_is_stable():
    s = SeededStream(5).substream("posterior", (1.0, 3.0))
    assert s == SeededStream(5).substream("posterior", (1.0, 3.0))
    assert stable_hash64("x", 1) == stable_hash64("x", 1) != stable_hash64("x", 2)


@pytest.mark.parametrize("seed", [-1, 2**64, 1.5])
def test_seed_must_be_u64(seed):
    with pytest.raises(InvalidParameterError):
        SeededStream(seed)


def test_scalar_and_vector_forms():
    assert isinstance(sample_gamma(SeededStream(1), 3.0), float)
    assert isinstance(sample_beta(SeededStream(1), 2.0, 2.0), float)
    assert sample_dirichlet(SeededStream(1), (1, 2, 3)).shape == (3,)
    assert sample_dirichlet(SeededStream(1), (1, 2, 3), 10).shape == (10, 3)
    assert sample_normal(np.random.default_rng(0), 0.0, 1.0, 5).shape == (5,)


@pytest.mark.parametrize("shape", [0.05, 0.25, 1.0, 7.5])
def test_gamma_positive(shape):
    x = sample_gamma(SeededStream(2), shape, 50_000)
    assert np.all(x > 0) and np.all(np.isfinite(x))


@pytest.mark.parametrize("params", [(0.25, 0.25), (0.05, 0.05), (0.1, 3.0), (50.0, 0.2)])
def test_beta_never_hits_boundary(params):
    x = sample_beta(SeededStream(3), *params, 200_000)
    assert np.all((x > 0.0) & (x < 1.0))


def test_dirichlet_rows_on_simplex():
    x = sample_dirichlet(SeededStream(4), (0.25,) * 4, 100_000)
    assert np.all(x > 0)
    np.testing.assert_allclose(x.sum(axis=1), 1.0, atol=1e-12)


@pytest.mark.parametrize("shape", [0.25, 0.5, 3.0])
def test_gamma_distribution_shape(shape):
    x = sample_gamma(SeededStream(9), shape, 100_000)
    assert stats.kstest(x, stats.gamma(shape).cdf).pvalue > 1e-3


def test_beta_distribution_shape():
    x = sample_beta(SeededStream(10), 0.25, 0.25, 100_000)
    assert stats.kstest(x, stats.beta(0.25, 0.25).cdf).pvalue > 1e-3


def test_invalid_parameters():
    with pytest.raises(InvalidParameterError):
        sample_gamma(SeededStream(0), 0.0, 10)
    with pytest.raises(InvalidParameterError):
        sample_beta(SeededStream(0), 1.0, -1.0, 10)
    with pytest.raises(InvalidParameterError):
        sample_normal(SeededStream(0), 0.0, 0.0, 10)


def test_posterior_draws_are_shared_and_read_only():
    stream = SeededStream(21)
    a = sample_posterior(Beta(12, 12), stream, 1000)
    b = sample_posterior(Beta(12, 12), stream, 1000)
    assert a is b
    with pytest.raises(ValueError):
        a[0] = 0.5
    assert sample_posterior(Dirichlet((7, 5, 6, 6)), stream, 10).shape == (10, 4)
    assert sample_posterior(Normal(4.0, 0.05), stream, 10).shape == (10,)
