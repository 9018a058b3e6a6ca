"""Tests for the random variable models: densities, sampling and sums of iid copies."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from gls_bounds.data_models import RandomVariableModel, SumModel
from gls_bounds.exceptions import DomainError, UnsupportedKindError
from gls_bounds.models import rv_models
from gls_bounds.models.constants import SAMPLE_BLOCK_SIZE, Normalization


def test_density_examples():
    """Tests the densities at a few known points."""
    example_a = RandomVariableModel.example_a()
    assert rv_models.density(example_a, 0.0) == 0.0
    assert rv_models.density(example_a, 1.0) == pytest.approx(0.5 * math.exp(-0.5), rel=1e-12)
    assert rv_models.density(RandomVariableModel.gaussian(), 0.0) == pytest.approx(
        1 / math.sqrt(2 * math.pi), rel=1e-12
    )


@pytest.mark.parametrize(
    "model",
    [
        RandomVariableModel.example_a(),
        RandomVariableModel.gaussian(2.0),
        RandomVariableModel.weibull_sym(1.5, 0.7),
        RandomVariableModel.weibull_sym(1.0),
    ],
)
def test_density_is_centered_probability(model):
    """Tests every analytic density integrates to 1 and has mean 0."""
    mass = sum(
        integrate.quad(lambda x: rv_models.density(model, x), lower, upper)[0]
        for lower, upper in ((-math.inf, 0.0), (0.0, math.inf))
    )
    mean = sum(
        integrate.quad(lambda x: x * rv_models.density(model, x), lower, upper)[0]
        for lower, upper in ((-math.inf, 0.0), (0.0, math.inf))
    )
    assert mass == pytest.approx(1.0, abs=1e-8)
    assert mean == pytest.approx(0.0, abs=1e-9)


def test_weibull_with_shape_two_is_example_a():
    """Tests WeibullSym(2, sqrt 2) has the density of the exampleA model."""
    weibull = RandomVariableModel.weibull_sym(2.0, math.sqrt(2.0))
    example_a = RandomVariableModel.example_a()
    for x in (-3.0, -0.5, 0.1, 1.0, 2.5):
        assert rv_models.density(weibull, x) == pytest.approx(
            rv_models.density(example_a, x), rel=1e-12
        )


def test_discrete_models_have_no_density():
    """Tests density refuses laws without one."""
    with pytest.raises(UnsupportedKindError):
        rv_models.density(RandomVariableModel.rademacher(), 1.0)


def test_sample_is_reproducible():
    """Tests the same seed gives the same draws and another seed other draws."""
    model = RandomVariableModel.example_a()
    first = rv_models.sample(model, 1000, seed=7)
    second = rv_models.sample(model, 1000, seed=7)
    other = rv_models.sample(model, 1000, seed=8)

    np.testing.assert_array_equal(first.values, second.values)
    assert not np.array_equal(first.values, other.values)
    assert first.count == 1000


def test_sample_does_not_depend_on_workers():
    """Tests draws spread over several blocks are identical for any worker count."""
    model = RandomVariableModel.weibull_sym(1.3)
    count = 3 * SAMPLE_BLOCK_SIZE + 17
    single = rv_models.sample(model, count, seed=11, workers=1)
    threaded = rv_models.sample(model, count, seed=11, workers=4)
    np.testing.assert_array_equal(single.values, threaded.values)

    sum_model = SumModel(RandomVariableModel.rademacher(), 3)
    np.testing.assert_array_equal(
        rv_models.sample_sum(sum_model, count, seed=3, workers=1).values,
        rv_models.sample_sum(sum_model, count, seed=3, workers=3).values,
    )


@pytest.mark.parametrize(("count", "seed"), [(0, 1), (10, -1), (10, 2**64)])
def test_sample_rejects_bad_requests(count, seed):
    """Tests counts below 1 and seeds outside 64 bits are refused."""
    with pytest.raises(ValueError, match="Sample count|Seeds"):
        rv_models.sample(RandomVariableModel.gaussian(), count, seed)


def test_example_a_second_moment():
    """Tests the empirical second moment of the exampleA model is close to 2."""
    values = rv_models.sample(RandomVariableModel.example_a(), 10**6, seed=1).values
    squares = values**2
    sigma = np.std(squares) / math.sqrt(values.size)
    assert abs(np.mean(squares) - 2.0) < 3 * sigma


def test_rademacher_sample_is_centered():
    """Tests a FiniteDiscrete Rademacher sample has mean close to 0."""
    model = RandomVariableModel.finite_discrete([(-1.0, 0.5), (1.0, 0.5)])
    values = rv_models.sample(model, 10**5, seed=2).values
    assert abs(np.mean(values)) < 3 * 10**-2.5
    assert set(np.unique(values)) == {-1.0, 1.0}


def test_example_a_sampler_matches_distribution_function():
    """Tests the exampleA sampler against its distribution function."""
    model = RandomVariableModel.example_a()
    values = rv_models.sample(model, 10**5, seed=5).values
    result = stats.kstest(values, np.vectorize(lambda x: rv_models.cdf(model, x)))
    # Critical value of the KS statistic at the 1% level.
    assert result.statistic < 1.63 / math.sqrt(values.size)


def test_normalized_gaussian_sum_has_unit_variance():
    """Tests the n^(-1/2) normalization keeps the variance of a Gaussian sum."""
    sum_model = SumModel(RandomVariableModel.gaussian(), 4, Normalization.INV_SQRT_N)
    values = rv_models.sample_sum(sum_model, 200_000, seed=4).values
    assert np.var(values) == pytest.approx(1.0, abs=0.02)


def test_derive_seed():
    """Tests derived seeds are reproducible, distinct and 64-bit."""
    assert rv_models.derive_seed(1, 0) == rv_models.derive_seed(1, 0)
    seeds = {rv_models.derive_seed(1, index) for index in range(20)}
    assert len(seeds) == 20
    assert all(0 <= seed < 2**64 for seed in seeds)


def test_integer_moments():
    """Tests exact raw moments of the closed-form laws."""
    assert rv_models.integer_moments(RandomVariableModel.example_a(), 4) == pytest.approx(
        [1.0, 0.0, 2.0, 0.0, 8.0]
    )
    assert rv_models.integer_moments(RandomVariableModel.gaussian(2.0), 4) == pytest.approx(
        [1.0, 0.0, 4.0, 0.0, 48.0]
    )
    assert rv_models.integer_moments(RandomVariableModel.weibull_sym(1.0), 4) == pytest.approx(
        [1.0, 0.0, 2.0, 0.0, 24.0]
    )


def test_sum_integer_moments_rademacher():
    """Tests the moments of a sum of four Rademachers."""
    sum_model = SumModel(RandomVariableModel.rademacher(), 4, Normalization.NONE)
    moments = rv_models.sum_integer_moments(sum_model, 4)
    assert moments == pytest.approx([1.0, 0.0, 4.0, 0.0, 40.0])


def test_enumerate_sum():
    """Tests the exact law of the sum of two Rademachers."""
    sum_model = SumModel(RandomVariableModel.rademacher(), 2, Normalization.NONE)
    values, probabilities = rv_models.enumerate_sum(sum_model)
    np.testing.assert_allclose(values, [-2.0, 0.0, 2.0])
    np.testing.assert_allclose(probabilities, [0.25, 0.5, 0.25])


def test_can_enumerate():
    """Tests the enumeration limit of 2^20 joint outcomes."""
    rademacher = RandomVariableModel.rademacher()
    assert rv_models.can_enumerate(SumModel(rademacher, 20))
    assert not rv_models.can_enumerate(SumModel(rademacher, 21))
    assert not rv_models.can_enumerate(SumModel(RandomVariableModel.gaussian(), 2))

    with pytest.raises(DomainError):
        rv_models.enumerate_sum(SumModel(rademacher, 21))


@settings(max_examples=40, deadline=None)
@given(
    magnitude=st.floats(min_value=0.1, max_value=3.0),
    weight=st.floats(min_value=0.1, max_value=1.0),
    n=st.integers(min_value=1, max_value=5),
)
def test_moment_convolution_matches_enumeration(magnitude, weight, n):
    """Tests convolved moments against the enumerated law of a discrete sum."""
    base = RandomVariableModel.finite_discrete(
        [(-magnitude, weight / 2), (magnitude, weight / 2), (0.0, 1.0 - weight)]
    )
    sum_model = SumModel(base, n)
    values, probabilities = rv_models.enumerate_sum(sum_model)
    moments = rv_models.sum_integer_moments(sum_model, 6)
    for k in (2, 4, 6):
        assert moments[k] == pytest.approx(float(np.dot(probabilities, values**k)), rel=1e-9)
