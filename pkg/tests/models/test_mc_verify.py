"""Tests for the exact and Monte Carlo verification of the inequalities."""

import math

import numpy as np
import pytest

from gls_bounds.data_models import GeneratingFunction, RandomVariableModel, SumModel
from gls_bounds.exceptions import DomainError
from gls_bounds.models import mc_verify, moment_engine, tail_engine
from gls_bounds.models.constants import InequalityId, TailFamily, Verdict


@pytest.mark.parametrize(
    ("lhs", "rhs", "sigma", "verdict"),
    [
        (1.0, 0.5, 0.1, Verdict.HOLDS),
        (1.0, 1.2, 0.1, Verdict.HOLDS_WITHIN_NOISE),
        (1.0, 2.0, 0.1, Verdict.VIOLATED),
        (1.0, 1.0, 0.0, Verdict.HOLDS_WITHIN_NOISE),
        (1.0, 1.0 + 1e-13, 0.0, Verdict.HOLDS_WITHIN_NOISE),
        (1.0, 1.0 + 1e-9, 0.0, Verdict.VIOLATED),
    ],
)
def test_classify(lhs, rhs, sigma, verdict):
    """Tests the three-sigma band and the exact tolerance."""
    assert mc_verify.classify(lhs, rhs, sigma) == verdict


def test_wilson_interval():
    """Tests the Wilson interval at no hits and at half the trials."""
    lower, upper = mc_verify.wilson_interval(np.array([0.0, 50.0]), 100)
    assert lower[0] == pytest.approx(0.0, abs=1e-15)
    assert upper[0] == pytest.approx(9 / 109)
    assert lower[1] < 0.5 < upper[1]
    assert lower[1] + upper[1] == pytest.approx(1.0)


def test_empirical_tail_of_rademacher():
    """Tests strict exceedance frequencies and intervals that contain them."""
    estimate = mc_verify.empirical_tail(
        RandomVariableModel.rademacher(), [-2.0, 0.0, 1.0], count=10_000, seed=3
    )
    assert estimate.probabilities[0] == 1.0
    assert estimate.probabilities[1] == pytest.approx(0.5, abs=0.03)
    assert estimate.probabilities[2] == 0.0
    for low, frequency, high in zip(estimate.ci_lower, estimate.probabilities, estimate.ci_upper):
        assert low <= frequency <= high


def test_naor_pair_is_an_equality_at_two():
    """Tests |X + Y|_2 = (|X|_2^2 + |Y|_2^2)^(1/2) for Rademachers, exactly."""
    rademacher = RandomVariableModel.rademacher()
    report = mc_verify.verify_naor_pair(rademacher, rademacher, 2.0)
    assert report.lhs == pytest.approx(math.sqrt(2.0))
    assert report.sigma == 0.0
    assert report.note == "exact"
    assert report.verdict == Verdict.HOLDS_WITHIN_NOISE


def test_naor_pair_at_four():
    """Tests the exact margin 2^(3/4) - 2^(1/4) for Rademachers at q = 4."""
    rademacher = RandomVariableModel.rademacher()
    report = mc_verify.verify_naor_pair(rademacher, rademacher, 4.0)
    assert report.margin == pytest.approx(2**0.75 - 2**0.25)
    assert report.verdict == Verdict.HOLDS


def test_naor_pair_by_sampling():
    """Tests the sampled check for the exampleA model holds."""
    example_a = RandomVariableModel.example_a()
    report = mc_verify.verify_naor_pair(example_a, example_a, 3.0, count=200_000, seed=5)
    assert report.count == 200_000
    assert report.sigma > 0
    assert report.verdict != Verdict.VIOLATED


def test_naor_n_rademacher():
    """Tests the n-summand and power-level reports for four Rademachers."""
    rademacher = RandomVariableModel.rademacher()
    sum_report, power_report = mc_verify.verify_naor_n(rademacher, 4, 2.0)
    assert sum_report.lhs == pytest.approx(2.0)
    assert sum_report.rhs == pytest.approx(2.0)
    assert sum_report.verdict == Verdict.HOLDS_WITHIN_NOISE
    assert power_report.inequality == InequalityId.POWER_LEVEL
    assert power_report.lhs == pytest.approx(1.0)

    sum_report, _ = mc_verify.verify_naor_n(rademacher, 4, 4.0)
    assert sum_report.lhs == pytest.approx(40**0.25)
    assert sum_report.rhs == pytest.approx(4**0.25)
    assert sum_report.verdict == Verdict.HOLDS


def test_naor_n_rademacher_at_three():
    """Tests |X_1 + ... + X_4|_3 = 12^(1/3) against 4^(1/3) for four Rademachers."""
    sum_report, power_report = mc_verify.verify_naor_n(RandomVariableModel.rademacher(), 4, 3.0)
    assert sum_report.lhs == pytest.approx(12 ** (1 / 3))
    assert sum_report.rhs == pytest.approx(4 ** (1 / 3))
    assert sum_report.note == "exact"
    assert sum_report.verdict == Verdict.HOLDS
    assert power_report.verdict != Verdict.VIOLATED


@pytest.mark.parametrize(("n", "q"), [(1, 2.0), (4, 1.5)])
def test_naor_n_rejects_bad_arguments(n, q):
    """Tests a single summand and exponents below 2 are refused."""
    with pytest.raises(DomainError):
        mc_verify.verify_naor_n(RandomVariableModel.rademacher(), n, q)


def test_power_level_for_discrete_sum():
    """Tests the power-level check on an enumerated sum."""
    report = mc_verify.verify_power_level(RandomVariableModel.rademacher(), 9, 3.0)
    assert report.note == "exact"
    assert report.verdict != Verdict.VIOLATED


def test_sum_lower_bound_for_rademacher_with_degenerate_psi():
    """Tests V(S) = |S|_2 = 2 against 2^(-1/2) sqrt(4) for four Rademachers."""
    report = mc_verify.verify_sum_lower_bound(
        RandomVariableModel.rademacher(), GeneratingFunction.degenerate(2.0), 4, 2.0
    )
    assert report.lhs == pytest.approx(2.0)
    assert report.rhs == pytest.approx(math.sqrt(2.0))
    assert report.note == "exact"
    assert report.verdict == Verdict.HOLDS


@pytest.mark.parametrize("n", [2, 4, 8])
def test_sum_lower_bound_for_example_a_with_natural_psi(n):
    """Tests V(X_1 + ... + X_n) >= 2^(-1/2) sqrt(n) for iid exampleA summands, each with V = 1."""
    example_a = RandomVariableModel.example_a()
    natural = GeneratingFunction.natural(
        moment_engine.natural_function(example_a, mc_verify.sum_p_grid(mc_verify.SUM_P_RANGE))
    )
    report = mc_verify.verify_sum_lower_bound(example_a, natural, n, 2.0, count=1_000_000, seed=5)

    assert report.inequality == InequalityId.SUM_LOWER_BOUND
    assert report.rhs == pytest.approx(math.sqrt(n / 2), rel=1e-6)
    assert report.lhs > report.rhs
    assert report.verdict == Verdict.HOLDS


def test_sum_lower_bound_is_available_under_its_operation_name():
    """Tests verify_theorem21 runs the sum lower-bound check."""
    assert mc_verify.verify_theorem21 is mc_verify.verify_sum_lower_bound


def test_anti_triangle_with_zero_summand():
    """Tests V(0 + Y) = V(0) + V(Y)."""
    zero = RandomVariableModel.finite_discrete([(0.0, 1.0)], label="zero")
    report = mc_verify.verify_anti_triangle(
        zero, RandomVariableModel.rademacher(), GeneratingFunction.degenerate(2.0)
    )
    assert report.lhs == report.rhs == pytest.approx(1.0)
    assert report.note == "zero summand"
    assert report.verdict == Verdict.HOLDS_WITHIN_NOISE


def test_anti_triangle_violation_is_exempt():
    """Tests a violated anti-triangle inequality is reported but does not fail a run."""
    rademacher = RandomVariableModel.rademacher()
    report = mc_verify.verify_anti_triangle(
        rademacher, rademacher, GeneratingFunction.degenerate(2.0)
    )
    assert report.lhs == pytest.approx(math.sqrt(2.0))
    assert report.rhs == pytest.approx(2.0)
    assert report.verdict == Verdict.VIOLATED
    assert not report.fails_run


def test_chernoff_holds_for_gaussian():
    """Tests exp(-u^2 / 2) bounds the Gaussian tail."""
    reports = mc_verify.verify_chernoff(
        RandomVariableModel.gaussian(), count=100_000, seed=9
    )
    assert len(reports) == 3
    assert all(report.verdict == Verdict.HOLDS for report in reports)


@pytest.mark.parametrize(
    ("base", "family"),
    [
        (RandomVariableModel.example_a(), TailFamily.SUBGAUSSIAN),
        (RandomVariableModel.weibull_sym(1.0), TailFamily.WEIBULL),
        (RandomVariableModel.weibull_sym(4.0), TailFamily.WEIBULL),
    ],
)
def test_envelope_brackets_the_sampled_tail(base, family):
    """Tests lower <= sampled tail <= upper, up to the interval, at every level."""
    sum_model = SumModel(base, 16)
    envelope = tail_engine.fit_envelope(sum_model, family, list(mc_verify.ENVELOPE_U_GRID))
    estimate = mc_verify.empirical_tail(sum_model, list(envelope.u_grid), 100_000, 2)

    for index in range(len(envelope.u_grid)):
        assert envelope.lower[index] <= envelope.upper[index]
        assert envelope.lower[index] <= estimate.ci_upper[index]
        assert estimate.ci_lower[index] <= envelope.upper[index]

    report = mc_verify.verify_envelope(envelope, sum_model, count=100_000, seed=2)
    assert report.inequality == InequalityId.ENVELOPE
    assert report.verdict != Verdict.VIOLATED
    assert report.note.count("u=") == len(envelope.u_grid)


@pytest.mark.slow
def test_suite_does_not_depend_on_workers():
    """Tests the suite reports are identical for one and several workers."""
    settings = mc_verify.SuiteSettings(count=2**16, tail_count=20_000, seed=4)
    serial = mc_verify.run_suite(settings)
    threaded = mc_verify.run_suite(
        mc_verify.SuiteSettings(count=2**16, tail_count=20_000, seed=4, workers=3)
    )
    assert serial == threaded
    assert not any(report.fails_run for report in serial)
