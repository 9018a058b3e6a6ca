"""Tests for generating functions, GLS norms, anti-norms and the bounds for sums."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gls_bounds.data_models import GeneratingFunction, MomentProfile, RandomVariableModel
from gls_bounds.exceptions import DomainError, EmptyDomainError, OutOfDomainError
from gls_bounds.models import gls_calculus, moment_engine
from gls_bounds.models.constants import Provenance


@pytest.fixture(name="example_a_profile")
def fixture_example_a_profile():
    """The natural function of the exampleA model on the default p-grid."""
    return moment_engine.natural_function(
        RandomVariableModel.example_a(), gls_calculus.default_p_grid()
    )


def constant_profile(grid, value=1.0):
    """A profile with the same norm at every order, like a Rademacher variable."""
    return MomentProfile(
        grid=tuple(grid), values=tuple(value for _ in grid), provenance=Provenance.ANALYTIC
    )


def test_psi_eval_families():
    """Tests the closed-form generating functions."""
    assert gls_calculus.psi_eval(GeneratingFunction.power(2.0), 4.0) == pytest.approx(2.0)
    assert gls_calculus.psi_eval(GeneratingFunction.blowup(4.0, 1.0), 3.0) == pytest.approx(1.0)
    assert gls_calculus.psi_eval(GeneratingFunction.degenerate(3.0), 2.0) == math.inf
    assert gls_calculus.psi_eval(GeneratingFunction.degenerate(3.0), 3.0) == 1.0


@pytest.mark.parametrize("p", [0.5, 4.0, 5.0])
def test_psi_eval_out_of_domain(p):
    """Tests p outside [1, b) is refused."""
    with pytest.raises(OutOfDomainError):
        gls_calculus.psi_eval(GeneratingFunction.blowup(4.0, 1.0), p)


def test_tabulated_psi():
    """Tests tabulated psi is exact on the grid, monotone in between and infinite past finite runs."""
    gf = GeneratingFunction.tabulated([1.0, 2.0, 4.0, 8.0, 16.0], [1.0, 1.5, 2.0, math.inf, 3.0])
    assert gls_calculus.psi_eval(gf, 2.0) == 1.5
    assert 1.5 < gls_calculus.psi_eval(gf, 3.0) < 2.0
    assert gls_calculus.psi_eval(gf, 6.0) == math.inf
    assert gls_calculus.psi_eval(gf, 12.0) == math.inf
    assert gls_calculus.psi_eval(gf, 20.0) == math.inf


def test_default_p_grid():
    """Tests the default grid reaches 64, or stops short of a finite b."""
    grid = gls_calculus.default_p_grid()
    assert len(grid) == 128
    assert grid[0] == pytest.approx(1.0)
    assert grid[-1] == pytest.approx(64.0)
    assert gls_calculus.default_p_grid(4.0)[-1] == pytest.approx(4.0 - 4e-3)


def test_natural_psi_norms_are_one(example_a_profile):
    """Tests a variable has GLS norm and anti-norm 1 in the space of its natural function."""
    natural = GeneratingFunction.natural(example_a_profile)
    assert gls_calculus.gls_norm(example_a_profile, natural) == pytest.approx(1.0, abs=1e-6)
    assert gls_calculus.anti_norm(example_a_profile, natural).value == pytest.approx(1.0, abs=1e-6)


def test_degenerate_psi_recovers_lebesgue_norm():
    """Tests a degenerate psi at r gives |X|_r."""
    profile = moment_engine.natural_function(RandomVariableModel.example_a(), [1.0, 2.0, 3.0, 4.0])
    degenerate = GeneratingFunction.degenerate(2.0)
    assert gls_calculus.gls_norm(profile, degenerate) == pytest.approx(math.sqrt(2.0))
    assert gls_calculus.anti_norm(profile, degenerate).value == pytest.approx(math.sqrt(2.0))


def test_degenerate_psi_outside_profile():
    """Tests an uncovered degenerate order leaves nothing to take the sup over."""
    profile = constant_profile([1.0, 2.0])
    with pytest.raises(EmptyDomainError):
        gls_calculus.gls_norm(profile, GeneratingFunction.degenerate(3.0))


def test_anti_norm_of_constant_ratio():
    """Tests a profile equal to twice psi has anti-norm 2."""
    psi = GeneratingFunction.power(2.0)
    grid = gls_calculus.default_p_grid()
    profile = MomentProfile(
        grid=tuple(grid),
        values=tuple(2 * math.sqrt(p) for p in grid),
        provenance=Provenance.ANALYTIC,
    )
    assert gls_calculus.anti_norm(profile, psi).value == pytest.approx(2.0, rel=1e-9)
    assert gls_calculus.gls_norm(profile, psi) == pytest.approx(2.0, rel=1e-9)


def test_anti_norm_of_rademacher_on_a_range():
    """Tests the infimum sits at the right end of a closed range."""
    profile = constant_profile(gls_calculus.default_p_grid())
    result = gls_calculus.anti_norm(profile, GeneratingFunction.power(2.0), (2.0, 10.0))
    assert result.value == pytest.approx(10 ** -0.5, rel=1e-12)
    assert result.argmin_p == pytest.approx(10.0)


def test_anti_norm_range_defaults():
    """Tests the default range starts at 2 and widen starts it at 1."""
    profile = constant_profile(gls_calculus.default_p_grid())
    psi = GeneratingFunction.blowup(4.0, 1.0)
    # 1 / psi(p) = 4 - p decreases on [1, 4).
    assert gls_calculus.anti_norm(profile, psi).argmin_p > 3.9
    assert gls_calculus.gls_norm(profile, psi) == pytest.approx(3.0)

    growing = GeneratingFunction.power(0.5)
    assert gls_calculus.anti_norm(profile, growing, (2.0, 2.0)).value == pytest.approx(0.25)

    # psi falls from 2 to 1 on [1, 2] and stays 1 up to 64.
    falling = GeneratingFunction.tabulated([1.0, 2.0, 64.0], [2.0, 1.0, 1.0])
    assert gls_calculus.anti_norm(profile, falling).value == pytest.approx(1.0)
    widened = gls_calculus.anti_norm(profile, falling, widen=True)
    assert widened.value == pytest.approx(0.5)
    assert widened.argmin_p == 1.0


def test_anti_norm_rejects_empty_range():
    """Tests an empty p-range is refused."""
    profile = constant_profile([1.0, 2.0, 4.0])
    with pytest.raises(EmptyDomainError):
        gls_calculus.anti_norm(profile, GeneratingFunction.power(2.0), (3.0, 2.0))


@pytest.mark.parametrize("factor", [-2.0, 0.5, 3.0])
def test_anti_norm_is_homogeneous(example_a_profile, factor):
    """Tests V(cX) = |c| V(X)."""
    psi = GeneratingFunction.power(2.0)
    base = gls_calculus.anti_norm(example_a_profile, psi).value
    scaled = gls_calculus.anti_norm(example_a_profile.scaled(factor), psi).value
    assert scaled == pytest.approx(abs(factor) * base, rel=1e-9)


def test_anti_norm_at_most_gls_norm(example_a_profile):
    """Tests the inf of the ratio never exceeds its sup."""
    for psi in (
        GeneratingFunction.power(2.0),
        GeneratingFunction.power(1.0),
        GeneratingFunction.blowup(30.0, 0.5),
    ):
        anti = gls_calculus.anti_norm(example_a_profile, psi, widen=True).value
        assert anti <= gls_calculus.gls_norm(example_a_profile, psi)


def test_anti_norm_vanishes_only_for_zero():
    """Tests V(X) > 0 for a nonzero discrete X against a bounded psi."""
    model = RandomVariableModel.finite_discrete([(-1.0, 0.1), (0.0, 0.8), (1.0, 0.1)])
    profile = moment_engine.natural_function(model, gls_calculus.default_p_grid())
    bounded = GeneratingFunction.blowup(80.0, 0.0)
    assert gls_calculus.anti_norm(profile, bounded).value > 0


def test_ratio_curve(example_a_profile):
    """Tests the ratio curve of a natural psi is constant 1."""
    rows = gls_calculus.ratio_curve(example_a_profile, GeneratingFunction.natural(example_a_profile))
    assert len(rows) == len(example_a_profile.grid)
    assert all(ratio == pytest.approx(1.0) for _, _, _, ratio in rows)


def test_theta_closed():
    """Tests the closed form of theta."""
    assert gls_calculus.theta_closed(2.0, 4.0) == pytest.approx(2 ** -0.25)
    assert gls_calculus.theta_closed(3.0, 3.0) == 1.0
    assert gls_calculus.theta_closed(4.0, 2.0) == 1.0


def test_theta_numeric_examples():
    """Tests the numerical infimum on a few pairs."""
    assert gls_calculus.theta_numeric(2.0, 4.0) == pytest.approx(2 ** -0.25, abs=1e-8)
    assert gls_calculus.theta_numeric(3.0, 3.0) == pytest.approx(1.0, abs=1e-12)
    assert gls_calculus.theta_numeric(1.0, 2.0) == pytest.approx(2 ** -0.5, abs=1e-8)


def test_theta_numeric_matches_closed_form_on_grid():
    """Tests theta_numeric against theta_closed on p, q in {1, 1.5, ..., 10}."""
    exponents = [1.0 + 0.5 * index for index in range(19)]
    for p in exponents:
        for q in exponents:
            assert gls_calculus.theta_numeric(p, q) == pytest.approx(
                gls_calculus.theta_closed(p, q), abs=1e-8
            ), (p, q)


def test_theta_rejects_small_exponents():
    """Tests exponents start at 1."""
    with pytest.raises(ValueError, match="start at 1"):
        gls_calculus.theta_closed(0.5, 2.0)


def test_kappa():
    """Tests both branches of kappa."""
    assert gls_calculus.kappa(math.inf, 2.0) == pytest.approx(2 ** -0.5)
    assert gls_calculus.kappa(4.0, 2.0) == pytest.approx(2 ** -0.25)
    assert gls_calculus.kappa(2.0, 3.0) == 1.0


def test_sum_anti_norm_lower():
    """Tests the anti-norm bound for sums."""
    assert gls_calculus.sum_anti_norm_lower([1.0, 1.0], math.inf, 2.0) == pytest.approx(1.0)
    assert gls_calculus.sum_anti_norm_lower([1.0] * 4, math.inf, 2.0) == pytest.approx(
        math.sqrt(2.0)
    )
    assert gls_calculus.sum_anti_norm_lower([0.7], 4.0, 3.0) == pytest.approx(
        gls_calculus.kappa(4.0, 3.0) * 0.7
    )
    assert gls_calculus.sum_anti_norm_lower([0.5, 2.0], math.inf, math.inf) == 2.0
    with pytest.raises(ValueError, match="non-negative"):
        gls_calculus.sum_anti_norm_lower([-1.0], math.inf, 2.0)


def test_p_two_corollary():
    """Tests the p = 2 form 2^(-1/2) sqrt(sum V^2) for b = inf."""
    v = [0.3, 1.2, 0.8]
    corollary = 2 ** -0.5 * math.sqrt(sum(value * value for value in v))
    assert gls_calculus.sum_anti_norm_lower(v, math.inf, 2.0) == pytest.approx(corollary, rel=1e-15)


def test_best_sum_anti_norm_lower():
    """Tests the best exponent for equal summands is the largest p for b = inf."""
    bound, p = gls_calculus.best_sum_anti_norm_lower([1.0, 1.0], math.inf)
    assert bound >= gls_calculus.sum_anti_norm_lower([1.0, 1.0], math.inf, 2.0)
    assert p >= 2.0


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=1, max_size=8),
    st.integers(min_value=0, max_value=7),
    st.floats(min_value=0.0, max_value=1.0),
    st.floats(min_value=1.0, max_value=20.0),
)
def test_sum_bound_is_monotone_in_summands(v, index, shrink, p):
    """Tests decreasing one summand's anti-norm never raises the bound."""
    index %= len(v)
    smaller = list(v)
    smaller[index] *= shrink
    assert gls_calculus.sum_anti_norm_lower(smaller, math.inf, p) <= (
        gls_calculus.sum_anti_norm_lower(v, math.inf, p) * (1 + 1e-12)
    )


def test_naor_rhs():
    """Tests the moment lower bound for sums."""
    assert gls_calculus.naor_rhs(2.0, [1.0, 1.0]) == pytest.approx(math.sqrt(2.0))
    assert gls_calculus.naor_rhs(4.0, [1.0, 1.0]) == pytest.approx(2 ** 0.25)
    assert gls_calculus.naor_rhs(5.0, [0.3]) == pytest.approx(0.3)
    with pytest.raises(DomainError):
        gls_calculus.naor_rhs(1.5, [1.0, 1.0])


def test_naor_rhs_below_two_warns(caplog):
    """Tests q < 2 is evaluated with a warning when explicitly allowed."""
    assert gls_calculus.naor_rhs(1.0, [1.0, 2.0], allow_below_two=True) == pytest.approx(3.0)
    assert "q in [2, inf]" in caplog.text


def test_power_level_lower():
    """Tests n^(1/q - 1/2) |X_1|_q."""
    assert gls_calculus.power_level_lower(2.0, 9, 1.0) == pytest.approx(1.0)
    assert gls_calculus.power_level_lower(4.0, 4, 1.0) == pytest.approx(4 ** -0.25)
    assert gls_calculus.power_level_lower(3.0, 1, 0.8) == pytest.approx(0.8)
    with pytest.raises(DomainError):
        gls_calculus.power_level_lower(1.0, 4, 1.0)
