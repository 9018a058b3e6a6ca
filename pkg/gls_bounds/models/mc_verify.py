"""Monte Carlo and exact-enumeration checks of the moment and tail inequalities.

Every check produces a VerificationReport. Exact paths (closed forms, enumeration of discrete
sums, exact integer moments) report sigma = 0; Monte Carlo paths report the standard error of
the estimated side. Each instance draws from its own seed derived from the run seed, so a
report does not depend on which other instances ran."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from gls_bounds.data_models import (
    AnyModel,
    GeneratingFunction,
    MomentProfile,
    PhiFunction,
    RandomVariableModel,
    SumModel,
    TailEnvelope,
    TailEstimate,
    VerificationReport,
)
from gls_bounds.exceptions import DomainError
from gls_bounds.models import gls_calculus, moment_engine, rv_models, tail_engine
from gls_bounds.models.constants import (
    DEFAULT_MC_COUNT,
    DEFAULT_SEED,
    DEFAULT_TAIL_COUNT,
    EXACT_TOLERANCE,
    MAX_ENUMERATED_OUTCOMES,
    Z_SCORE,
    InequalityId,
    Normalization,
    TailFamily,
    Verdict,
)

logger = logging.getLogger(__name__)

SUM_P_RANGE = (2.0, 16.0)
SUM_GRID_POINTS = 32
CHERNOFF_U_GRID = (1.0, 2.0, 3.0)
ENVELOPE_U_GRID = (1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5)


@dataclass(frozen=True)
class NormEstimate:
    """An Lp norm with its standard error, 0 for exact values."""

    value: float
    sigma: float = 0.0
    count: int = 0


def classify(lhs: float, rhs: float, sigma: float) -> Verdict:
    """Verdict for lhs >= rhs given the combined standard error of the margin.

    Args:
        lhs: Estimated left-hand side.
        rhs: Estimated right-hand side.
        sigma: Combined standard error, 0 for exact sides.

    Returns:
        VIOLATED below -Z_SCORE sigma, HOLDS above +Z_SCORE sigma, HOLDS_WITHIN_NOISE between.
        For exact sides the band is EXACT_TOLERANCE relative to the larger side.
    """
    threshold = max(Z_SCORE * sigma, EXACT_TOLERANCE * max(1.0, abs(lhs), abs(rhs)))
    margin = lhs - rhs
    if margin < -threshold:
        return Verdict.VIOLATED
    if margin >= threshold:
        return Verdict.HOLDS
    return Verdict.HOLDS_WITHIN_NOISE


def make_report(
    inequality: InequalityId,
    instance: str,
    lhs: float,
    rhs: float,
    sigma: float,
    seed: int,
    count: int,
    note: str = "",
) -> VerificationReport:
    """Classifies a comparison, logs it and wraps it into a VerificationReport."""
    verdict = classify(lhs, rhs, sigma)
    log = logger.warning if verdict == Verdict.VIOLATED and not inequality.exempt else logger.info
    log("%s [%s]: lhs=%.6g rhs=%.6g -> %s", inequality.label, instance, lhs, rhs, verdict.value)
    return VerificationReport(
        inequality=inequality,
        instance=instance,
        lhs=lhs,
        rhs=rhs,
        sigma=sigma,
        verdict=verdict,
        seed=seed,
        count=count,
        note=note,
    )


def sample_norm(values: np.ndarray, q: float) -> NormEstimate:
    """Plug-in |Z|_q with its delta-method standard error."""
    moment_engine.check_empirical_order(q, values.size)
    powers = np.abs(values) ** q
    mean = float(np.mean(powers))
    if mean == 0:
        return NormEstimate(0.0, 0.0, values.size)
    moment_error = float(np.std(powers, ddof=1)) / math.sqrt(values.size)
    value = mean ** (1 / q)
    return NormEstimate(value, value * moment_error / (q * mean), values.size)


def exact_norm(model: AnyModel, q: float) -> NormEstimate:
    """|Z|_q of a model, or of a sum that can be evaluated without sampling."""
    return NormEstimate(moment_engine.lp_norm(model, q))


def sum_norm(
    sum_model: SumModel, q: float, count: int, seed: int, workers: int
) -> NormEstimate:
    """|S|_q exactly when possible, by Monte Carlo otherwise."""
    if moment_engine.sum_is_exact(sum_model, [q]):
        return exact_norm(sum_model, q)
    draws = rv_models.sample_sum(sum_model, count, seed, workers)
    return sample_norm(draws.values, q)


def pair_law(
    x_model: RandomVariableModel, y_model: RandomVariableModel
) -> tuple[np.ndarray, np.ndarray] | None:
    """Exact law of X + Y for independent discrete X and Y, None when not enumerable."""
    x_atoms, y_atoms = x_model.support_atoms, y_model.support_atoms
    if x_atoms is None or y_atoms is None or len(x_atoms) * len(y_atoms) > MAX_ENUMERATED_OUTCOMES:
        return None
    values = np.add.outer([v for v, _ in x_atoms], [v for v, _ in y_atoms]).ravel()
    probabilities = np.multiply.outer([p for _, p in x_atoms], [p for _, p in y_atoms]).ravel()
    support, inverse = np.unique(values, return_inverse=True)
    return support, np.bincount(inverse, weights=probabilities)


def pair_samples(
    x_model: RandomVariableModel,
    y_model: RandomVariableModel,
    count: int,
    seed: int,
    workers: int,
) -> np.ndarray:
    """Draws of X + Y for independent X and Y from two derived streams."""
    x_values = rv_models.sample(x_model, count, rv_models.derive_seed(seed, 0), workers).values
    y_values = rv_models.sample(y_model, count, rv_models.derive_seed(seed, 1), workers).values
    return x_values + y_values


def verify_naor_pair(
    x_model: RandomVariableModel,
    y_model: RandomVariableModel,
    q: float,
    count: int = DEFAULT_MC_COUNT,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> VerificationReport:
    """Checks |X + Y|_q >= (|X|_q^q + |Y|_q^q)^(1/q) for independent centered X and Y.

    Args:
        x_model: X.
        y_model: Y.
        q: Exponent in [2, inf).
        count: Draws when the left side needs Monte Carlo.
        seed: Run seed of the instance.
        workers: Sampling threads.

    Returns:
        The report.
    """
    gls_calculus.check_naor_exponent(q, allow_below_two=False)
    instance = f"{x_model.label}+{y_model.label},q={q:g}"
    rhs = gls_calculus.naor_rhs(q, [exact_norm(x_model, q).value, exact_norm(y_model, q).value])

    law = pair_law(x_model, y_model)
    if law is not None:
        support, probabilities = law
        lhs = float(np.dot(probabilities, np.abs(support) ** q)) ** (1 / q)
        return make_report(InequalityId.NAOR_PAIR, instance, lhs, rhs, 0.0, seed, 0, "exact")

    estimate = sample_norm(pair_samples(x_model, y_model, count, seed, workers), q)
    return make_report(
        InequalityId.NAOR_PAIR, instance, estimate.value, rhs, estimate.sigma, seed, count
    )


def verify_naor_n(
    x_model: RandomVariableModel,
    n: int,
    q: float,
    count: int = DEFAULT_MC_COUNT,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> tuple[VerificationReport, VerificationReport]:
    """Checks the n-summand inequality |sum X_i|_q >= (n |X_1|_q^q)^(1/q) and its power-level form.

    Args:
        x_model: The law of the iid summands.
        n: Number of summands, at least 2.
        q: Exponent in [2, inf).
        count: Draws when the sum needs Monte Carlo.
        seed: Run seed of the instance.
        workers: Sampling threads.

    Returns:
        The sum report and the power-level report, from the same estimate of |S|_q.
    """
    gls_calculus.check_naor_exponent(q, allow_below_two=False)
    if n < 2:
        msg = f"The n-summand check needs n >= 2, got {n}."
        raise DomainError(msg)

    sum_model = SumModel(x_model, n, Normalization.NONE)
    estimate = sum_norm(sum_model, q, count, seed, workers)
    single = exact_norm(x_model, q).value
    note = "exact" if estimate.count == 0 else ""

    sum_report = make_report(
        InequalityId.NAOR_N,
        f"{x_model.label},n={n},q={q:g}",
        estimate.value,
        gls_calculus.naor_rhs(q, [single] * n),
        estimate.sigma,
        seed,
        estimate.count,
        note,
    )
    power_report = power_level_report(x_model, n, q, estimate, single, seed, note)
    return sum_report, power_report


def power_level_report(
    x_model: RandomVariableModel,
    n: int,
    q: float,
    estimate: NormEstimate,
    single: float,
    seed: int,
    note: str,
) -> VerificationReport:
    """Power-level report from an estimate of the unnormalized |S|_q."""
    root = math.sqrt(n)
    return make_report(
        InequalityId.POWER_LEVEL,
        f"{x_model.label},n={n},q={q:g}",
        estimate.value / root,
        gls_calculus.power_level_lower(q, n, single),
        estimate.sigma / root,
        seed,
        estimate.count,
        note,
    )


def verify_power_level(
    x_model: RandomVariableModel,
    n: int,
    q: float,
    count: int = DEFAULT_MC_COUNT,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> VerificationReport:
    """Checks |n^(-1/2) sum X_i|_q >= n^(1/q - 1/2) |X_1|_q on its own.

    Args:
        x_model: The law of the iid summands.
        n: Number of summands, at least 1.
        q: Exponent in [2, inf).
        count: Draws when the sum needs Monte Carlo.
        seed: Run seed of the instance.
        workers: Sampling threads.

    Returns:
        The report.
    """
    gls_calculus.check_naor_exponent(q, allow_below_two=False)
    estimate = sum_norm(SumModel(x_model, n, Normalization.NONE), q, count, seed, workers)
    note = "exact" if estimate.count == 0 else ""
    return power_level_report(x_model, n, q, estimate, exact_norm(x_model, q).value, seed, note)


def sum_p_grid(p_range: tuple[float, float]) -> list[float]:
    """Geometric grid of moment orders over a closed p-range."""
    lower, upper = p_range
    if upper <= lower:
        return [lower]
    return [float(p) for p in np.geomspace(lower, upper, SUM_GRID_POINTS)]


def sum_profile(
    sum_model: SumModel, grid: list[float], count: int, seed: int, workers: int
) -> MomentProfile:
    """Moment profile of a sum: exact when available, empirical from one sample otherwise."""
    return moment_engine.natural_function(sum_model, grid, count=count, seed=seed, workers=workers)


def anti_norm_sigma(profile: MomentProfile, psi: GeneratingFunction, p: float) -> float:
    """Standard error of an anti-norm read off an empirical profile at its argmin."""
    halfwidth = profile.halfwidth_at(p)
    if halfwidth == 0:
        return 0.0
    return halfwidth / Z_SCORE / gls_calculus.psi_eval(psi, p)


def verify_sum_lower_bound(
    x_model: RandomVariableModel,
    psi: GeneratingFunction,
    n: int,
    p: float,
    count: int = DEFAULT_MC_COUNT,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    p_range: tuple[float, float] = SUM_P_RANGE,
) -> VerificationReport:
    """Checks V(sum X_i) >= min(1, 2^(1/b - 1/p)) (sum V(X_i)^p)^(1/p) for iid summands.

    Both anti-norms are taken over the closed p-range.

    Args:
        x_model: The law of the iid summands.
        psi: The generating function.
        n: Number of summands.
        p: Exponent of the bound, in [1, inf].
        count: Draws when the sum needs Monte Carlo.
        seed: Run seed of the instance.
        workers: Sampling threads.
        p_range: Closed range of moment orders for the anti-norms.

    Returns:
        The report.
    """
    grid = sum_p_grid(p_range)
    single = gls_calculus.anti_norm(
        moment_engine.natural_function(x_model, grid, workers=workers), psi, p_range
    )
    rhs = gls_calculus.sum_anti_norm_lower([single.value] * n, psi.b, p)

    profile = sum_profile(SumModel(x_model, n, Normalization.NONE), grid, count, seed, workers)
    result = gls_calculus.anti_norm(profile, psi, p_range)
    sigma = anti_norm_sigma(profile, psi, result.argmin_p)
    sigma += anti_norm_sigma(single.profile_used, psi, single.argmin_p) * math.sqrt(n)

    exact = not profile.ci_halfwidths
    return make_report(
        InequalityId.SUM_LOWER_BOUND,
        f"{x_model.label},psi={psi.family.value},n={n},p={p:g}",
        result.value,
        rhs,
        sigma,
        seed,
        0 if exact else count,
        "exact" if exact else f"argmin p={result.argmin_p:.4g}",
    )


verify_theorem21 = verify_sum_lower_bound


def is_zero(model: RandomVariableModel) -> bool:
    """True for the law concentrated at 0."""
    atoms = model.support_atoms
    return atoms is not None and all(value == 0 or prob == 0 for value, prob in atoms)


def model_anti_norm(
    model: RandomVariableModel,
    psi: GeneratingFunction,
    grid: list[float],
    p_range: tuple[float, float],
    workers: int,
) -> tuple[float, float]:
    """V(X) and its standard error, 0 for the zero variable."""
    if is_zero(model):
        return 0.0, 0.0
    profile = moment_engine.natural_function(model, grid, workers=workers)
    result = gls_calculus.anti_norm(profile, psi, p_range)
    return result.value, anti_norm_sigma(profile, psi, result.argmin_p)


def verify_anti_triangle(
    x_model: RandomVariableModel,
    y_model: RandomVariableModel,
    psi: GeneratingFunction,
    count: int = DEFAULT_MC_COUNT,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    p_range: tuple[float, float] = SUM_P_RANGE,
) -> VerificationReport:
    """Measures V(X + Y) - V(X) - V(Y) for independent X and Y.

    The inequality V(X + Y) >= V(X) + V(Y) does not hold in general; violations are reported only.

    Args:
        x_model: X.
        y_model: Y.
        psi: The generating function.
        count: Draws when X + Y needs Monte Carlo.
        seed: Run seed of the instance.
        workers: Sampling threads.
        p_range: Closed range of moment orders for the anti-norms.

    Returns:
        The report, under an exempt inequality id.
    """
    grid = sum_p_grid(p_range)
    x_value, x_sigma = model_anti_norm(x_model, psi, grid, p_range, workers)
    y_value, y_sigma = model_anti_norm(y_model, psi, grid, p_range, workers)
    rhs = x_value + y_value
    instance = f"{x_model.label}+{y_model.label},psi={psi.family.value}"

    if is_zero(x_model) or is_zero(y_model):
        lhs = rhs
        return make_report(
            InequalityId.ANTI_TRIANGLE, instance, lhs, rhs, x_sigma + y_sigma, seed, 0, "zero summand"
        )

    law = pair_law(x_model, y_model)
    if law is not None:
        support, probabilities = law
        pair_model = RandomVariableModel.finite_discrete(
            list(zip(support.tolist(), probabilities.tolist())), label=instance
        )
        lhs, lhs_sigma = model_anti_norm(pair_model, psi, grid, p_range, workers)
        used = 0
    elif x_model == y_model and x_model.kind.is_analytic:
        profile = sum_profile(SumModel(x_model, 2, Normalization.NONE), grid, count, seed, workers)
        result = gls_calculus.anti_norm(profile, psi, p_range)
        lhs, lhs_sigma = result.value, anti_norm_sigma(profile, psi, result.argmin_p)
        used = count if profile.ci_halfwidths else 0
    else:
        values = pair_samples(x_model, y_model, count, seed, workers)
        profile = moment_engine.empirical_profile(values, grid, label=instance)
        result = gls_calculus.anti_norm(profile, psi, p_range)
        lhs, lhs_sigma = result.value, anti_norm_sigma(profile, psi, result.argmin_p)
        used = count

    return make_report(
        InequalityId.ANTI_TRIANGLE,
        instance,
        lhs,
        rhs,
        lhs_sigma + x_sigma + y_sigma,
        seed,
        used,
        "exact" if used == 0 else "",
    )


def wilson_interval(hits: np.ndarray, count: int, z: float = Z_SCORE) -> tuple[np.ndarray, np.ndarray]:
    """Wilson score intervals for binomial proportions.

    Args:
        hits: Number of successes per proportion.
        count: Number of trials.
        z: Normal quantile of the interval.

    Returns:
        Lower and upper ends, clipped to [0, 1].
    """
    proportion = hits / count
    denominator = 1 + z * z / count
    center = (proportion + z * z / (2 * count)) / denominator
    spread = (z / denominator) * np.sqrt(
        proportion * (1 - proportion) / count + z * z / (4 * count * count)
    )
    return np.clip(center - spread, 0.0, 1.0), np.clip(center + spread, 0.0, 1.0)


def empirical_tail(
    model: AnyModel,
    u_grid: list[float],
    count: int = DEFAULT_TAIL_COUNT,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> TailEstimate:
    """Frequencies of {Z > u} over a u-grid with Wilson intervals at Z_SCORE.

    Args:
        model: A model or a sum.
        u_grid: Levels.
        count: Draws.
        seed: Sampling seed.
        workers: Sampling threads.

    Returns:
        The TailEstimate.
    """
    if isinstance(model, SumModel):
        draws = rv_models.sample_sum(model, count, seed, workers)
    else:
        draws = rv_models.sample(model, count, seed, workers)

    ordered = np.sort(draws.values)
    hits = count - np.searchsorted(ordered, np.asarray(u_grid, dtype=float), side="right")
    lower, upper = wilson_interval(hits.astype(float), count)
    return TailEstimate(
        u_grid=tuple(float(u) for u in u_grid),
        probabilities=tuple(float(h) / count for h in hits),
        ci_lower=tuple(float(v) for v in lower),
        ci_upper=tuple(float(v) for v in upper),
        count=count,
        seed=seed,
    )


def verify_chernoff(
    model: AnyModel,
    u_grid: list[float] | tuple[float, ...] = CHERNOFF_U_GRID,
    count: int = DEFAULT_TAIL_COUNT,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    phi: PhiFunction | None = None,
) -> list[VerificationReport]:
    """Checks exp(-nu(u / tau)) >= P(Z > u) at every level.

    Args:
        model: A model or a sum.
        u_grid: Levels.
        count: Draws for the empirical tail.
        seed: Sampling seed.
        workers: Sampling threads.
        phi: Young-Orlicz function, default the natural function of the model.

    Returns:
        One report per level.
    """
    estimate = empirical_tail(model, u_grid, count, seed, workers)
    reports = []
    for u, frequency, halfwidth in zip(estimate.u_grid, estimate.probabilities, estimate.halfwidths):
        bound = tail_engine.tail_upper_chernoff(model, u, phi)
        reports.append(
            make_report(
                InequalityId.CHERNOFF,
                f"{model.label},u={u:g}",
                bound,
                frequency,
                halfwidth / Z_SCORE,
                seed,
                count,
            )
        )
    return reports


def verify_envelope(
    envelope: TailEnvelope,
    sum_model: SumModel,
    count: int = DEFAULT_TAIL_COUNT,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> VerificationReport:
    """Checks lower(u) <= P(S > u) <= upper(u) on the envelope's u-grid.

    The report carries the tightest slack over all levels and both sides; per-level
    verdicts go into its note.

    Args:
        envelope: The fitted envelope.
        sum_model: The sum it was fitted to.
        count: Draws for the empirical tail.
        seed: Sampling seed.
        workers: Sampling threads.

    Returns:
        The report.
    """
    if min(envelope.u_grid) < 1:
        msg = "Envelopes are checked on levels u >= 1 only."
        raise DomainError(msg)

    estimate = empirical_tail(sum_model, list(envelope.u_grid), count, seed, workers)
    notes, worst = [], None
    for index, u in enumerate(estimate.u_grid):
        frequency = estimate.probabilities[index]
        sigma = estimate.halfwidths[index] / Z_SCORE
        slack = min(envelope.upper[index] - frequency, frequency - envelope.lower[index])
        notes.append(f"u={u:g}:{classify(slack, 0.0, sigma).value}")
        if worst is None or slack + Z_SCORE * sigma < worst[0] + Z_SCORE * worst[1]:
            worst = (slack, sigma)

    gap = envelope.upper[-1] - envelope.lower[-1]
    width = estimate.ci_upper[-1] - estimate.ci_lower[-1]
    if width > gap:
        logger.warning(
            "Insufficient samples for %s: CI width %.3g at u=%g exceeds the envelope gap %.3g",
            sum_model.label,
            width,
            envelope.u_grid[-1],
            gap,
        )
        notes.append("insufficient-samples")

    return make_report(
        InequalityId.ENVELOPE,
        f"{sum_model.label},{envelope.family.value},e={envelope.exponent:g}",
        worst[0],
        0.0,
        worst[1],
        seed,
        count,
        ";".join(notes),
    )


@dataclass(frozen=True)
class SuiteSettings:
    """Sample sizes, seed and parallelism of a verification suite run."""

    count: int = DEFAULT_MC_COUNT
    tail_count: int = DEFAULT_TAIL_COUNT
    seed: int = DEFAULT_SEED
    workers: int = 1


def run_suite(settings: SuiteSettings) -> list[VerificationReport]:
    """Runs the shipped instance suite.

    Instance i samples with derive_seed(settings.seed, i), so the reports only depend on
    the settings.

    Args:
        settings: Sample sizes, seed and parallelism.

    Returns:
        All reports in a fixed order.
    """
    rademacher = RandomVariableModel.rademacher()
    example_a = RandomVariableModel.example_a()
    gaussian = RandomVariableModel.gaussian(1.0)
    zero = RandomVariableModel.finite_discrete([(0.0, 1.0)], label="zero")
    degenerate = GeneratingFunction.degenerate(2.0)
    natural_a = GeneratingFunction.natural(
        moment_engine.natural_function(example_a, sum_p_grid(SUM_P_RANGE))
    )
    count, tail_count, workers = settings.count, settings.tail_count, settings.workers

    checks = [
        lambda s: [verify_naor_pair(rademacher, rademacher, 2.0, count, s, workers)],
        lambda s: [verify_naor_pair(rademacher, rademacher, 4.0, count, s, workers)],
        lambda s: [verify_naor_pair(example_a, example_a, 3.0, count, s, workers)],
        lambda s: list(verify_naor_n(rademacher, 4, 2.0, count, s, workers)),
        lambda s: list(verify_naor_n(rademacher, 4, 3.0, count, s, workers)),
        lambda s: list(verify_naor_n(rademacher, 4, 4.0, count, s, workers)),
        lambda s: list(verify_naor_n(gaussian, 8, 4.0, count, s, workers)),
        lambda s: [verify_sum_lower_bound(example_a, natural_a, 2, 2.0, count, s, workers)],
        lambda s: [verify_sum_lower_bound(example_a, natural_a, 4, 2.0, count, s, workers)],
        lambda s: [verify_sum_lower_bound(example_a, natural_a, 8, 2.0, count, s, workers)],
        lambda s: [verify_sum_lower_bound(rademacher, degenerate, 4, 2.0, count, s, workers)],
        lambda s: [verify_anti_triangle(rademacher, rademacher, degenerate, count, s, workers)],
        lambda s: [verify_anti_triangle(zero, rademacher, degenerate, count, s, workers)],
        lambda s: [verify_anti_triangle(example_a, example_a, natural_a, count, s, workers)],
        lambda s: verify_chernoff(gaussian, CHERNOFF_U_GRID, tail_count, s, workers),
        *(
            (lambda s, base=base, family=family: [envelope_check(base, family, tail_count, s, workers)])
            for base, family in (
                (example_a, TailFamily.SUBGAUSSIAN),
                (RandomVariableModel.weibull_sym(1.0), TailFamily.WEIBULL),
                (RandomVariableModel.weibull_sym(4.0), TailFamily.WEIBULL),
            )
        ),
    ]

    reports = []
    for index, check in enumerate(checks):
        instance_seed = rv_models.derive_seed(settings.seed, index)
        logger.info("Suite instance %d of %d", index + 1, len(checks))
        reports.extend(check(instance_seed))
    return reports


def envelope_check(
    base: RandomVariableModel, family: TailFamily, count: int, seed: int, workers: int
) -> VerificationReport:
    """Fits an envelope to the normalized sum of 16 copies of base and checks it."""
    sum_model = SumModel(base, 16, Normalization.INV_SQRT_N)
    envelope = tail_engine.fit_envelope(sum_model, family, list(ENVELOPE_U_GRID))
    return verify_envelope(envelope, sum_model, count, seed, workers)
