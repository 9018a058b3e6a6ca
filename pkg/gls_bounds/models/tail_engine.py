"""Tail envelopes for sums of iid centered variables.

Upper curves come from the Chernoff bound P(xi > u) <= exp(-nu(u / tau)), lower curves from
the Paley-Zygmund inequality applied to |S|^p with exact moments of S. Both are then replaced
by the tightest exp(-C u^e) forms that still bound them on the u-grid."""

from __future__ import annotations

import logging
import math

import numpy as np

from gls_bounds.data_models import (
    AnyModel,
    MomentProfile,
    PhiFunction,
    RandomVariableModel,
    SumModel,
    TailEnvelope,
)
from gls_bounds.exceptions import DomainError, FamilyMismatchError
from gls_bounds.models import moment_engine, rv_models
from gls_bounds.models.constants import (
    DEFAULT_U_GRID,
    ENVELOPE_MAX_MOMENT_ORDER,
    EXPONENT_FIT_P_RANGE,
    EXPONENT_FIT_POINTS,
    EXPONENT_FIT_TOLERANCE,
    ModelKind,
    PhiForm,
    Provenance,
    TailFamily,
)

logger = logging.getLogger(__name__)

CONSTANT_NAMES = {
    TailFamily.SUBGAUSSIAN: ("C4", "C3"),
    TailFamily.WEIBULL: ("C10", "C9"),
}


def chernoff_norm(model: AnyModel, phi: PhiFunction) -> float:
    """The B(phi) norm used by the Chernoff bound, through the sum bound for quadratic phi."""
    if isinstance(model, SumModel) and phi.form == PhiForm.QUADRATIC:
        base_norm = moment_engine.bphi_norm(model.base, phi).value
        scaled = base_norm * model.scale_factor
        return moment_engine.subgaussian_sum_norm_upper([scaled] * model.n)
    return moment_engine.bphi_norm(model, phi).value


def tail_upper_chernoff(
    model: AnyModel,
    u: float,
    phi: PhiFunction | None = None,
    norm: float | None = None,
) -> float:
    """Upper bound exp(-nu(u / tau)) on P(xi > u).

    Args:
        model: A model or a sum.
        u: Non-negative level.
        phi: Young-Orlicz function, default the natural function of the model, for which
            tau = 1.
        norm: The B(phi) norm tau when the caller already knows it.

    Returns:
        The bound, in [0, 1].
    """
    if u < 0:
        msg = f"Tail levels are non-negative, got u={u}."
        raise ValueError(msg)
    if u == 0:
        return 1.0

    if phi is None:
        phi = moment_engine.natural_phi(model)
        tau = 1.0
    else:
        tau = chernoff_norm(model, phi) if norm is None else norm

    if tau == 0:
        return 0.0

    conjugate = moment_engine.young_fenchel(phi, u / tau)
    return min(1.0, math.exp(-conjugate))


def paley_zygmund(
    norm_p: float, norm_2p: float, u: float, p: float
) -> float:
    """(1 - t^p)^2 (|S|_p / |S|_2p)^(2p) with t = u / |S|_p, 0 when t >= 1."""
    if norm_p <= 0 or u >= norm_p:
        return 0.0
    t_power = (u / norm_p) ** p
    log_bound = 2 * math.log1p(-t_power) + 2 * p * (math.log(norm_p) - math.log(norm_2p))
    return min(1.0, math.exp(log_bound))


def tail_lower_from_moments(
    profile: MomentProfile,
    u: float,
    p: float | None = None,
    numerator: MomentProfile | None = None,
) -> float:
    """Paley-Zygmund lower bound on P(|S| > u) from the moments of S.

    Args:
        profile: Moment profile of S covering p and 2p.
        u: The level.
        p: Moment order, default the best order of the profile grid.
        numerator: Optional profile of lower bounds for |S|_p, such as V(S) psi(p),
            used in place of |S|_p in the numerator.

    Returns:
        The bound, 0 in the vacuous regime u >= |S|_p.
    """
    if u < 0:
        msg = f"Tail levels are non-negative, got u={u}."
        raise ValueError(msg)

    def bound_at(order: float) -> float:
        lower_norm = profile.value_at(order)
        if numerator is not None and numerator.covers(order):
            lower_norm = min(lower_norm, numerator.value_at(order))
        return paley_zygmund(lower_norm, profile.value_at(2 * order), u, order)

    if p is not None:
        if not (profile.covers(p) and profile.covers(2 * p)):
            msg = f"The profile must cover p={p} and 2p={2 * p}."
            raise DomainError(msg)
        return bound_at(p)

    orders = [order for order in profile.grid if profile.covers(2 * order)]
    return max((bound_at(order) for order in orders), default=0.0)


def exact_even_profile(sum_model: SumModel, max_order: int) -> MomentProfile:
    """Profile of |S|_p at even p up to max_order from exact raw moments of S."""
    moments = rv_models.sum_integer_moments(sum_model, max_order)
    grid, values = [], []
    for order in range(2, max_order + 1, 2):
        moment = moments[order]
        if math.isfinite(moment) and moment > 0:
            grid.append(float(order))
            values.append(moment ** (1 / order))
    return MomentProfile(
        grid=tuple(grid),
        values=tuple(values),
        provenance=Provenance.ANALYTIC,
        label=sum_model.label,
    )


def tail_lower_curve(
    sum_model: SumModel,
    u_grid: list[float],
    max_order: int = ENVELOPE_MAX_MOMENT_ORDER,
    one_sided: bool = True,
) -> list[float]:
    """Best Paley-Zygmund lower bounds on the tail of S over a u-grid.

    Args:
        sum_model: The sum, with a base that has exact integer moments.
        u_grid: Levels.
        max_order: Highest exact moment of S used.
        one_sided: Halve the two-sided bound, which is valid for a symmetric base.

    Returns:
        One bound per level.
    """
    if one_sided and not sum_model.base.is_symmetric:
        msg = f"One-sided lower bounds need a symmetric base, {sum_model.base.label} is not."
        raise DomainError(msg)

    profile = exact_even_profile(sum_model, max_order)
    factor = 0.5 if one_sided else 1.0
    return [factor * tail_lower_from_moments(profile, u) for u in u_grid]


def natural_exponent(model: AnyModel) -> float:
    """Estimates m in P(|X| > u) ~ exp(-C u^m) from the growth |X|_p ~ p^(1/m).

    The slope of log |X|_p against log p is fitted on EXPONENT_FIT_P_RANGE.

    Args:
        model: A model, or a sum whose base is used.

    Returns:
        The estimate, +inf for bounded variables.
    """
    base = model.base if isinstance(model, SumModel) else model
    orders = np.geomspace(*EXPONENT_FIT_P_RANGE, EXPONENT_FIT_POINTS)
    log_norms = [math.log(moment_engine.lp_norm(base, float(p))) for p in orders]
    slope = float(np.polyfit(np.log(orders), log_norms, 1)[0])
    logger.debug("Moment growth slope of %s: %r", base.label, slope)
    if slope <= 1e-9:
        return math.inf
    return 1.0 / slope


def expected_exponent(
    family: TailFamily, base: RandomVariableModel, m: float | None
) -> float:
    """The envelope exponent e = min(m, 2) a family predicts."""
    if family == TailFamily.SUBGAUSSIAN:
        return 2.0
    if m is None:
        if base.kind != ModelKind.WEIBULL_SYM:
            msg = f"The weibull family needs m for a {base.kind.value} base."
            raise DomainError(msg)
        m = base.m
    return min(m, 2.0)


def fit_envelope(
    sum_model: SumModel,
    family: TailFamily,
    u_grid: list[float] | None = None,
    m: float | None = None,
    phi: PhiFunction | None = None,
) -> TailEnvelope:
    """Brackets P(S > u) between exp(-C_lower u^e) and exp(-C_upper u^e) on a u-grid.

    Args:
        sum_model: The sum.
        family: SUBGAUSSIAN predicts e = 2, WEIBULL predicts e = min(m, 2).
        u_grid: Levels, all at least 1. Defaults to DEFAULT_U_GRID.
        m: Tail exponent of the weibull family, default the base's own m.
        phi: Young-Orlicz function of the upper curve, default the natural function.

    Returns:
        The TailEnvelope.
    """
    u_grid = list(DEFAULT_U_GRID if u_grid is None else u_grid)
    if not u_grid or min(u_grid) < 1:
        msg = "Envelopes are fitted on levels u >= 1."
        raise DomainError(msg)
    if any(later <= earlier for earlier, later in zip(u_grid, u_grid[1:])):
        msg = "The u-grid must be strictly increasing."
        raise DomainError(msg)

    exponent = expected_exponent(family, sum_model.base, m)
    if sum_model.base.kind == ModelKind.EMPIRICAL:
        # Plug-in moments of the orders the fit needs are not reliable.
        logger.warning(
            "Skipping the tail exponent check for the empirical model %s", sum_model.base.label
        )
        measured = math.nan
    else:
        measured = min(natural_exponent(sum_model), 2.0)
        if abs(measured - exponent) > EXPONENT_FIT_TOLERANCE:
            msg = (
                f"{sum_model.base.label} has tail exponent {measured:.3f}, "
                f"the {family.value} family expects {exponent:g}."
            )
            raise FamilyMismatchError(msg)

    logger.info(
        "Fitting a %s envelope with exponent %g to %s", family.value, exponent, sum_model.label
    )
    raw_upper = [tail_upper_chernoff(sum_model, u, phi) for u in u_grid]
    raw_lower = tail_lower_curve(sum_model, u_grid)

    c_upper = min(
        -math.log(value) / u**exponent if value > 0 else math.inf
        for value, u in zip(raw_upper, u_grid)
    )
    c_lower = max(
        -math.log(value) / u**exponent if value > 0 else math.inf
        for value, u in zip(raw_lower, u_grid)
    )

    upper = tuple(min(1.0, math.exp(-c_upper * u**exponent)) for u in u_grid)
    lower = tuple(math.exp(-c_lower * u**exponent) for u in u_grid)

    upper_name, lower_name = CONSTANT_NAMES[family]
    constants = {
        "C_upper": c_upper,
        "C_lower": c_lower,
        upper_name: c_upper,
        lower_name: c_lower,
        "exponent": exponent,
        "measured_exponent": measured,
    }
    return TailEnvelope(
        u_grid=tuple(u_grid),
        lower=lower,
        upper=upper,
        constants=constants,
        exponent=exponent,
        family=family,
        validity=(u_grid[0], u_grid[-1]),
        raw_lower=tuple(raw_lower),
        raw_upper=tuple(raw_upper),
    )
