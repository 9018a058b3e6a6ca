"""Generating functions, the GLS norm and anti-norm, the theta and kappa combinators and the
lower bounds for sums of independent variables built from them."""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy import optimize
from scipy.interpolate import PchipInterpolator

from gls_bounds.data_models import AntiNormResult, GeneratingFunction, MomentProfile
from gls_bounds.exceptions import DomainError, EmptyDomainError, OutOfDomainError
from gls_bounds.models.constants import (
    ANTI_NORM_DEFAULT_LOWER,
    P_GRID_CAP,
    P_GRID_EPSILON,
    P_GRID_POINTS,
    REFINEMENT_ROUNDS,
    THETA_Z_DECADES,
    THETA_Z_POINTS,
    PsiFamily,
)

logger = logging.getLogger(__name__)


def psi_eval(gf: GeneratingFunction, p: float) -> float:
    """Evaluates a generating function.

    Args:
        gf: The generating function.
        p: A point of [1, b).

    Returns:
        psi(p), possibly +inf.
    """
    if not 1 <= p < gf.b:
        msg = f"p={p} lies outside [1, {gf.b}) of the {gf.family.value} generating function."
        raise OutOfDomainError(msg)

    if gf.family == PsiFamily.POWER:
        return p ** (1 / gf.m)

    if gf.family == PsiFamily.BLOWUP:
        return (gf.b - p) ** (-gf.beta)

    if gf.family == PsiFamily.DEGENERATE:
        return 1.0 if p == gf.r else math.inf

    if gf.family == PsiFamily.NATURAL:
        if not gf.profile.covers(p):
            return math.inf
        return gf.profile.value_at(p)

    return tabulated_psi(gf, p)


def tabulated_psi(gf: GeneratingFunction, p: float) -> float:
    """Monotone interpolation of a tabulated psi in log p, +inf off its finite part."""
    if p in gf.grid:
        return gf.values[gf.grid.index(p)]

    position = int(np.searchsorted(gf.grid, p))
    if position == 0 or position == len(gf.grid):
        return math.inf

    left, right = gf.values[position - 1], gf.values[position]
    if not (math.isfinite(left) and math.isfinite(right)):
        return math.inf

    # Interpolate over the run of consecutive finite points holding p.
    first, last = position - 1, position
    while first > 0 and math.isfinite(gf.values[first - 1]):
        first -= 1
    while last < len(gf.grid) - 1 and math.isfinite(gf.values[last + 1]):
        last += 1

    interpolator = PchipInterpolator(
        np.log(gf.grid[first : last + 1]), np.log(gf.values[first : last + 1])
    )
    return float(math.exp(interpolator(math.log(p))))


def default_p_grid(b: float = math.inf, lower: float = 1.0) -> list[float]:
    """The geometric p-grid on [lower, min(b - eps, 64)], eps = 1e-3 b for finite b.

    Args:
        b: Upper endpoint of the generating function's domain.
        lower: First grid point.

    Returns:
        Increasing list of P_GRID_POINTS orders.
    """
    upper = P_GRID_CAP if math.isinf(b) else min(b - P_GRID_EPSILON * b, P_GRID_CAP)
    if upper <= lower:
        return [lower]
    return [float(p) for p in np.geomspace(lower, upper, P_GRID_POINTS)]


def ratio_at(profile: MomentProfile, gf: GeneratingFunction, p: float) -> float:
    """|X|_p / psi(p), 0 where psi is infinite."""
    psi_value = psi_eval(gf, p)
    if math.isinf(psi_value):
        return 0.0
    return profile.value_at(p) / psi_value


def finite_points(
    profile: MomentProfile, gf: GeneratingFunction, lower: float, upper: float
) -> list[float]:
    """Points of the profile grid, plus the range endpoints, where the ratio is defined."""
    lower = max(lower, profile.grid[0], 1.0)
    upper = min(upper, profile.grid[-1])
    if gf.family == PsiFamily.DEGENERATE:
        candidates = [gf.r]
    else:
        candidates = sorted({lower, upper, *(p for p in profile.grid if lower <= p <= upper)})

    return [
        p
        for p in candidates
        if lower <= p <= upper and p < gf.b and math.isfinite(psi_eval(gf, p))
    ]


def extremum(
    profile: MomentProfile,
    gf: GeneratingFunction,
    lower: float,
    upper: float,
    maximize: bool,
) -> tuple[float, float]:
    """Sup or inf of |X|_p / psi(p) over the finite part of [lower, upper].

    The scan over the grid is refined by bounded golden-section searches on the interval
    that brackets the best grid point.

    Returns:
        The extreme ratio and the p where it was found.
    """
    points = finite_points(profile, gf, lower, upper)
    if not points:
        msg = (
            f"No point of [{lower}, {upper}] has a finite {gf.family.value} psi "
            f"inside the profile range of {profile.label or 'the variable'}."
        )
        raise EmptyDomainError(msg)

    sign = -1.0 if maximize else 1.0
    ratios = [ratio_at(profile, gf, p) for p in points]
    best_index = int(np.argmin([sign * ratio for ratio in ratios]))
    best_p, best_ratio = points[best_index], ratios[best_index]

    if gf.family == PsiFamily.DEGENERATE or len(points) < 3:
        return best_ratio, best_p

    def objective(p: float) -> float:
        psi_value = psi_eval(gf, p)
        if math.isinf(psi_value):
            return math.inf
        return sign * profile.value_at(p) / psi_value

    left = points[max(best_index - 1, 0)]
    right = points[min(best_index + 1, len(points) - 1)]
    for _ in range(REFINEMENT_ROUNDS):
        if right - left <= 0:
            break
        search = optimize.minimize_scalar(objective, bounds=(left, right), method="bounded")
        if math.isfinite(search.fun) and search.fun < sign * best_ratio:
            best_p, best_ratio = float(search.x), sign * float(search.fun)
        quarter = (right - left) / 4
        left, right = max(left, best_p - quarter), min(right, best_p + quarter)

    return best_ratio, best_p


def gls_norm(profile: MomentProfile, gf: GeneratingFunction) -> float:
    """The Grand Lebesgue Space norm sup_p |X|_p / psi(p).

    Args:
        profile: The moment profile of the variable.
        gf: The generating function.

    Returns:
        The norm. A degenerate psi at r gives |X|_r.
    """
    value, argmax_p = extremum(profile, gf, 1.0, gf.b, maximize=True)
    logger.debug("GLS norm of %s: %r at p=%r", profile.label, value, argmax_p)
    return value


def anti_norm(
    profile: MomentProfile,
    gf: GeneratingFunction,
    p_range: tuple[float, float] | None = None,
    widen: bool = False,
) -> AntiNormResult:
    """The anti-norm V(X) = inf_p |X|_p / psi(p).

    Args:
        profile: The moment profile of the variable.
        gf: The generating function.
        p_range: Closed sub-interval of [1, b) to take the inf over. Defaults to [2, b),
            or to [1, b) when widen is set.
        widen: Use the literal range [1, b) instead of [2, b).

    Returns:
        The AntiNormResult.
    """
    if p_range is None:
        lower = 1.0 if widen else ANTI_NORM_DEFAULT_LOWER
        p_range = (lower, gf.b)

    lower, upper = p_range
    if not lower <= upper:
        msg = f"Empty p-range [{lower}, {upper}]."
        raise EmptyDomainError(msg)

    value, argmin_p = extremum(profile, gf, lower, upper, maximize=False)
    logger.debug("Anti-norm of %s: %r at p=%r", profile.label, value, argmin_p)
    return AntiNormResult(value=value, argmin_p=argmin_p, profile_used=profile)


def ratio_curve(
    profile: MomentProfile, gf: GeneratingFunction, grid: list[float] | None = None
) -> list[tuple[float, float, float, float]]:
    """Rows (p, |X|_p, psi(p), ratio) over the profile grid, for plotting.

    Args:
        profile: The moment profile.
        gf: The generating function.
        grid: Points to tabulate, default the profile grid restricted to [1, b).

    Returns:
        One row per point, ratio 0 where psi is infinite.
    """
    points = [p for p in (grid or profile.grid) if p < gf.b and profile.covers(p)]
    rows = []
    for p in points:
        psi_value = psi_eval(gf, p)
        norm = profile.value_at(p)
        rows.append((p, norm, psi_value, 0.0 if math.isinf(psi_value) else norm / psi_value))
    return rows


def theta_closed(p: float, q: float) -> float:
    """theta(p, q) = min(1, 2^(1/q - 1/p))."""
    validate_exponents(p, q)
    return min(1.0, 2.0 ** (1 / q - 1 / p))


def validate_exponents(*exponents: float) -> None:
    """Raises ValueError for exponents below 1."""
    for exponent in exponents:
        if not exponent >= 1:
            msg = f"Exponents start at 1, got {exponent}."
            raise ValueError(msg)


def theta_numeric(p: float, q: float, z_grid: list[float] | None = None) -> float:
    """inf over z > 0 of (z^q + 1)^(1/q) / (z^p + 1)^(1/p), by grid search and refinement.

    The ratio tends to 1 at both ends of (0, inf), so 1 always bounds the infimum.

    Args:
        p: First exponent.
        q: Second exponent.
        z_grid: Positive points, default THETA_Z_POINTS over +-THETA_Z_DECADES decades.

    Returns:
        The infimum.
    """
    validate_exponents(p, q)
    if z_grid is None:
        z_grid = np.logspace(-THETA_Z_DECADES, THETA_Z_DECADES, THETA_Z_POINTS)
    log_z = np.log(np.asarray(z_grid, dtype=float))

    def log_ratio(t):
        return np.logaddexp(q * t, 0.0) / q - np.logaddexp(p * t, 0.0) / p

    values = log_ratio(log_z)
    best = int(np.argmin(values))
    best_value = float(values[best])

    left = log_z[max(best - 1, 0)]
    right = log_z[min(best + 1, log_z.size - 1)]
    if right > left:
        search = optimize.minimize_scalar(
            lambda t: float(log_ratio(t)), bounds=(left, right), method="bounded",
            options={"xatol": 1e-12},
        )
        best_value = min(best_value, float(search.fun))

    return min(1.0, math.exp(best_value))


def kappa(b: float, p: float) -> float:
    """kappa_b(p) = min(1, 2^(1/b - 1/p)), with 1/b = 0 for b = inf.

    Args:
        b: Upper endpoint, greater than 1.
        p: Exponent, at least 1.

    Returns:
        The factor.
    """
    validate_exponents(p)
    if not b > 1:
        msg = f"kappa needs b > 1, got {b}."
        raise ValueError(msg)
    if p > b:
        return 1.0
    return min(1.0, 2.0 ** (1 / b - 1 / p))


def sum_anti_norm_lower(v: list[float], b: float, p: float) -> float:
    """Lower bound kappa_b(p) (sum V(X_i)^p)^(1/p) for the anti-norm of an independent sum.

    Args:
        v: Anti-norms of the centered independent summands.
        b: Upper endpoint of the generating function's domain.
        p: Exponent in [1, inf]. p = inf takes the maximum of v.

    Returns:
        The bound.
    """
    if any(value < 0 for value in v):
        msg = "Anti-norms are non-negative."
        raise ValueError(msg)

    if math.isinf(p):
        return min(1.0, 2.0 ** (1 / b)) * max(v, default=0.0)

    return kappa(b, p) * math.fsum(value**p for value in v) ** (1 / p)


def best_sum_anti_norm_lower(
    v: list[float], b: float, p_grid: list[float] | None = None
) -> tuple[float, float]:
    """The largest sum_anti_norm_lower over a p-grid.

    Args:
        v: Anti-norms of the summands.
        b: Upper endpoint of the generating function's domain.
        p_grid: Exponents to try, default the standard p-grid on [1, 64] plus inf.

    Returns:
        The best bound and the exponent giving it.
    """
    if p_grid is None:
        p_grid = [*default_p_grid(), math.inf]
    bounds = [(sum_anti_norm_lower(v, b, p), p) for p in p_grid]
    return max(bounds, key=lambda pair: pair[0])


def check_naor_exponent(q: float, allow_below_two: bool) -> None:
    """Raises DomainError for q < 2 unless the caller explicitly asks to go below."""
    if q >= 2:
        return
    msg = f"The sum inequality is stated for q in [2, inf], got q={q}."
    if not allow_below_two:
        raise DomainError(msg)
    logger.warning("%s Evaluating it anyway.", msg)


def naor_rhs(q: float, norms: list[float], allow_below_two: bool = False) -> float:
    """Right-hand side (sum |X_i|_q^q)^(1/q) of the moment lower bound for independent sums.

    Args:
        q: Exponent in [2, inf].
        norms: The norms |X_i|_q.
        allow_below_two: Evaluate for q in [1, 2) too, with a warning.

    Returns:
        The right-hand side.
    """
    check_naor_exponent(q, allow_below_two)
    if math.isinf(q):
        return max(norms, default=0.0)
    return math.fsum(norm**q for norm in norms) ** (1 / q)


def power_level_lower(
    q: float, n: int, norm1: float, allow_below_two: bool = False
) -> float:
    """Lower bound n^(1/q - 1/2) |X_1|_q for |n^(-1/2) sum X_i|_q over iid summands.

    Args:
        q: Exponent in [2, inf].
        n: Number of summands.
        norm1: |X_1|_q.
        allow_below_two: Evaluate for q in [1, 2) too, with a warning.

    Returns:
        The bound.
    """
    check_naor_exponent(q, allow_below_two)
    if n < 1:
        msg = f"A sum needs n >= 1, got {n}."
        raise DomainError(msg)
    exponent = -0.5 if math.isinf(q) else 1 / q - 0.5
    return n**exponent * norm1
