"""Lp norms, natural functions, moment generating functions, Young-Fenchel conjugates and
B(phi) norms. Closed forms are used where they exist, quadrature or plug-in estimates otherwise."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import integrate, optimize, special

from gls_bounds.data_models import (
    AnyModel,
    BPhiNorm,
    MomentProfile,
    PhiFunction,
    RandomVariableModel,
    SumModel,
    TabulatedConvex,
)
from gls_bounds.exceptions import (
    DomainError,
    InfeasibleError,
    NonIntegrableError,
    QuadratureFailureError,
    UnreliableMomentError,
    UnsupportedKindError,
)
from gls_bounds.models import rv_models
from gls_bounds.models.constants import (
    BPHI_GRID_POINTS,
    BPHI_LAMBDA_MAX,
    BPHI_LAMBDA_MIN,
    BPHI_TAU_CAP,
    BPHI_TOLERANCE,
    DEFAULT_MC_COUNT,
    DEFAULT_SEED,
    QUAD_EPSABS,
    QUAD_EPSREL,
    QUAD_LIMIT,
    YF_LAMBDA_CAP,
    YF_XTOL,
    Z_SCORE,
    ClosedFormPhi,
    ModelKind,
    PhiForm,
    Provenance,
)

logger = logging.getLogger(__name__)

EXAMPLE_A_SERIES_CUTOFF = 1e-4

LOG_2 = math.log(2.0)


def integrate_checked(
    integrand,
    lower: float,
    upper: float,
    epsabs: float = QUAD_EPSABS,
    epsrel: float = QUAD_EPSREL,
) -> float:
    """Runs adaptive quadrature and raises when the requested tolerance is not reached.

    Args:
        integrand: Scalar function to integrate.
        lower: Lower limit, may be -inf.
        upper: Upper limit, may be +inf.
        epsabs: Absolute tolerance.
        epsrel: Relative tolerance.

    Returns:
        The integral.
    """
    result = integrate.quad(
        integrand, lower, upper, epsabs=epsabs, epsrel=epsrel, limit=QUAD_LIMIT, full_output=1
    )
    value, achieved_error = result[0], result[1]

    if not math.isfinite(value):
        msg = f"Quadrature on [{lower}, {upper}] returned {value}."
        raise QuadratureFailureError(msg)

    # quad appends a message to its output when it could not converge.
    if len(result) > 3 and achieved_error > max(epsabs, epsrel * abs(value)):
        msg = (
            f"Quadrature on [{lower}, {upper}] stopped at error {achieved_error:.3e}, "
            f"requested {max(epsabs, epsrel * abs(value)):.3e}."
        )
        raise NonIntegrableError(msg, achieved_error)

    logger.debug("Quadrature on [%s, %s]: %r +- %.2e", lower, upper, value, achieved_error)
    return value


def closed_form_lp_norm(model: RandomVariableModel, p: float) -> float | None:
    """(E|X|^p)^(1/p) from a closed form, or None when the kind has none here."""
    if model.kind == ModelKind.EXAMPLE_A:
        return math.sqrt(2.0) * math.exp(special.gammaln(p / 2 + 1) / p)

    if model.kind == ModelKind.GAUSSIAN:
        log_moment = (
            p * math.log(model.sigma)
            + (p / 2) * LOG_2
            + special.gammaln((p + 1) / 2)
            - 0.5 * math.log(math.pi)
        )
        return math.exp(log_moment / p)

    atoms = model.support_atoms
    if atoms is not None:
        moment = math.fsum(probability * abs(value) ** p for value, probability in atoms)
        return moment ** (1 / p)

    return None


def log_integrand_in_log_scale(model: RandomVariableModel, p: float, t: float) -> float:
    """log of x^(p+1) f(x) at x = e^t, the integrand of E|X|^p / 2 after x = e^t."""
    with np.errstate(over="ignore"):
        if model.kind == ModelKind.EXAMPLE_A:
            return (p + 2) * t + math.log(0.5) - float(np.exp(2 * t)) / 2

        if model.kind == ModelKind.GAUSSIAN:
            sigma = model.sigma
            return (
                (p + 1) * t
                - float(np.exp(2 * t)) / (2 * sigma * sigma)
                - math.log(sigma * math.sqrt(2 * math.pi))
            )

        if model.kind == ModelKind.WEIBULL_SYM:
            m, scale = model.m, model.scale
            shifted = t - math.log(scale)
            return (
                (p + 1) * t
                + math.log(m / (2 * scale))
                + (m - 1) * shifted
                - float(np.exp(m * shifted))
            )

    msg = f"A {model.kind.value} model has no density to integrate."
    raise UnsupportedKindError(msg)


def lp_norm_quadrature(
    model: RandomVariableModel,
    p: float,
    epsabs: float = QUAD_EPSABS,
    epsrel: float = QUAD_EPSREL,
) -> float:
    """(E|X|^p)^(1/p) by quadrature of the density.

    The substitution x = e^t maps (0, inf) onto the real line, where the integrand is
    log-concave for every supported density. It is shifted by its maximum before
    integrating so large p does not overflow.

    Args:
        model: An analytic, symmetric model.
        p: Moment order, at least 1.
        epsabs: Absolute quadrature tolerance.
        epsrel: Relative quadrature tolerance.

    Returns:
        The Lp norm.
    """
    validate_order(p)

    def negative_log_integrand(t: float) -> float:
        return -log_integrand_in_log_scale(model, p, t)

    peak = optimize.minimize_scalar(
        negative_log_integrand, bounds=(-60.0, 60.0), method="bounded", options={"xatol": 1e-10}
    )
    t_peak = float(peak.x)
    log_peak = -float(peak.fun)

    def shifted_integrand(t: float) -> float:
        return math.exp(log_integrand_in_log_scale(model, p, t) - log_peak)

    mass = integrate_checked(shifted_integrand, -math.inf, t_peak, epsabs, epsrel)
    mass += integrate_checked(shifted_integrand, t_peak, math.inf, epsabs, epsrel)

    log_moment = LOG_2 + log_peak + math.log(mass)
    return math.exp(log_moment / p)


def validate_order(p: float) -> None:
    """Raises ValueError for moment orders below 1."""
    if not p >= 1:
        msg = f"Moment orders start at p = 1, got {p}."
        raise ValueError(msg)


def check_empirical_order(p: float, count: int) -> None:
    """Refuses plug-in moments of order above log2(sample count)."""
    if p > math.log2(count):
        msg = (
            f"A plug-in moment of order {p} from {count} samples is dominated by noise "
            f"(limit log2(count) = {math.log2(count):.2f})."
        )
        logger.warning(msg)
        raise UnreliableMomentError(msg)


def plug_in_lp_norm(values: np.ndarray, p: float) -> float:
    """(mean |x|^p)^(1/p) of a sample after the reliability check."""
    check_empirical_order(p, values.size)
    return float(np.mean(np.abs(values) ** p)) ** (1 / p)


def is_even_integer(p: float) -> bool:
    """True for p in {2, 4, 6, ...}."""
    return p == int(p) and int(p) % 2 == 0


def lp_norm(
    model: AnyModel,
    p: float,
    epsabs: float = QUAD_EPSABS,
    epsrel: float = QUAD_EPSREL,
    count: int = DEFAULT_MC_COUNT,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> float:
    """The Lp norm |Z|_p = (E|Z|^p)^(1/p) of a model or of a sum of iid copies.

    Args:
        model: A RandomVariableModel or a SumModel.
        p: Moment order, at least 1.
        epsabs: Absolute quadrature tolerance.
        epsrel: Relative quadrature tolerance.
        count: Draws used when a sum has to be estimated by Monte Carlo.
        seed: Seed for that Monte Carlo estimate.
        workers: Threads used for that Monte Carlo estimate.

    Returns:
        The norm.
    """
    validate_order(p)

    if isinstance(model, SumModel):
        return sum_lp_norm(model, p, epsabs, epsrel, count, seed, workers)

    if model.kind == ModelKind.EMPIRICAL:
        return plug_in_lp_norm(model.samples, p)

    closed_form = closed_form_lp_norm(model, p)
    if closed_form is not None:
        return closed_form

    return lp_norm_quadrature(model, p, epsabs, epsrel)


def sum_lp_norm(
    sum_model: SumModel,
    p: float,
    epsabs: float,
    epsrel: float,
    count: int,
    seed: int,
    workers: int,
) -> float:
    """Lp norm of a sum: exact where possible, plug-in from fresh draws otherwise."""
    base = sum_model.base

    if base.kind == ModelKind.GAUSSIAN:
        sigma = base.sigma * math.sqrt(sum_model.n) * sum_model.scale_factor
        return lp_norm(RandomVariableModel.gaussian(sigma), p, epsabs, epsrel)

    if sum_model.n == 1:
        return sum_model.scale_factor * lp_norm(base, p, epsabs, epsrel)

    if rv_models.can_enumerate(sum_model):
        values, probabilities = rv_models.enumerate_sum(sum_model)
        return float(np.dot(probabilities, np.abs(values) ** p)) ** (1 / p)

    if is_even_integer(p) and base.kind != ModelKind.EMPIRICAL:
        moment = rv_models.sum_integer_moments(sum_model, int(p))[int(p)]
        if math.isfinite(moment):
            return moment ** (1 / p)

    draws = rv_models.sample_sum(sum_model, count, seed, workers)
    return plug_in_lp_norm(draws.values, p)


def empirical_profile(
    values: np.ndarray, grid: list[float], label: str = "", b: float = math.inf
) -> MomentProfile:
    """Plug-in moment profile of a sample with delta-method confidence half-widths.

    Orders above log2(sample count) are dropped with a warning.

    Args:
        values: The sample.
        grid: Increasing moment orders.
        label: Provenance label of the sample.
        b: Finiteness bound to record on the profile.

    Returns:
        The empirical MomentProfile, half-widths at Z_SCORE standard errors.
    """
    sample_count = values.size
    kept = [p for p in grid if p <= math.log2(sample_count)]
    if len(kept) < len(grid):
        logger.warning(
            "Dropping %d orders above log2(%d) from the empirical profile of %s",
            len(grid) - len(kept),
            sample_count,
            label,
        )
    if not kept:
        msg = f"No order of the grid is reliable with {sample_count} samples."
        raise UnreliableMomentError(msg)

    with np.errstate(divide="ignore"):
        log_magnitudes = np.log(np.abs(values))

    norms, halfwidths = [], []
    for p in kept:
        powers = np.exp(p * log_magnitudes)
        mean = float(np.mean(powers))
        standard_error = float(np.std(powers, ddof=1)) / math.sqrt(sample_count) if sample_count > 1 else 0.0
        norm = mean ** (1 / p)
        # d(m^(1/p))/dm = m^(1/p) / (p m)
        norm_error = norm * standard_error / (p * mean) if mean > 0 else 0.0
        norms.append(norm)
        halfwidths.append(Z_SCORE * norm_error)

    return MomentProfile(
        grid=tuple(kept),
        values=tuple(norms),
        provenance=Provenance.EMPIRICAL,
        ci_halfwidths=tuple(halfwidths),
        b=b,
        label=label,
    )


def natural_function(
    model: AnyModel,
    grid: list[float],
    epsabs: float = QUAD_EPSABS,
    epsrel: float = QUAD_EPSREL,
    count: int = DEFAULT_MC_COUNT,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> MomentProfile:
    """The natural function psi[X](p) = |X|_p tabulated on a grid.

    Args:
        model: A RandomVariableModel or a SumModel.
        grid: Increasing moment orders in [1, b).
        epsabs: Absolute quadrature tolerance.
        epsrel: Relative quadrature tolerance.
        count: Draws for sums that have to be estimated.
        seed: Seed for those draws.
        workers: Threads for grid evaluation and sampling.

    Returns:
        The MomentProfile.
    """
    grid = [float(p) for p in grid]
    for p in grid:
        validate_order(p)

    if isinstance(model, RandomVariableModel) and model.kind == ModelKind.EMPIRICAL:
        return empirical_profile(model.samples, grid, label=model.label)

    if isinstance(model, SumModel) and not sum_is_exact(model, grid):
        draws = rv_models.sample_sum(model, count, seed, workers)
        return empirical_profile(draws.values, grid, label=model.label)

    def evaluate(p: float) -> float:
        return lp_norm(model, p, epsabs, epsrel, count, seed)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            values = list(executor.map(evaluate, grid))
    else:
        values = [evaluate(p) for p in grid]

    return MomentProfile(
        grid=tuple(grid),
        values=tuple(values),
        provenance=profile_provenance(model),
        label=model.label,
    )


def sum_is_exact(sum_model: SumModel, grid: list[float]) -> bool:
    """True when every grid point of a sum can be evaluated without sampling."""
    base = sum_model.base
    if base.kind == ModelKind.EMPIRICAL:
        return False
    if base.kind == ModelKind.GAUSSIAN or sum_model.n == 1:
        return True
    if rv_models.can_enumerate(sum_model):
        return True
    return all(is_even_integer(p) for p in grid)


def profile_provenance(model: AnyModel) -> Provenance:
    """Provenance of a profile computed without sampling."""
    base = model.base if isinstance(model, SumModel) else model
    if base.kind == ModelKind.WEIBULL_SYM and not (
        isinstance(model, SumModel) and model.n > 1
    ):
        return Provenance.QUADRATURE
    return Provenance.ANALYTIC


def log_mgf_weibull(model: RandomVariableModel, lam: float) -> float:
    """ln E exp(lam X) for a WeibullSym model, +inf where the expectation diverges."""
    m, scale = model.m, model.scale
    c = abs(lam) * scale
    if c == 0:
        return 0.0
    if m < 1:
        return math.inf
    if m == 1:
        # Laplace law: E exp(lam X) = 1 / (1 - (scale lam)^2).
        return -math.log1p(-c * c) if c < 1 else math.inf

    # Y = |X| / scale has density m y^(m-1) exp(-y^m) on (0, inf).
    def log_weight(y: float, sign: float) -> float:
        return math.log(m) + (m - 1) * math.log(y) - y**m + sign * c * y

    upper_search = max(1.0, ((c + m - 1) / m) ** (1 / (m - 1))) + 1.0
    peak = optimize.minimize_scalar(
        lambda y: -log_weight(y, 1.0), bounds=(1e-12, upper_search), method="bounded"
    )
    y_peak, log_peak = float(peak.x), -float(peak.fun)

    def shifted(y: float) -> float:
        return math.exp(log_weight(y, 1.0) - log_peak) if y > 0 else 0.0

    growing = integrate_checked(shifted, 0.0, y_peak) + integrate_checked(
        shifted, y_peak, math.inf
    )
    shrinking = integrate_checked(
        lambda y: math.exp(log_weight(y, -1.0)) if y > 0 else 0.0, 0.0, math.inf
    )
    # E exp(lam X) = E cosh(c Y) by symmetry.
    return float(np.logaddexp(log_peak + math.log(growing), math.log(shrinking))) - LOG_2


def mgf_log(model: AnyModel, lam: float) -> float:
    """The natural function phi_xi(lam) = max over alpha = +-1 of ln E exp(alpha lam xi).

    Args:
        model: A RandomVariableModel or a SumModel.
        lam: The argument.

    Returns:
        phi_xi(lam), +inf where E exp(|lam| xi) diverges.
    """
    if lam == 0:
        return 0.0

    if isinstance(model, SumModel):
        base_value = mgf_log(model.base, lam * model.scale_factor)
        return model.n * base_value

    lam = abs(lam)

    if model.kind == ModelKind.GAUSSIAN:
        return model.sigma**2 * lam**2 / 2

    if model.kind == ModelKind.RADEMACHER:
        return float(np.logaddexp(lam, -lam)) - LOG_2

    if model.kind == ModelKind.EXAMPLE_A:
        if lam < EXAMPLE_A_SERIES_CUTOFF:
            # E exp(lam X) = 1 + lam^2 + lam^4/3 + O(lam^6)
            return math.log1p(lam**2 + lam**4 / 3)
        # E exp(lam X) = 1 + lam sqrt(pi/2) exp(lam^2/2) erf(lam/sqrt 2)
        log_excess = (
            math.log(lam * math.sqrt(math.pi / 2) * special.erf(lam / math.sqrt(2)))
            + lam**2 / 2
        )
        return float(np.logaddexp(0.0, log_excess))

    if model.kind == ModelKind.WEIBULL_SYM:
        return log_mgf_weibull(model, lam)

    if model.kind == ModelKind.FINITE_DISCRETE:
        values = np.array([value for value, _ in model.atoms])
        weights = np.array([probability for _, probability in model.atoms])
        return max(
            float(special.logsumexp(lam * values, b=weights)),
            float(special.logsumexp(-lam * values, b=weights)),
        )

    samples = model.samples
    log_count = math.log(samples.size)
    return max(
        float(special.logsumexp(lam * samples)) - log_count,
        float(special.logsumexp(-lam * samples)) - log_count,
    )


def natural_lambda0(model: AnyModel) -> float:
    """Radius of the interval on which the moment generating function is finite."""
    base = model.base if isinstance(model, SumModel) else model
    factor = model.scale_factor if isinstance(model, SumModel) else 1.0

    if base.kind == ModelKind.WEIBULL_SYM and base.m <= 1:
        if base.m < 1:
            msg = f"{base.label} has no finite moment generating function near 0."
            raise InfeasibleError(msg)
        return 1.0 / (base.scale * factor)

    return math.inf


def natural_phi(model: AnyModel) -> PhiFunction:
    """PhiFunction NaturalOf(model) with its finiteness radius."""
    return PhiFunction.natural_of(model, natural_lambda0(model))


def phi_eval(phi: PhiFunction, lam: float) -> float:
    """Evaluates a Young-Orlicz function, +inf outside [-lambda0, lambda0].

    Args:
        phi: The function.
        lam: The argument.

    Returns:
        phi(lam).
    """
    lam = abs(lam)
    if lam > phi.lambda0:
        return math.inf

    if phi.form == PhiForm.QUADRATIC:
        return lam * lam / 2

    if phi.form == PhiForm.NATURAL_OF:
        return mgf_log(phi.model, lam)

    if phi.expression == ClosedFormPhi.QUADRATIC_SCALED:
        return phi.parameter("sigma") ** 2 * lam * lam / 2

    if phi.expression == ClosedFormPhi.LOG_COSH:
        return float(np.logaddexp(lam, -lam)) - LOG_2

    scaled = phi.parameter("scale") * lam
    return -math.log1p(-scaled * scaled) if scaled < 1 else math.inf


def young_fenchel(
    g: PhiFunction | TabulatedConvex,
    u: float,
    lambda_cap: float = YF_LAMBDA_CAP,
    xtol: float = YF_XTOL,
) -> float:
    """The Young-Fenchel transform nu(u) = sup over lam in Dom[g], 0 <= lam <= lambda0, of lam u - g(lam).

    Args:
        g: A PhiFunction, or a convex function tabulated on a lambda-grid.
        u: Non-negative argument.
        lambda_cap: Search bound used when lambda0 is infinite.
        xtol: Width at which the maximizer search stops.

    Returns:
        nu(u).
    """
    if u < 0:
        msg = f"The Young-Fenchel transform is taken at u >= 0 only, got {u}."
        raise ValueError(msg)

    if isinstance(g, TabulatedConvex):
        # The sup of a linear function over a piecewise linear convex g sits on a vertex.
        candidates = [
            lam * u - value
            for lam, value in zip(g.lambdas, g.values)
            if lam >= 0 and math.isfinite(value)
        ]
        if not candidates:
            msg = "The tabulated function has no finite value at lambda >= 0."
            raise ValueError(msg)
        return max(candidates)

    upper = min(g.lambda0, lambda_cap)
    if not math.isfinite(phi_eval(g, upper)):
        upper = math.nextafter(upper, 0.0) if upper == g.lambda0 else upper
        upper *= 1 - 1e-9

    def objective(lam: float) -> float:
        return lam * u - phi_eval(g, lam)

    search = optimize.minimize_scalar(
        lambda lam: -objective(lam),
        bounds=(0.0, upper),
        method="bounded",
        options={"xatol": xtol},
    )
    candidates = [objective(float(search.x)), 0.0, objective(upper)]
    return max(value for value in candidates if math.isfinite(value))


def default_lambda_grid(phi: PhiFunction) -> list[float]:
    """Geometric lambda-grid inside (0, lambda0) used by bphi_norm."""
    upper = min(BPHI_LAMBDA_MAX, phi.lambda0 * (1 - 1e-3))
    lower = min(BPHI_LAMBDA_MIN, upper / 10)
    return list(np.geomspace(lower, upper, BPHI_GRID_POINTS))


def bphi_norm(
    model: AnyModel,
    phi: PhiFunction,
    lambda_grid: list[float] | None = None,
    tau_cap: float = BPHI_TAU_CAP,
    tolerance: float = BPHI_TOLERANCE,
) -> BPhiNorm:
    """The B(phi) norm: least tau with phi_xi(lam) <= phi(lam tau) on a lambda-grid.

    Args:
        model: A RandomVariableModel or a SumModel.
        phi: The Young-Orlicz function.
        lambda_grid: Points in (0, lambda0), default a geometric grid.
        tau_cap: Largest tau tried.
        tolerance: Bisection stops at this width.

    Returns:
        The BPhiNorm.
    """
    if phi.form == PhiForm.NATURAL_OF and phi.model == model:
        # A variable has norm 1 in the space built on its own natural function.
        return BPhiNorm(value=1.0, phi=phi, tolerance=tolerance)

    grid = default_lambda_grid(phi) if lambda_grid is None else list(lambda_grid)
    if any(not 0 < lam < phi.lambda0 for lam in grid):
        msg = f"The lambda-grid must lie in (0, {phi.lambda0})."
        raise ValueError(msg)

    left_sides = [mgf_log(model, lam) for lam in grid]
    if not all(math.isfinite(value) for value in left_sides):
        msg = f"{model.label} has an infinite moment generating function on the lambda-grid."
        raise InfeasibleError(msg)

    def is_feasible(tau: float) -> bool:
        for lam, left in zip(grid, left_sides):
            right = phi_eval(phi, lam * tau)
            if left > right + 1e-12 * (1 + abs(right)):
                return False
        return True

    if not is_feasible(tau_cap):
        msg = f"{model.label} is not in B(phi): no tau up to {tau_cap} works."
        raise InfeasibleError(msg)

    low, high = 0.0, tau_cap
    while high - low > tolerance:
        middle = (low + high) / 2
        if is_feasible(middle):
            high = middle
        else:
            low = middle

    logger.debug("B(phi) norm of %s: %r", model.label, high)
    return BPhiNorm(value=high, phi=phi, tolerance=tolerance)


def subgaussian_sum_norm_upper(norms: list[float]) -> float:
    """Right-hand side sqrt(sum ||xi_i||^2) of the subgaussian norm bound for independent sums.

    Args:
        norms: Subgaussian norms of the summands.

    Returns:
        The bound on the norm of the sum.
    """
    if any(norm < 0 for norm in norms):
        msg = "Norms are non-negative."
        raise ValueError(msg)
    return math.sqrt(math.fsum(norm * norm for norm in norms))


def bphi_sum_norm_upper(
    norms: list[float], phi: PhiFunction, assert_sqrt_convex: bool = False
) -> float:
    """The same bound in a general B(phi), valid when lam -> phi(sqrt lam) is convex.

    Convexity is not decided numerically: it holds for the quadratic phi and must be
    asserted by the caller for anything else.

    Args:
        norms: B(phi) norms of the summands.
        phi: The Young-Orlicz function.
        assert_sqrt_convex: The caller's assertion that lam -> phi(sqrt lam) is convex.

    Returns:
        The bound on the norm of the sum.
    """
    if phi.form != PhiForm.QUADRATIC and not assert_sqrt_convex:
        msg = "The sum bound needs lam -> phi(sqrt lam) convex; assert it to apply the bound."
        raise DomainError(msg)
    return subgaussian_sum_norm_upper(norms)
