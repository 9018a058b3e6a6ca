"""Dataclasses for GLS Bounds. Every domain type the models pass around lives here."""

from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass, field
from typing import Union

import numpy as np
from scipy.interpolate import PchipInterpolator

from .models.constants import (
    BPHI_TOLERANCE,
    DEFAULT_MC_COUNT,
    DEFAULT_SEED,
    DEFAULT_TAIL_COUNT,
    QUAD_EPSABS,
    QUAD_EPSREL,
    ClosedFormPhi,
    InequalityId,
    ModelKind,
    Normalization,
    PhiForm,
    Provenance,
    PsiFamily,
    TailFamily,
    Verdict,
)

CENTERING_TOLERANCE = 1e-12
LYAPUNOV_TOLERANCE = 1e-9


@dataclass(frozen=True)
class RandomVariableModel:
    """A centered random variable, given by a closed-form law or by a sample."""

    kind: ModelKind
    label: str
    sigma: float = 1.0
    m: float = 2.0
    scale: float = 1.0
    atoms: tuple[tuple[float, float], ...] = ()
    samples: np.ndarray = field(
        default_factory=lambda: np.empty(0), compare=False, repr=False
    )
    sample_digest: str = field(default="", init=False, repr=False)

    def __post_init__(self) -> None:
        if self.kind == ModelKind.GAUSSIAN and not self.sigma > 0:
            msg = f"Gaussian sigma must be positive, got {self.sigma}."
            raise ValueError(msg)

        if self.kind == ModelKind.WEIBULL_SYM and not (self.m > 0 and self.scale > 0):
            msg = f"WeibullSym needs m > 0 and scale > 0, got m={self.m}, scale={self.scale}."
            raise ValueError(msg)

        if self.kind == ModelKind.FINITE_DISCRETE:
            self.validate_atoms()

        if self.kind == ModelKind.EMPIRICAL:
            if self.samples.size == 0:
                msg = "An empirical model needs at least one sample."
                raise ValueError(msg)
            if abs(float(np.mean(self.samples))) > CENTERING_TOLERANCE * max(
                1.0, float(np.max(np.abs(self.samples)))
            ):
                msg = "Empirical samples must be centered, use RandomVariableModel.empirical()."
                raise ValueError(msg)
            digest = hashlib.sha256(np.ascontiguousarray(self.samples, dtype=float).tobytes())
            object.__setattr__(self, "sample_digest", digest.hexdigest())

    def validate_atoms(self) -> None:
        """Checks the atoms form a centered probability distribution."""
        if not self.atoms:
            msg = "A finite discrete model needs at least one atom."
            raise ValueError(msg)

        probabilities = [probability for _, probability in self.atoms]
        if any(probability < 0 for probability in probabilities):
            msg = "Atom probabilities must be non-negative."
            raise ValueError(msg)

        if abs(math.fsum(probabilities) - 1.0) > CENTERING_TOLERANCE:
            msg = f"Atom probabilities sum to {math.fsum(probabilities)!r}, not 1."
            raise ValueError(msg)

        mean = math.fsum(value * probability for value, probability in self.atoms)
        if abs(mean) > CENTERING_TOLERANCE:
            msg = f"Finite discrete model has mean {mean!r}, expected 0."
            raise ValueError(msg)

    @classmethod
    def example_a(cls) -> RandomVariableModel:
        """The symmetric law with density 0.5|x|exp(-x^2/2)."""
        return cls(ModelKind.EXAMPLE_A, "exampleA")

    @classmethod
    def gaussian(cls, sigma: float = 1.0) -> RandomVariableModel:
        """A centered normal law with standard deviation sigma."""
        return cls(ModelKind.GAUSSIAN, f"gaussian(sigma={sigma:g})", sigma=sigma)

    @classmethod
    def rademacher(cls) -> RandomVariableModel:
        """The uniform law on {-1, +1}."""
        return cls(ModelKind.RADEMACHER, "rademacher")

    @classmethod
    def weibull_sym(cls, m: float, scale: float = 1.0) -> RandomVariableModel:
        """A random sign times a Weibull(m, scale) magnitude."""
        return cls(
            ModelKind.WEIBULL_SYM, f"weibull(m={m:g},scale={scale:g})", m=m, scale=scale
        )

    @classmethod
    def finite_discrete(
        cls, atoms: list[tuple[float, float]], label: str | None = None
    ) -> RandomVariableModel:
        """A law with finitely many atoms given as (value, probability) pairs."""
        frozen_atoms = tuple((float(value), float(prob)) for value, prob in atoms)
        if label is None:
            label = "discrete(" + ";".join(f"{v:g}@{p:g}" for v, p in frozen_atoms) + ")"
        return cls(ModelKind.FINITE_DISCRETE, label, atoms=frozen_atoms)

    @classmethod
    def empirical(cls, samples: list[float] | np.ndarray, label: str) -> RandomVariableModel:
        """An empirical law. The sample mean is subtracted so the model is centered."""
        values = np.asarray(samples, dtype=float)
        if values.size == 0:
            msg = "An empirical model needs at least one sample."
            raise ValueError(msg)
        centered = values - np.mean(values)
        centered.setflags(write=False)
        return cls(ModelKind.EMPIRICAL, label, samples=centered)

    @property
    def support_atoms(self) -> tuple[tuple[float, float], ...] | None:
        """The atoms of a discrete law, or None for laws without finite support."""
        if self.kind == ModelKind.RADEMACHER:
            return ((-1.0, 0.5), (1.0, 0.5))
        if self.kind == ModelKind.FINITE_DISCRETE:
            return self.atoms
        return None

    @property
    def is_symmetric(self) -> bool:
        """True when X and -X have the same law."""
        if self.kind == ModelKind.EMPIRICAL:
            ordered = np.sort(self.samples)
            tolerance = CENTERING_TOLERANCE * max(1.0, float(np.max(np.abs(ordered))))
            return bool(np.allclose(ordered, -ordered[::-1], rtol=0.0, atol=tolerance))
        atoms = self.support_atoms
        if atoms is None:
            return True
        masses: dict[float, float] = {}
        for value, probability in atoms:
            masses[value] = masses.get(value, 0.0) + probability
        return all(
            abs(probability - masses.get(-value, 0.0)) <= CENTERING_TOLERANCE
            for value, probability in masses.items()
        )


@dataclass(frozen=True)
class SumModel:
    """The sum of n iid copies of a base model, optionally scaled by n^(-1/2)."""

    base: RandomVariableModel
    n: int
    normalization: Normalization = Normalization.INV_SQRT_N

    def __post_init__(self) -> None:
        if self.n < 1:
            msg = f"A sum needs n >= 1, got {self.n}."
            raise ValueError(msg)

    @property
    def scale_factor(self) -> float:
        """The factor applied to the plain sum."""
        if self.normalization == Normalization.INV_SQRT_N:
            return 1.0 / math.sqrt(self.n)
        return 1.0

    @property
    def label(self) -> str:
        """Human readable description of the sum."""
        return f"sum(base={self.base.label},n={self.n},{self.normalization.value})"


AnyModel = Union[RandomVariableModel, SumModel]


@dataclass(frozen=True)
class SampleSet:
    """Reproducible iid draws of a model."""

    values: np.ndarray = field(compare=False, repr=False)
    seed: int
    model_label: str

    @property
    def count(self) -> int:
        """Number of draws in the set."""
        return int(self.values.size)


@dataclass(frozen=True)
class MomentProfile:
    """A tabulation p -> |X|_p on an increasing grid."""

    grid: tuple[float, ...]
    values: tuple[float, ...]
    provenance: Provenance
    ci_halfwidths: tuple[float, ...] = ()
    b: float = math.inf
    label: str = ""

    def __post_init__(self) -> None:
        if not self.grid or len(self.grid) != len(self.values):
            msg = "A moment profile needs a non-empty grid with one value per point."
            raise ValueError(msg)

        if self.ci_halfwidths and len(self.ci_halfwidths) != len(self.grid):
            msg = "ci_halfwidths must match the grid length."
            raise ValueError(msg)

        if any(later <= earlier for earlier, later in zip(self.grid, self.grid[1:])):
            msg = "The p-grid of a moment profile must be strictly increasing."
            raise ValueError(msg)

        if self.grid[0] < 1:
            msg = f"Moment profiles start at p >= 1, got {self.grid[0]}."
            raise ValueError(msg)

        if any(not value > 0 for value in self.values):
            msg = "Moment profile values must be positive."
            raise ValueError(msg)

        self.check_lyapunov()

    def check_lyapunov(self) -> None:
        """Checks p -> |X|_p is nondecreasing, within tolerance or within the CI."""
        halfwidths = self.halfwidths
        for index in range(len(self.values) - 1):
            slack = LYAPUNOV_TOLERANCE * max(1.0, self.values[index])
            slack += halfwidths[index] + halfwidths[index + 1]
            if self.values[index + 1] < self.values[index] - slack:
                msg = (
                    f"Moment profile decreases between p={self.grid[index]} and "
                    f"p={self.grid[index + 1]}, which breaks Lyapunov's inequality."
                )
                raise ValueError(msg)

    @property
    def halfwidths(self) -> tuple[float, ...]:
        """CI half-widths, zeros when the profile is exact."""
        return self.ci_halfwidths or tuple(0.0 for _ in self.grid)

    def covers(self, p: float) -> bool:
        """True when p lies inside the tabulated range."""
        return self.grid[0] <= p <= self.grid[-1]

    def value_at(self, p: float) -> float:
        """|X|_p at p, exact on grid points and monotone-interpolated in log p between them.

        Args:
            p: The moment order.

        Returns:
            The interpolated norm.
        """
        if not self.covers(p):
            msg = f"p={p} lies outside the profile range [{self.grid[0]}, {self.grid[-1]}]."
            raise ValueError(msg)
        return float(math.exp(self._interpolate(self.values, p, log_values=True)))

    def halfwidth_at(self, p: float) -> float:
        """CI half-width at p, interpolated like value_at."""
        if not self.ci_halfwidths:
            return 0.0
        return float(max(0.0, self._interpolate(self.ci_halfwidths, p, log_values=False)))

    def _interpolate(self, column: tuple[float, ...], p: float, log_values: bool) -> float:
        data = np.log(column) if log_values else np.asarray(column, dtype=float)
        if p in self.grid:
            return float(data[self.grid.index(p)])
        if len(self.grid) == 1:
            return float(data[0])
        interpolator = PchipInterpolator(np.log(self.grid), data)
        return float(interpolator(math.log(p)))

    def scaled(self, factor: float) -> MomentProfile:
        """The profile of factor * X."""
        magnitude = abs(factor)
        return MomentProfile(
            grid=self.grid,
            values=tuple(value * magnitude for value in self.values),
            provenance=self.provenance,
            ci_halfwidths=tuple(h * magnitude for h in self.ci_halfwidths),
            b=self.b,
            label=f"{factor:g}*{self.label}",
        )


@dataclass(frozen=True)
class PhiFunction:
    """An even convex Young-Orlicz function, finite exactly on (-lambda0, lambda0)."""

    form: PhiForm
    lambda0: float = math.inf
    expression: ClosedFormPhi | None = None
    parameters: tuple[tuple[str, float], ...] = ()
    model: AnyModel | None = None

    def __post_init__(self) -> None:
        if not self.lambda0 > 0:
            msg = f"lambda0 must be positive, got {self.lambda0}."
            raise ValueError(msg)

        if self.form == PhiForm.CLOSED_FORM:
            if self.expression is None:
                msg = "A closed-form phi needs an expression id."
                raise ValueError(msg)
            missing = set(self.expression.parameter_names) - {
                name for name, _ in self.parameters
            }
            if missing:
                msg = f"Closed-form phi '{self.expression.expression_id}' misses {sorted(missing)}."
                raise ValueError(msg)

        if self.form == PhiForm.NATURAL_OF and self.model is None:
            msg = "A natural phi needs the model it belongs to."
            raise ValueError(msg)

    @classmethod
    def quadratic(cls, lambda0: float = math.inf) -> PhiFunction:
        """phi_2(lambda) = lambda^2 / 2, the subgaussian Young-Orlicz function."""
        return cls(PhiForm.QUADRATIC, lambda0=lambda0)

    @classmethod
    def closed_form(
        cls, expression: ClosedFormPhi, lambda0: float = math.inf, **parameters: float
    ) -> PhiFunction:
        """A named closed-form expression with its parameters."""
        return cls(
            PhiForm.CLOSED_FORM,
            lambda0=lambda0,
            expression=expression,
            parameters=tuple(sorted(parameters.items())),
        )

    @classmethod
    def natural_of(cls, model: AnyModel, lambda0: float) -> PhiFunction:
        """The natural function phi_xi of a model."""
        return cls(PhiForm.NATURAL_OF, lambda0=lambda0, model=model)

    def parameter(self, name: str) -> float:
        """Returns a closed-form parameter by name."""
        return dict(self.parameters)[name]


@dataclass(frozen=True)
class TabulatedConvex:
    """A convex function given by its values on an increasing lambda-grid."""

    lambdas: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.lambdas or len(self.lambdas) != len(self.values):
            msg = "A tabulated convex function needs matching, non-empty columns."
            raise ValueError(msg)


@dataclass(frozen=True)
class BPhiNorm:
    """The least tau with E exp(+-lambda xi) <= exp(phi(lambda tau)) on a lambda-grid."""

    value: float
    phi: PhiFunction
    tolerance: float = BPHI_TOLERANCE


@dataclass(frozen=True)
class GeneratingFunction:
    """A generating function psi on [1, b)."""

    family: PsiFamily
    b: float = math.inf
    m: float = 2.0
    beta: float = 0.0
    r: float = 2.0
    profile: MomentProfile | None = None
    grid: tuple[float, ...] = ()
    values: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not self.b > 1:
            msg = f"The upper endpoint b must exceed 1, got {self.b}."
            raise ValueError(msg)

        if self.family == PsiFamily.POWER and not self.m > 0:
            msg = f"PowerPsi needs m > 0, got {self.m}."
            raise ValueError(msg)

        if self.family == PsiFamily.BLOWUP and (not self.beta >= 0 or math.isinf(self.b)):
            msg = "BlowupPsi needs a finite b and beta >= 0."
            raise ValueError(msg)

        if self.family == PsiFamily.DEGENERATE and not 1 <= self.r < self.b:
            msg = f"DegeneratePsi needs r in [1, b), got r={self.r}."
            raise ValueError(msg)

        if self.family == PsiFamily.NATURAL and self.profile is None:
            msg = "A natural generating function needs a moment profile."
            raise ValueError(msg)

        if self.family == PsiFamily.TABULATED:
            self.validate_table()

    def validate_table(self) -> None:
        """Checks a tabulated psi is positive and finite somewhere."""
        if not self.grid or len(self.grid) != len(self.values):
            msg = "A tabulated generating function needs matching, non-empty columns."
            raise ValueError(msg)
        if any(not value > 0 for value in self.values):
            msg = "Tabulated psi values must be positive."
            raise ValueError(msg)
        if not any(math.isfinite(value) for value in self.values):
            msg = "A tabulated psi must be finite at one grid point at least."
            raise ValueError(msg)

    @classmethod
    def power(cls, m: float) -> GeneratingFunction:
        """psi_m(p) = p^(1/m)."""
        return cls(PsiFamily.POWER, m=m)

    @classmethod
    def blowup(cls, b: float, beta: float) -> GeneratingFunction:
        """psi(p) = (b - p)^(-beta) on [1, b)."""
        return cls(PsiFamily.BLOWUP, b=b, beta=beta)

    @classmethod
    def degenerate(cls, r: float) -> GeneratingFunction:
        """psi = 1 at p = r and +inf elsewhere, which recovers L_r."""
        return cls(PsiFamily.DEGENERATE, r=r)

    @classmethod
    def natural(cls, profile: MomentProfile) -> GeneratingFunction:
        """The natural function p -> |X|_p of a tabulated profile."""
        return cls(PsiFamily.NATURAL, b=profile.b, profile=profile)

    @classmethod
    def tabulated(
        cls, grid: list[float], values: list[float], b: float = math.inf
    ) -> GeneratingFunction:
        """A generating function known on a grid."""
        return cls(
            PsiFamily.TABULATED,
            b=b,
            grid=tuple(float(p) for p in grid),
            values=tuple(float(v) for v in values),
        )


@dataclass(frozen=True)
class AntiNormResult:
    """The anti-norm V(X) = inf_p |X|_p / psi(p), with the p where it is attained."""

    value: float
    argmin_p: float
    profile_used: MomentProfile


@dataclass(frozen=True)
class TailEnvelope:
    """Exponential curves bracketing P(S > u) on a u-grid."""

    u_grid: tuple[float, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    constants: dict[str, float]
    exponent: float
    family: TailFamily
    validity: tuple[float, float]
    raw_lower: tuple[float, ...] = ()
    raw_upper: tuple[float, ...] = ()

    @property
    def c_upper(self) -> float:
        """The constant of the upper curve exp(-C u^e)."""
        return self.constants["C_upper"]

    @property
    def c_lower(self) -> float:
        """The constant of the lower curve exp(-C u^e)."""
        return self.constants["C_lower"]


@dataclass(frozen=True)
class TailEstimate:
    """Empirical one-sided tail frequencies with Wilson intervals."""

    u_grid: tuple[float, ...]
    probabilities: tuple[float, ...]
    ci_lower: tuple[float, ...]
    ci_upper: tuple[float, ...]
    count: int
    seed: int

    @property
    def halfwidths(self) -> tuple[float, ...]:
        """Half the width of each Wilson interval."""
        return tuple(
            (high - low) / 2 for low, high in zip(self.ci_lower, self.ci_upper)
        )


@dataclass(frozen=True)
class VerificationReport:
    """The outcome of checking one inequality on one instance."""

    inequality: InequalityId
    instance: str
    lhs: float
    rhs: float
    sigma: float
    verdict: Verdict
    seed: int
    count: int
    note: str = ""

    @property
    def margin(self) -> float:
        """lhs - rhs, positive when the inequality holds."""
        return self.lhs - self.rhs

    @property
    def fails_run(self) -> bool:
        """True when this report should turn the exit status into a violation."""
        return self.verdict == Verdict.VIOLATED and not self.inequality.exempt

    def as_dict(self) -> dict:
        """Returns the report as a flat dictionary of plain values."""
        report = asdict(self)
        report["inequality"] = self.inequality.label
        report["verdict"] = self.verdict.value
        report["margin"] = self.margin
        return report


@dataclass(frozen=True)
class RunConfig:
    """Everything a command line run needs. Specs are kept as text and parsed on validation."""

    command: str
    model: str = "exampleA"
    psi: str = "natural"
    p_grid: str = ""
    p_range: str = ""
    widen: bool = False
    u_grid: str = ""
    p: str = "2"
    q: str = "4"
    b: str = "inf"
    v: str = "1,1"
    n: int = 16
    family: str = "subgaussian"
    count: int = DEFAULT_MC_COUNT
    tail_count: int = DEFAULT_TAIL_COUNT
    seed: int = DEFAULT_SEED
    workers: int = 1
    output: str = ""
    plot_dir: str = ""
    history: str = ""
    quad_epsabs: float = QUAD_EPSABS
    quad_epsrel: float = QUAD_EPSREL
    bisection_tol: float = BPHI_TOLERANCE


@dataclass(frozen=True)
class HistoryEntry:
    """A verification report as stored in the run history."""

    timestamp: int
    report: VerificationReport
