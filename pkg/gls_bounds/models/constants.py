"""Constants for the GLS Bounds models. Think of Enums, CSV layouts and numeric defaults."""

from enum import Enum


class ModelKind(Enum):
    """The laws a RandomVariableModel can follow."""

    EXAMPLE_A = "exampleA"
    GAUSSIAN = "gaussian"
    RADEMACHER = "rademacher"
    WEIBULL_SYM = "weibull"
    FINITE_DISCRETE = "discrete"
    EMPIRICAL = "empirical"

    @property
    def is_analytic(self) -> bool:
        """True for the kinds that come with a closed-form law."""
        return self not in (ModelKind.EMPIRICAL, ModelKind.FINITE_DISCRETE)


class Normalization(Enum):
    """How a SumModel scales the sum of its iid copies."""

    NONE = "none"
    INV_SQRT_N = "inv_sqrt_n"


class Provenance(Enum):
    """Where the values of a MomentProfile came from."""

    ANALYTIC = "analytic"
    QUADRATURE = "quadrature"
    EMPIRICAL = "empirical"


class PhiForm(Enum):
    """Forms a Young-Orlicz function can take."""

    QUADRATIC = "quadratic"
    CLOSED_FORM = "closed_form"
    NATURAL_OF = "natural_of"


class ClosedFormPhi(Enum):
    """Expression ids for PhiForm.CLOSED_FORM, with the parameters they expect."""

    QUADRATIC_SCALED = ("quadratic_scaled", ("sigma",))
    LOG_COSH = ("log_cosh", ())
    LAPLACE = ("laplace", ("scale",))

    def __init__(self, expression_id: str, parameter_names: tuple) -> None:
        self.expression_id = expression_id
        self.parameter_names = parameter_names


class PsiFamily(Enum):
    """Generating-function families."""

    POWER = "power"
    BLOWUP = "blowup"
    DEGENERATE = "degenerate"
    NATURAL = "natural"
    TABULATED = "tabulated"


class TailFamily(Enum):
    """Envelope families for fit_envelope."""

    SUBGAUSSIAN = "subgaussian"
    WEIBULL = "weibull"


class Verdict(Enum):
    """Outcome of a single verification."""

    HOLDS = "holds"
    HOLDS_WITHIN_NOISE = "holds-within-noise"
    VIOLATED = "violated"


class InequalityId(Enum):
    """The inequalities checked by mc_verify, and whether a violation fails a run."""

    NAOR_PAIR = ("naor_pair", False)
    NAOR_N = ("naor_n", False)
    POWER_LEVEL = ("power_level", False)
    SUM_LOWER_BOUND = ("sum_lower_bound", False)
    ANTI_TRIANGLE = ("anti_triangle", True)
    CHERNOFF = ("chernoff", False)
    ENVELOPE = ("envelope", False)

    def __init__(self, label: str, exempt: bool) -> None:
        self.label = label
        self.exempt = exempt


class ExitCode(Enum):
    """Exit codes of the command line front end."""

    SUCCESS = 0
    ERROR = 1
    VIOLATION = 2


class EnvironmentVariables(Enum):
    """Environment variables read by the configuration layer."""

    WORKERS = "GLS_BOUNDS_WORKERS"


class MomentProfileColumn(Enum):
    """Column mapping of the MomentProfile CSV."""

    P = (0, "p")
    VALUE = (1, "value")
    CI_HALFWIDTH = (2, "ci_halfwidth")
    PROVENANCE = (3, "provenance")

    def __init__(self, column_index: int, header: str) -> None:
        self.column_index = column_index
        self.header = header


class EnvelopeColumn(Enum):
    """Column mapping of the envelope CSV."""

    U = (0, "u")
    LOWER = (1, "lower")
    UPPER = (2, "upper")
    EMPIRICAL = (3, "empirical")
    CI_HALFWIDTH = (4, "ci_halfwidth")

    def __init__(self, column_index: int, header: str) -> None:
        self.column_index = column_index
        self.header = header


class ReportColumn(Enum):
    """Column mapping of the verification report CSV."""

    INEQUALITY = (0, "inequality")
    INSTANCE = (1, "instance")
    LHS = (2, "lhs")
    RHS = (3, "rhs")
    MARGIN = (4, "margin")
    SIGMA = (5, "sigma")
    VERDICT = (6, "verdict")
    SEED = (7, "seed")
    COUNT = (8, "count")

    def __init__(self, column_index: int, header: str) -> None:
        self.column_index = column_index
        self.header = header


def csv_header(columns: type[Enum]) -> list[str]:
    """Returns the CSV header of a column Enum in column order.

    Args:
        columns: One of the column Enums in this module.

    Returns:
        The header names.
    """
    return [column.header for column in sorted(columns, key=lambda c: c.column_index)]


# Floats are written with 17 significant digits so they round-trip bit for bit.
FLOAT_FORMAT = ".17g"

# Quadrature.
QUAD_EPSABS = 1e-10
QUAD_EPSREL = 1e-9
QUAD_LIMIT = 200

# Young-Fenchel maximizer search.
YF_LAMBDA_CAP = 100.0
YF_XTOL = 1e-10

# B(phi) norm bisection.
BPHI_TAU_CAP = 1e3
BPHI_TOLERANCE = 1e-8
BPHI_GRID_POINTS = 200
BPHI_LAMBDA_MIN = 1e-3
BPHI_LAMBDA_MAX = 20.0

# GLS p-grid.
P_GRID_POINTS = 128
P_GRID_CAP = 64.0
P_GRID_EPSILON = 1e-3
REFINEMENT_ROUNDS = 3
ANTI_NORM_DEFAULT_LOWER = 2.0

# theta_numeric z-grid, in decades around z = 1.
THETA_Z_DECADES = 6.0
THETA_Z_POINTS = 2001

# Tail envelopes.
DEFAULT_U_GRID = (1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0)
ENVELOPE_MAX_MOMENT_ORDER = 64
EXPONENT_FIT_P_RANGE = (8.0, 64.0)
EXPONENT_FIT_POINTS = 16
EXPONENT_FIT_TOLERANCE = 0.35

# Monte Carlo.
SAMPLE_BLOCK_SIZE = 65536
Z_SCORE = 3.0
EXACT_TOLERANCE = 1e-12
MAX_ENUMERATED_OUTCOMES = 2**20
DEFAULT_MC_COUNT = 1_000_000
DEFAULT_TAIL_COUNT = 10_000_000
DEFAULT_SEED = 20240101
