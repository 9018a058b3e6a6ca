"""Code that controls a GLS Bounds run. Think of turning a validated RunConfig into models,
calling the computations of the subcommand and writing the tables it produces."""

from __future__ import annotations

import contextlib
import logging
import math
import sys
from pathlib import Path
from typing import IO, Iterable, Iterator

from . import config as run_config
from .data_models import GeneratingFunction, MomentProfile, PhiFunction, RunConfig, SumModel
from .models import (
    gls_calculus,
    mc_verify,
    moment_engine,
    storage,
    tail_engine,
)
from .models.constants import (
    DEFAULT_U_GRID,
    EnvelopeColumn,
    ExitCode,
    Normalization,
    TailFamily,
    csv_header,
)
from .models.history_storage import ReportHistory

logger = logging.getLogger(__name__)

RATIO_CURVE_HEADER = ["p", "norm", "psi", "ratio"]
QUANTITY_HEADER = ["quantity", "value", "p"]
THETA_HEADER = ["p", "q", "theta_closed", "theta_numeric"]
BOUND_HEADER = ["p", "kappa", "bound"]


class BoundsController:
    """Runs one subcommand of GLS Bounds from a validated RunConfig."""

    def __init__(self, config: RunConfig, stdout: IO[str] | None = None) -> None:
        self.config = config
        self.stdout = stdout or sys.stdout
        self.header_lines = run_config.config_header(config)

    def run(self) -> ExitCode:
        """Runs the configured subcommand.

        Returns:
            The exit code of the run.
        """
        logger.info("Running %s", self.config.command)
        commands = {
            "moments": self.run_moments,
            "glsnorm": self.run_glsnorm,
            "antinorm": self.run_antinorm,
            "theta": self.run_theta,
            "bound": self.run_bound,
            "tails": self.run_tails,
            "verify": self.run_verify,
        }
        return commands[self.config.command]()

    @contextlib.contextmanager
    def open_output(self) -> Iterator[IO[str]]:
        """Yields the output file of the run, or stdout when none is configured."""
        if not self.config.output:
            yield self.stdout
            return

        path = Path(self.config.output)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as handle:
            yield handle
        logger.info("Wrote %s", path)

    def write_table(self, header: list[str], rows: Iterable[Iterable]) -> None:
        """Writes a CSV table with the config header to the run output."""
        with self.open_output() as handle:
            storage.write_csv(handle, header, rows, self.header_lines)

    def say(self, line: str) -> None:
        """Writes one human readable summary line to stdout."""
        self.stdout.write(line + "\n")

    def emit_plot_data(self, name: str, header: list[str], rows: Iterable[Iterable]) -> Path | None:
        """Writes a plot-ready CSV into the plot directory, when one is configured.

        Args:
            name: File name inside the plot directory.
            header: Column names.
            rows: Table rows.

        Returns:
            The written path, or None without a plot directory.
        """
        if not self.config.plot_dir:
            return None
        path = Path(self.config.plot_dir) / name
        storage.write_csv_file(path, header, rows, [*self.header_lines, f"# columns={','.join(header)}"])
        logger.info("Wrote plot data %s", path)
        return path

    def emit_psi(self, psi: GeneratingFunction) -> Path | None:
        """Saves the generating function as `psi.json` in the plot directory, for `--psi file:`."""
        if not self.config.plot_dir:
            return None
        path = Path(self.config.plot_dir) / "psi.json"
        storage.write_generating_function(path, psi)
        logger.info("Wrote generating function %s", path)
        return path

    def model_profile(self, grid: list[float]) -> MomentProfile:
        """The natural function of the configured model on a grid."""
        model = run_config.build_model(self.config.model)
        return moment_engine.natural_function(
            model,
            grid,
            epsabs=self.config.quad_epsabs,
            epsrel=self.config.quad_epsrel,
            count=self.config.count,
            seed=self.config.seed,
            workers=self.config.workers,
        )

    def profile_grid(self) -> list[float]:
        """The configured p-grid, default the standard grid below the psi endpoint."""
        grid = run_config.parse_grid(self.config.p_grid)
        if grid is not None:
            return grid
        return gls_calculus.default_p_grid(run_config.psi_upper_end(self.config.psi))

    def run_moments(self) -> ExitCode:
        """Tabulates the natural function of the model."""
        profile = self.model_profile(self.profile_grid())
        with self.open_output() as handle:
            storage.write_profile(handle, profile, self.header_lines)
        self.say(f"{profile.label}: {len(profile.grid)} orders, provenance {profile.provenance.value}")
        return ExitCode.SUCCESS

    def run_glsnorm(self) -> ExitCode:
        """Computes the GLS norm of the model."""
        profile = self.model_profile(self.profile_grid())
        psi = run_config.build_psi(self.config.psi, profile)
        self.emit_psi(psi)
        value = gls_calculus.gls_norm(profile, psi)
        self.write_table(QUANTITY_HEADER, [["gls_norm", value, ""]])
        self.emit_plot_data("ratio_curve.csv", RATIO_CURVE_HEADER, gls_calculus.ratio_curve(profile, psi))
        self.say(f"norm={value:.6f}")
        return ExitCode.SUCCESS

    def run_antinorm(self) -> ExitCode:
        """Computes the anti-norm of the model."""
        profile = self.model_profile(self.profile_grid())
        psi = run_config.build_psi(self.config.psi, profile)
        self.emit_psi(psi)
        result = gls_calculus.anti_norm(
            profile, psi, run_config.parse_range(self.config.p_range), self.config.widen
        )
        self.write_table(QUANTITY_HEADER, [["anti_norm", result.value, result.argmin_p]])
        self.emit_plot_data("ratio_curve.csv", RATIO_CURVE_HEADER, gls_calculus.ratio_curve(profile, psi))
        self.say(f"V={result.value:.6f}")
        return ExitCode.SUCCESS

    def run_theta(self) -> ExitCode:
        """Tabulates theta(p, q) in closed form next to its numerical infimum."""
        rows = [
            [p, q, gls_calculus.theta_closed(p, q), gls_calculus.theta_numeric(p, q)]
            for p in run_config.parse_reals(self.config.p)
            for q in run_config.parse_reals(self.config.q)
        ]
        self.write_table(THETA_HEADER, rows)
        for p, q, closed, numeric in rows:
            self.say(f"theta({p:g},{q:g})={closed:.10f} numeric={numeric:.10f}")
        return ExitCode.SUCCESS

    def run_bound(self) -> ExitCode:
        """Tabulates the anti-norm lower bound for a sum over the requested exponents."""
        v = run_config.parse_reals(self.config.v)
        b = run_config.parse_real(self.config.b)
        exponents = run_config.parse_reals(self.config.p)

        rows = [[p, self.kappa_or_inf(b, p), gls_calculus.sum_anti_norm_lower(v, b, p)] for p in exponents]
        self.write_table(BOUND_HEADER, rows)

        curve_grid = run_config.parse_grid(self.config.p_grid) or gls_calculus.default_p_grid()
        self.emit_plot_data(
            "bound_curve.csv",
            BOUND_HEADER,
            ([p, self.kappa_or_inf(b, p), gls_calculus.sum_anti_norm_lower(v, b, p)] for p in curve_grid),
        )

        best_p, _, best = max(rows, key=lambda row: row[2])
        self.say(f"bound={best:.6f} at p={best_p:g}")
        overall, overall_p = gls_calculus.best_sum_anti_norm_lower(v, b)
        self.say(f"best over the default p-grid: {overall:.6f} at p={overall_p:g}")
        return ExitCode.SUCCESS

    @staticmethod
    def kappa_or_inf(b: float, p: float) -> float:
        """kappa_b(p), with its p = inf limit min(1, 2^(1/b))."""
        if math.isinf(p):
            return min(1.0, 2.0 ** (1 / b))
        return gls_calculus.kappa(b, p)

    def run_tails(self) -> ExitCode:
        """Fits a tail envelope to the normalized sum of the model and compares it with Monte Carlo."""
        base = run_config.build_model(self.config.model)
        sum_model = SumModel(base, self.config.n, Normalization.INV_SQRT_N)
        family, m = run_config.parse_family(self.config.family)
        u_grid = run_config.parse_grid(self.config.u_grid) or list(DEFAULT_U_GRID)

        envelope = tail_engine.fit_envelope(sum_model, family, u_grid, m)
        estimate = mc_verify.empirical_tail(
            sum_model, u_grid, self.config.tail_count, self.config.seed, self.config.workers
        )
        header_lines = list(self.header_lines)
        if family == TailFamily.SUBGAUSSIAN:
            norm = moment_engine.bphi_norm(
                base, PhiFunction.quadratic(), tolerance=self.config.bisection_tol
            ).value
            header_lines.append(f"# subgaussian_norm={storage.format_float(norm)}")
            self.say(f"subgaussian norm of {base.label}: {norm:.6f}")

        with self.open_output() as handle:
            storage.write_envelope(handle, envelope, estimate, header_lines)

        self.emit_plot_data(
            "envelope.csv",
            csv_header(EnvelopeColumn),
            zip(u_grid, envelope.lower, envelope.upper, estimate.probabilities, estimate.halfwidths),
        )
        self.say(
            f"exponent={envelope.exponent:g} C_upper={envelope.c_upper:.6g} "
            f"C_lower={envelope.c_lower:.6g}"
        )
        return ExitCode.SUCCESS

    def run_verify(self) -> ExitCode:
        """Runs the verification suite and reports violations of non-exempt inequalities."""
        settings = mc_verify.SuiteSettings(
            count=self.config.count,
            tail_count=self.config.tail_count,
            seed=self.config.seed,
            workers=self.config.workers,
        )
        reports = mc_verify.run_suite(settings)

        with self.open_output() as handle:
            storage.write_reports(handle, reports, self.header_lines)
        for report in reports:
            self.say(storage.report_text(report))

        if self.config.history:
            with contextlib.closing(ReportHistory(Path(self.config.history))) as history:
                history.store_reports(reports)

        failures = [report for report in reports if report.fails_run]
        if failures:
            logger.error("%d inequalities violated", len(failures))
            return ExitCode.VIOLATION
        return ExitCode.SUCCESS
