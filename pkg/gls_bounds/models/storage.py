"""Reading and writing the plain text formats: sample files, moment profile, envelope, report and
plot-data CSVs, and generating-function descriptions.

Every writer takes the `# key=value` header lines of the run that produced the data; readers skip
all `#` lines. Floats are written with FLOAT_FORMAT so they read back bit for bit."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from gls_bounds.data_models import (
    GeneratingFunction,
    MomentProfile,
    TailEnvelope,
    TailEstimate,
    VerificationReport,
)
from gls_bounds.models.constants import (
    FLOAT_FORMAT,
    EnvelopeColumn,
    MomentProfileColumn,
    Provenance,
    PsiFamily,
    ReportColumn,
    TailFamily,
    csv_header,
)

logger = logging.getLogger(__name__)


def format_float(value: float) -> str:
    """Formats a float so that float(text) returns the same value."""
    return format(value, FLOAT_FORMAT)


def comment_lines(handle: IO[str]) -> tuple[list[str], list[str]]:
    """Splits a text stream into `#` comment lines (without the `#`) and data lines."""
    comments, data = [], []
    for line in handle:
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            comments.append(stripped[1:].strip())
        else:
            data.append(stripped)
    return comments, data


def write_header(handle: IO[str], header_lines: Iterable[str]) -> None:
    """Writes header lines, adding the `# ` prefix where missing."""
    for line in header_lines:
        handle.write(line if line.startswith("#") else f"# {line}")
        handle.write("\n")


def write_samples(path: Path, values: np.ndarray, header_lines: Iterable[str] = ()) -> None:
    """Writes one value per line.

    Args:
        path: Target file.
        values: The sample.
        header_lines: Comment lines to put first.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        write_header(handle, header_lines)
        for value in values:
            handle.write(format_float(float(value)))
            handle.write("\n")
    logger.debug("Wrote %d samples to %s", len(values), path)


def read_samples(path: Path) -> np.ndarray:
    """Reads a sample file.

    Args:
        path: The file.

    Returns:
        The values in file order.
    """
    with path.open(encoding="utf-8") as handle:
        _, data = comment_lines(handle)
    return np.array([float(line) for line in data], dtype=float)


def write_csv(
    handle: IO[str],
    header: list[str],
    rows: Iterable[Iterable],
    header_lines: Iterable[str] = (),
) -> None:
    """Writes comment lines, a CSV header and rows. Floats use FLOAT_FORMAT."""
    write_header(handle, header_lines)
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(cell) if isinstance(cell, float) else cell for cell in row])


def read_csv(handle: IO[str]) -> tuple[list[str], list[dict[str, str]]]:
    """Reads comment lines and dictionary rows of a CSV written by write_csv."""
    comments, data = comment_lines(handle)
    return comments, list(csv.DictReader(io.StringIO("\n".join(data))))


def write_csv_file(
    path: Path, header: list[str], rows: Iterable[Iterable], header_lines: Iterable[str] = ()
) -> None:
    """write_csv into a file, creating parent folders."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        write_csv(handle, header, rows, header_lines)
    logger.debug("Wrote %s", path)


def profile_rows(profile: MomentProfile) -> list[list]:
    """Rows of the moment profile CSV."""
    return [
        [p, value, halfwidth, profile.provenance.value]
        for p, value, halfwidth in zip(profile.grid, profile.values, profile.halfwidths)
    ]


def write_profile(
    handle: IO[str], profile: MomentProfile, header_lines: Iterable[str] = ()
) -> None:
    """Writes a MomentProfile as `p,value,ci_halfwidth,provenance`."""
    lines = [*header_lines, f"label={profile.label}", f"b={format_float(profile.b)}"]
    write_csv(handle, csv_header(MomentProfileColumn), profile_rows(profile), lines)


def read_profile(handle: IO[str]) -> MomentProfile:
    """Reads a MomentProfile written by write_profile."""
    comments, rows = read_csv(handle)
    metadata = dict(line.split("=", 1) for line in comments if "=" in line)
    halfwidths = tuple(float(row[MomentProfileColumn.CI_HALFWIDTH.header]) for row in rows)
    provenance = Provenance(rows[0][MomentProfileColumn.PROVENANCE.header])
    return MomentProfile(
        grid=tuple(float(row[MomentProfileColumn.P.header]) for row in rows),
        values=tuple(float(row[MomentProfileColumn.VALUE.header]) for row in rows),
        provenance=provenance,
        ci_halfwidths=halfwidths if provenance == Provenance.EMPIRICAL else (),
        b=float(metadata.get("b", "inf")),
        label=metadata.get("label", ""),
    )


def constants_line(envelope: TailEnvelope) -> str:
    """The `C_upper=…, C_lower=…, exponent=…` comment line of an envelope."""
    names = ["C_upper", "C_lower", "exponent"]
    names += sorted(name for name in envelope.constants if name not in names)
    return ", ".join(f"{name}={format_float(envelope.constants[name])}" for name in names)


def write_envelope(
    handle: IO[str],
    envelope: TailEnvelope,
    estimate: TailEstimate | None = None,
    header_lines: Iterable[str] = (),
) -> None:
    """Writes an envelope as `u,lower,upper,empirical,ci_halfwidth`.

    The empirical columns are left empty without an estimate.
    """
    lines = [
        *header_lines,
        constants_line(envelope),
        f"family={envelope.family.value}",
        f"validity={format_float(envelope.validity[0])},{format_float(envelope.validity[1])}",
    ]
    rows = []
    for index, u in enumerate(envelope.u_grid):
        empirical = estimate.probabilities[index] if estimate else ""
        halfwidth = estimate.halfwidths[index] if estimate else ""
        rows.append([u, envelope.lower[index], envelope.upper[index], empirical, halfwidth])
    write_csv(handle, csv_header(EnvelopeColumn), rows, lines)


def read_envelope(handle: IO[str]) -> tuple[TailEnvelope, list[float | None]]:
    """Reads an envelope CSV back.

    Returns:
        The envelope, without raw curves, and the empirical column (None where empty).
    """
    comments, rows = read_csv(handle)
    constants: dict[str, float] = {}
    metadata: dict[str, str] = {}
    for line in comments:
        if line.startswith("C_upper="):
            for item in line.split(", "):
                name, value = item.split("=", 1)
                constants[name] = float(value)
        elif "=" in line:
            name, value = line.split("=", 1)
            metadata[name] = value

    validity = tuple(float(value) for value in metadata["validity"].split(","))
    envelope = TailEnvelope(
        u_grid=tuple(float(row[EnvelopeColumn.U.header]) for row in rows),
        lower=tuple(float(row[EnvelopeColumn.LOWER.header]) for row in rows),
        upper=tuple(float(row[EnvelopeColumn.UPPER.header]) for row in rows),
        constants=constants,
        exponent=constants["exponent"],
        family=TailFamily(metadata["family"]),
        validity=validity,
    )
    empirical = [
        float(row[EnvelopeColumn.EMPIRICAL.header]) if row[EnvelopeColumn.EMPIRICAL.header] else None
        for row in rows
    ]
    return envelope, empirical


def report_row(report: VerificationReport) -> list:
    """One row of the report CSV."""
    return [
        report.inequality.label,
        report.instance,
        report.lhs,
        report.rhs,
        report.margin,
        report.sigma,
        report.verdict.value,
        report.seed,
        report.count,
    ]


def write_reports(
    handle: IO[str], reports: list[VerificationReport], header_lines: Iterable[str] = ()
) -> None:
    """Writes reports as `inequality,instance,lhs,rhs,margin,sigma,verdict,seed,count`."""
    write_csv(handle, csv_header(ReportColumn), [report_row(r) for r in reports], header_lines)


def report_text(report: VerificationReport) -> str:
    """A one-line human readable summary of a report."""
    text = (
        f"{report.inequality.label:<14} {report.verdict.value:<18} "
        f"lhs={report.lhs:.6g} rhs={report.rhs:.6g} margin={report.margin:+.3g} "
        f"sigma={report.sigma:.2g} [{report.instance}]"
    )
    if report.inequality.exempt:
        text += " (exempt)"
    if report.note:
        text += f" {report.note}"
    return text


def write_generating_function(path: Path, gf: GeneratingFunction) -> None:
    """Writes a generating function as JSON, tabulated parts into a sibling CSV.

    Args:
        path: Target `.json` file.
        gf: The generating function.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    description: dict = {"family": gf.family.value, "b": format_float(gf.b)}
    if gf.family == PsiFamily.POWER:
        description["m"] = format_float(gf.m)
    elif gf.family == PsiFamily.BLOWUP:
        description["beta"] = format_float(gf.beta)
    elif gf.family == PsiFamily.DEGENERATE:
        description["r"] = format_float(gf.r)
    elif gf.family == PsiFamily.NATURAL:
        table_path = path.with_suffix(".csv")
        with table_path.open("w", encoding="utf-8", newline="") as handle:
            write_profile(handle, gf.profile)
        description["profile"] = table_path.name
    else:
        table_path = path.with_suffix(".csv")
        write_csv_file(table_path, ["p", "psi"], zip(gf.grid, gf.values))
        description["table"] = table_path.name

    path.write_text(json.dumps(description, indent=2) + "\n", encoding="utf-8")


def read_generating_function(path: Path) -> GeneratingFunction:
    """Reads a generating function written by write_generating_function."""
    description = json.loads(path.read_text(encoding="utf-8"))
    family = PsiFamily(description["family"])
    b = float(description["b"])

    if family == PsiFamily.POWER:
        return GeneratingFunction.power(float(description["m"]))
    if family == PsiFamily.BLOWUP:
        return GeneratingFunction.blowup(b, float(description["beta"]))
    if family == PsiFamily.DEGENERATE:
        return GeneratingFunction(PsiFamily.DEGENERATE, b=b, r=float(description["r"]))
    if family == PsiFamily.NATURAL:
        with (path.parent / description["profile"]).open(encoding="utf-8") as handle:
            return GeneratingFunction.natural(read_profile(handle))
    grid, values = read_psi_table(path.parent / description["table"])
    return GeneratingFunction.tabulated(grid, values, b)


def read_psi_table(path: Path) -> tuple[list[float], list[float]]:
    """Reads a `p,psi` table, as used by `tabulated:PATH` psi specs."""
    with path.open(encoding="utf-8") as handle:
        _, rows = read_csv(handle)
    grid = [float(row["p"]) for row in rows]
    values = [float(row["psi"]) if row["psi"] else math.inf for row in rows]
    return grid, values
