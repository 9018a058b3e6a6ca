"""Tests for the text formats written and read by the storage module."""

import io
import math

import numpy as np
import pytest

from gls_bounds.data_models import (
    GeneratingFunction,
    RandomVariableModel,
    SumModel,
    VerificationReport,
)
from gls_bounds.models import mc_verify, moment_engine, storage, tail_engine
from gls_bounds.models.constants import InequalityId, Provenance, TailFamily, Verdict


def example_report(inequality=InequalityId.NAOR_PAIR, verdict=Verdict.HOLDS):
    """A report with values that do not round nicely."""
    return VerificationReport(
        inequality=inequality,
        instance="rademacher+rademacher,q=4",
        lhs=2**0.75,
        rhs=2**0.25,
        sigma=0.0,
        verdict=verdict,
        seed=2**63 + 5,
        count=0,
        note="exact",
    )


def test_format_float_round_trips():
    """Tests floats are written with enough digits to read back bit for bit."""
    for value in (0.1, 1 / 3, math.pi * 1e-300, 2**0.75, math.inf):
        assert float(storage.format_float(value)) == value


def test_samples_round_trip(tmp_path):
    """Tests a sample file reads back with its header skipped."""
    values = np.array([-1.5, 0.0, 1 / 3, 2e-17])
    path = tmp_path / "nested" / "samples.txt"
    storage.write_samples(path, values, ["# seed=7", "model=gaussian"])

    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[:2] == ["# seed=7", "# model=gaussian"]
    np.testing.assert_array_equal(storage.read_samples(path), values)


def test_profile_round_trip():
    """Tests an exact profile reads back equal to itself."""
    profile = moment_engine.natural_function(RandomVariableModel.example_a(), [1.0, 2.0, 3.5, 8.0])
    handle = io.StringIO()
    storage.write_profile(handle, profile, ["# command=moments"])

    text = handle.getvalue()
    assert text.startswith("# command=moments\n")
    assert "p,value,ci_halfwidth,provenance" in text

    handle.seek(0)
    assert storage.read_profile(handle) == profile


def test_empirical_profile_keeps_halfwidths():
    """Tests CI half-widths survive only for empirical profiles."""
    values = np.linspace(-1.0, 1.0, 4096)
    profile = moment_engine.empirical_profile(values, [1.0, 2.0, 4.0], label="uniform")
    handle = io.StringIO()
    storage.write_profile(handle, profile)
    handle.seek(0)

    restored = storage.read_profile(handle)
    assert restored.provenance == Provenance.EMPIRICAL
    assert restored.ci_halfwidths == profile.ci_halfwidths
    assert restored.label == "uniform"


def test_envelope_round_trip():
    """Tests an envelope reads back with its constants and an estimate column."""
    sum_model = SumModel(RandomVariableModel.example_a(), 4)
    envelope = tail_engine.fit_envelope(sum_model, TailFamily.SUBGAUSSIAN, [1.0, 1.5, 2.0])
    estimate = mc_verify.empirical_tail(sum_model, list(envelope.u_grid), count=1000, seed=1)

    handle = io.StringIO()
    storage.write_envelope(handle, envelope, estimate, ["# command=tails"])
    handle.seek(0)
    restored, empirical = storage.read_envelope(handle)

    assert restored.u_grid == envelope.u_grid
    assert restored.lower == envelope.lower
    assert restored.upper == envelope.upper
    assert restored.constants == envelope.constants
    assert restored.family == TailFamily.SUBGAUSSIAN
    assert restored.validity == (1.0, 2.0)
    assert empirical == list(estimate.probabilities)


def test_envelope_without_estimate():
    """Tests the empirical columns stay empty without an estimate."""
    envelope = tail_engine.fit_envelope(
        SumModel(RandomVariableModel.example_a(), 4), TailFamily.SUBGAUSSIAN, [1.0, 2.0]
    )
    handle = io.StringIO()
    storage.write_envelope(handle, envelope)
    handle.seek(0)
    _, empirical = storage.read_envelope(handle)
    assert empirical == [None, None]


def test_write_reports():
    """Tests the report CSV columns and full-precision values."""
    report = example_report()
    handle = io.StringIO()
    storage.write_reports(handle, [report], ["# command=verify"])
    handle.seek(0)

    comments, rows = storage.read_csv(handle)
    assert comments == ["command=verify"]
    assert list(rows[0]) == [
        "inequality", "instance", "lhs", "rhs", "margin", "sigma", "verdict", "seed", "count"
    ]
    assert rows[0]["inequality"] == "naor_pair"
    assert float(rows[0]["lhs"]) == 2**0.75
    assert float(rows[0]["margin"]) == report.margin
    assert int(rows[0]["seed"]) == 2**63 + 5
    assert rows[0]["verdict"] == "holds"


def test_report_text():
    """Tests the one-line summary marks exempt inequalities and carries the note."""
    text = storage.report_text(example_report(InequalityId.ANTI_TRIANGLE, Verdict.VIOLATED))
    assert text.startswith("anti_triangle")
    assert "violated" in text
    assert text.endswith("(exempt) exact")


@pytest.mark.parametrize(
    "gf",
    [
        GeneratingFunction.power(2.0),
        GeneratingFunction.blowup(4.0, 0.5),
        GeneratingFunction.degenerate(3.0),
        GeneratingFunction.tabulated([1.0, 2.0, 4.0], [1.0, 1.5, math.inf]),
    ],
)
def test_generating_function_round_trip(tmp_path, gf):
    """Tests every closed-form and tabulated generating function reads back equal."""
    path = tmp_path / "psi.json"
    storage.write_generating_function(path, gf)
    assert storage.read_generating_function(path) == gf


def test_natural_generating_function_round_trip(tmp_path):
    """Tests a natural generating function keeps its profile in a sibling CSV."""
    profile = moment_engine.natural_function(RandomVariableModel.gaussian(), [1.0, 2.0, 4.0])
    gf = GeneratingFunction.natural(profile)
    path = tmp_path / "natural.json"
    storage.write_generating_function(path, gf)

    assert (tmp_path / "natural.csv").exists()
    assert storage.read_generating_function(path) == gf


def test_read_psi_table_blank_is_infinite(tmp_path):
    """Tests an empty psi cell reads as +inf."""
    path = tmp_path / "psi.csv"
    path.write_text("# hand written\np,psi\n1,1\n2,\n", encoding="utf-8")
    assert storage.read_psi_table(path) == ([1.0, 2.0], [1.0, math.inf])
