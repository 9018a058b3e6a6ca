"""Tests for model constants."""

from gls_bounds.models.constants import (
    EnvelopeColumn,
    InequalityId,
    ModelKind,
    MomentProfileColumn,
    ReportColumn,
    csv_header,
)


def test_moment_profile_column():
    """Tests the moment profile column enum."""
    assert len(MomentProfileColumn) == 4

    assert MomentProfileColumn.P.column_index == 0
    assert MomentProfileColumn.P.header == "p"
    assert csv_header(MomentProfileColumn) == ["p", "value", "ci_halfwidth", "provenance"]


def test_envelope_and_report_columns():
    """Tests the envelope and report CSV headers."""
    assert csv_header(EnvelopeColumn) == ["u", "lower", "upper", "empirical", "ci_halfwidth"]
    assert csv_header(ReportColumn)[-3:] == ["verdict", "seed", "count"]
    assert ReportColumn.MARGIN.column_index == 4


def test_inequality_id():
    """Tests only the anti-triangle inequality is exempt."""
    assert [inequality.label for inequality in InequalityId if inequality.exempt] == [
        "anti_triangle"
    ]
    assert InequalityId.SUM_LOWER_BOUND.label == "sum_lower_bound"


def test_model_kind_is_analytic():
    """Tests which kinds come with a closed-form law."""
    assert ModelKind.WEIBULL_SYM.is_analytic
    assert not ModelKind.FINITE_DISCRETE.is_analytic
    assert not ModelKind.EMPIRICAL.is_analytic
