import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from citerank import FacultyRecord, ScoredRecord, ValidationError, field_summary, qq_exponential, zscore_by_field
from citerank.stats import field_summary_csv, qq_csv


def _scored_from_norms(norm_values, field="Algebra"):
    records = []
    for i, nv in enumerate(norm_values):
        base = FacultyRecord(f"p{i:03d}", "U", field, 2010, max(0, round(nv * 10)), 2020)
        records.append(ScoredRecord(base=base, major_field=field, age=10, norm_cit=float(nv)))
    return records


def test_zscore_hand_case(make_scored):
    records = make_scored([2.0, 4.0, 6.0])
    z = [r.z for r in zscore_by_field(records)]
    assert z == pytest.approx([-1.0, 0.0, 1.0], abs=1e-12)


def test_zscore_singleton_field_is_zero(make_scored):
    records = make_scored([7.5], field="History")
    assert zscore_by_field(records)[0].z == 0.0


def test_zscore_constant_field_is_zero(make_scored):
    records = make_scored([3.0, 3.0, 3.0])
    assert [r.z for r in zscore_by_field(records)] == [0.0, 0.0, 0.0]


def test_zscore_identity_within_fields(make_scored):
    rng = np.random.default_rng(0)
    records = []
    for i, field in enumerate(["Algebra", "Geometry", "PDE"]):
        records += make_scored(rng.exponential(5, 20 + i), field=field, start=100 * i)
    scored = zscore_by_field(records)
    for field in ["Algebra", "Geometry", "PDE"]:
        z = np.array([r.z for r in scored if r.major_field == field])
        assert abs(z.mean()) < 1e-9
        assert np.std(z, ddof=1) == pytest.approx(1.0, abs=1e-9)


@given(
    values=st.lists(st.floats(min_value=0.01, max_value=1e4), min_size=2, max_size=25),
    scale=st.floats(min_value=0.01, max_value=100.0),
    shift=st.floats(min_value=-1e3, max_value=1e3),
)
@settings(max_examples=60, deadline=None)
def test_zscore_invariant_under_affine_map(values, scale, shift):
    base = zscore_by_field(_scored_from_norms(values))
    mapped = zscore_by_field(_scored_from_norms([scale * v + shift for v in values]))
    for r_base, r_mapped in zip(base, mapped):
        assert r_mapped.z == pytest.approx(r_base.z, rel=1e-6, abs=1e-7)


def test_zscore_preserves_input_order(make_scored):
    records = make_scored([5.0, 1.0], field="Algebra") + make_scored(
        [2.0, 9.0], field="Logic", start=10
    )
    scored = zscore_by_field(records)
    assert [r.base.person_id for r in scored] == [r.base.person_id for r in records]


def test_field_summary_hand_case(make_scored):
    records = make_scored([0.2, 0.4, 0.6], citations=[2, 4, 6])
    rows = field_summary(records)
    assert len(rows) == 1
    assert rows[0].count == 3
    assert rows[0].mean_cit == pytest.approx(4.0)
    assert rows[0].sd_cit == pytest.approx(2.0)
    assert rows[0].mean_norm == pytest.approx(0.4)


def test_field_summary_sorted_by_mean_norm_desc(make_scored):
    records = (
        make_scored([1.0, 1.5], field="Logic")
        + make_scored([10.0, 12.0], field="PDE", start=10)
        + make_scored([5.0], field="History", start=20)
    )
    rows = field_summary(records)
    assert [r.field for r in rows] == ["PDE", "History", "Logic"]
    assert rows[1].sd_cit == 0.0  # singleton field


def test_field_summary_empty_errors():
    with pytest.raises(ValidationError):
        field_summary([])


def test_field_summary_csv_layout(make_scored):
    rows = field_summary(make_scored([1.0, 2.0]))
    lines = field_summary_csv(rows).strip().split("\n")
    assert lines[0] == "field,count,mean_cit,sd_cit,mean_norm"
    assert len(lines) == 2


def test_qq_single_value():
    series = qq_exponential([3.0])
    assert len(series.points) == 1
    theo, emp = series.points[0]
    assert emp == 3.0
    assert theo == pytest.approx(-3.0 * math.log(0.5), abs=1e-4)
    assert series.rate_estimate == pytest.approx(1 / 3)


def test_qq_constant_values():
    series = qq_exponential([2.0, 2.0, 2.0, 2.0])
    empirical = [p[1] for p in series.points]
    theoretical = [p[0] for p in series.points]
    assert empirical == [2.0] * 4
    assert all(t2 > t1 for t1, t2 in zip(theoretical, theoretical[1:]))


def test_qq_coordinates_non_decreasing():
    rng = np.random.default_rng(1)
    series = qq_exponential(rng.exponential(2.0, 500))
    theo = [p[0] for p in series.points]
    emp = [p[1] for p in series.points]
    assert all(b >= a for a, b in zip(theo, theo[1:]))
    assert all(b >= a for a, b in zip(emp, emp[1:]))


def test_qq_true_exponential_is_near_diagonal():
    rng = np.random.default_rng(123)
    series = qq_exponential(rng.exponential(1.0, 1000))
    theo = np.array([p[0] for p in series.points])
    emp = np.array([p[1] for p in series.points])
    slope = np.polyfit(theo, emp, 1)[0]
    assert 0.9 <= slope <= 1.1


def test_qq_rejects_bad_input():
    with pytest.raises(ValidationError):
        qq_exponential([])
    with pytest.raises(ValidationError):
        qq_exponential([0.0, 0.0])
    with pytest.raises(ValidationError):
        qq_exponential([-1.0, 2.0])


def test_qq_csv_layout():
    series = qq_exponential([1.0, 2.0, 3.0])
    lines = qq_csv(series).strip().split("\n")
    assert lines[0] == "theoretical,empirical"
    assert len(lines) == 4
