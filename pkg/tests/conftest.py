import pytest

from citerank import FacultyRecord, ScoredRecord


@pytest.fixture
def make_scored():
    """Factory for ScoredRecord lists built from bare norm_cit values."""

    def _make(norm_values, field="Algebra", institution="U000", start=0, ages=None, citations=None):
        records = []
        for i, nv in enumerate(norm_values):
            age = ages[i] if ages is not None else 10
            cit = citations[i] if citations is not None else max(0, round(nv * age**1.3))
            base = FacultyRecord(
                person_id=f"{field[:3].lower()}{start + i:04d}",
                institution=institution,
                raw_field=field,
                first_pub_year=2020 - age,
                citations=cit,
                snapshot_year=2020,
            )
            records.append(
                ScoredRecord(base=base, major_field=field, age=age, norm_cit=float(nv))
            )
        return records

    return _make
