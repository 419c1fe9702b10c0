import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from citerank import (
    NormalizationConfig,
    ValidationError,
    calibrate_exponent,
    compute_age,
    normalized_citations,
    parse_corpus,
    score_corpus,
)
from citerank.normalize import calibration_csv
from citerank.synth import SynthField, SynthSpec, generate


@pytest.mark.parametrize(
    "first,snap,min_age,expected",
    [(1990, 2020, 1, 30), (2020, 2020, 1, 1), (2005, 2020, 1, 15), (2018, 2020, 5, 5)],
)
def test_compute_age(first, snap, min_age, expected):
    assert compute_age(first, snap, min_age) == expected


def test_compute_age_rejects_future_first_publication():
    with pytest.raises(ValidationError):
        compute_age(2021, 2020)


def test_normalized_citations_examples():
    assert normalized_citations(123, 1, 0.7) == 123
    assert normalized_citations(0, 5, 1.3) == 0
    assert normalized_citations(100, 10, 1.3) == pytest.approx(5.0119, abs=1e-3)


def test_normalized_citations_requires_floored_age():
    with pytest.raises(ValidationError):
        normalized_citations(10, 0, 1.3)


def test_config_validation():
    with pytest.raises(ValidationError):
        NormalizationConfig(alpha=0.0)
    with pytest.raises(ValidationError):
        NormalizationConfig(min_age=0)


@given(
    citations=st.integers(min_value=0, max_value=10**6),
    alpha=st.floats(min_value=0.1, max_value=3.0, allow_nan=False),
    age_pair=st.tuples(st.integers(1, 80), st.integers(1, 80)),
)
@settings(max_examples=60, deadline=None)
def test_norm_cit_non_increasing_in_age(citations, alpha, age_pair):
    younger, older = sorted(age_pair)
    assert normalized_citations(citations, older, alpha) <= normalized_citations(
        citations, younger, alpha
    )


def test_score_corpus_fills_fields_and_scores():
    csv_bytes = (
        b"person_id,institution,raw_field,first_pub_year,citations\n"
        b"p1,U,Partial Differential Equations,1990,300\n"
        b"p2,U,Statistics,2020,100\n"
    )
    scored = score_corpus(parse_corpus(csv_bytes, snapshot_year=2020))
    assert scored[0].major_field == "PDE"
    assert scored[0].age == 30
    assert scored[0].norm_cit == pytest.approx(300 / 30**1.3)
    # floored age: first publication in the snapshot year
    assert scored[1].age == 1
    assert scored[1].norm_cit == 100


def _exact_power_corpus(exponent, n=800, seed=5, noise=0.0):
    return generate(
        SynthSpec(
            fields=(SynthField("Algebra", n, math.log(1000.0)),),
            age_range=(1, 40),
            exponent=exponent,
            noise_sd=noise,
            seed=seed,
        )
    )


def test_calibrate_noiseless_recovers_exponent_exactly_on_grid():
    result = calibrate_exponent(_exact_power_corpus(1.3), grid=(0.5, 2.0, 0.01))
    assert result.alpha_star == pytest.approx(1.30, abs=1e-9)


def test_calibrate_noisy_recovers_exponent_approximately():
    corpus = _exact_power_corpus(1.3, n=2000, seed=11, noise=0.3)
    result = calibrate_exponent(corpus, grid=(0.5, 2.0, 0.01))
    assert 1.25 <= result.alpha_star <= 1.35


def test_calibrate_scale_equivariance():
    corpus = _exact_power_corpus(1.3, n=400, seed=7, noise=0.2)
    doubled = parse_corpus(
        (
            "person_id,institution,raw_field,first_pub_year,citations\n"
            + "".join(
                f"{r.person_id},{r.institution},{r.raw_field},{r.first_pub_year},{2 * r.citations}\n"
                for r in corpus.records
            )
        ).encode(),
        snapshot_year=corpus.snapshot_year,
    )
    grid = (1.0, 1.6, 0.05)
    assert calibrate_exponent(corpus, grid).alpha_star == calibrate_exponent(doubled, grid).alpha_star


def test_calibrate_is_deterministic():
    corpus = _exact_power_corpus(1.3, n=300, seed=3, noise=0.4)
    grid = (1.0, 1.6, 0.1)
    first = calibrate_exponent(corpus, grid)
    second = calibrate_exponent(corpus, grid)
    assert first == second


def test_calibrate_zero_age_variance_errors():
    corpus = _exact_power_corpus(1.3, n=50, seed=1)
    frozen = parse_corpus(
        (
            "person_id,institution,raw_field,first_pub_year,citations\n"
            + "".join(
                f"{r.person_id},{r.institution},{r.raw_field},2000,{r.citations}\n"
                for r in corpus.records
            )
        ).encode(),
        snapshot_year=2020,
    )
    with pytest.raises(ValidationError, match="age has zero variance"):
        calibrate_exponent(frozen, grid=(1.0, 1.5, 0.1))


def test_calibrate_grid_validation():
    corpus = _exact_power_corpus(1.3, n=50, seed=1)
    with pytest.raises(ValidationError):
        calibrate_exponent(corpus, grid=(0.0, 1.0, 0.1))
    with pytest.raises(ValidationError):
        calibrate_exponent(corpus, grid=(1.0, 0.5, 0.1))
    with pytest.raises(ValidationError):
        calibrate_exponent(corpus, grid=(1.0, 1.5, 0.0))


def test_calibration_csv_layout():
    result = calibrate_exponent(_exact_power_corpus(1.3, n=100, seed=2), grid=(1.2, 1.4, 0.1))
    lines = calibration_csv(result).strip().split("\n")
    assert lines[0] == "alpha,slope,stderr,t,p"
    assert len(lines) == 1 + len(result.diagnostics)
    assert len(result.diagnostics) == 3
