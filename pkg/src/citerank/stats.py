"""Statistics engine: OLS with and without a field factor, AIC model comparison,
per-field summaries, one-sided two-sample permutation tests, exponential QQ
data, and interfield z-scores."""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import tdist
from .errors import ValidationError
from .normalize import ScoredRecord

DEFAULT_N_PERM = 100_000
DEFAULT_EXACT_THRESHOLD = 100_000

FACTORED_FORMULAS = ("age_and_field", "field_only", "age_only")

# permutation chunking: rows per Monte Carlo block, sized so one block of
# uniform keys stays around 32 MB regardless of sample size
_MC_BLOCK_CELLS = 4_000_000


@dataclass(frozen=True)
class RegressionFit:
    """A least-squares fit with classical inference and Gaussian AIC."""

    names: tuple[str, ...]
    estimates: tuple[float, ...]
    standard_errors: tuple[float, ...]
    t_stats: tuple[float, ...]
    p_values: tuple[float, ...]
    ci95: tuple[tuple[float, float], ...]
    r_squared: float
    rss: float
    n: int
    k: int
    log_likelihood: float
    aic: float

    def coefficient(self, name: str) -> float:
        return self.estimates[self.names.index(name)]


@dataclass(frozen=True)
class FieldStats:
    field: str
    count: int
    mean_cit: float
    sd_cit: float
    mean_norm: float


@dataclass(frozen=True)
class PermutationResult:
    """One-sided two-sample test of mean(a) > mean(b) by label shuffling."""

    field_a: str
    field_b: str
    t_obs: float
    p_value: float
    n_perm: int
    seed: int
    exact: bool

    @property
    def inconclusive(self) -> bool:
        return self.p_value > 0.05


@dataclass(frozen=True)
class QQSeries:
    """Paired (theoretical, empirical) quantiles against an exponential fit."""

    points: tuple[tuple[float, float], ...]
    rate_estimate: float


# ---------------------------------------------------------------------------
# least squares


def _check_finite(name: str, arr: np.ndarray) -> None:
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")


def _collinear_columns(X: np.ndarray, names: Sequence[str], tol: float = 1e-10) -> list[str]:
    """Names of columns (in order) that are numerically dependent on earlier ones.

    Sequential Gram-Schmidt with one re-orthogonalization pass; a column whose
    residual norm falls below tol times its original norm adds no new direction.
    """
    basis: list[np.ndarray] = []
    dependent: list[str] = []
    for j in range(X.shape[1]):
        v = X[:, j].astype(float).copy()
        norm0 = float(np.linalg.norm(v))
        if norm0 == 0.0:
            dependent.append(names[j])
            continue
        for _ in range(2):
            for q in basis:
                v -= (q @ v) * q
        norm = float(np.linalg.norm(v))
        if norm <= tol * norm0:
            dependent.append(names[j])
        else:
            basis.append(v / norm)
    return dependent


def _fit_least_squares(X: np.ndarray, y: np.ndarray, names: Sequence[str]) -> RegressionFit:
    n, k = X.shape
    if n <= k:
        raise ValidationError(f"need more observations than coefficients (n={n}, k={k})")
    dependent = _collinear_columns(X, names)
    if dependent:
        raise ValidationError("rank-deficient design; collinear columns: " + ", ".join(dependent))

    q, r = np.linalg.qr(X)
    beta = np.linalg.solve(r, q.T @ y)
    resid = y - X @ beta
    rss = float(resid @ resid)
    dof = n - k
    sigma2 = rss / dof
    r_inv = np.linalg.inv(r)
    cov = sigma2 * (r_inv @ r_inv.T)
    se = np.sqrt(np.maximum(np.diag(cov), 0.0))

    t_stats: list[float] = []
    p_values: list[float] = []
    for est, s in zip(beta, se):
        if s == 0.0:
            t = 0.0 if est == 0.0 else math.copysign(math.inf, est)
        else:
            t = float(est / s)
        t_stats.append(t)
        p_values.append(tdist.two_sided_p(t, dof))
    t_crit = tdist.ppf(0.975, dof)
    ci95 = tuple(
        (float(est - t_crit * s), float(est + t_crit * s)) for est, s in zip(beta, se)
    )

    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot > 0.0:
        r_squared = max(0.0, 1.0 - rss / ss_tot)
    else:
        r_squared = 1.0 if rss == 0.0 else 0.0

    if rss > 0.0:
        log_lik = -0.5 * n * (math.log(2.0 * math.pi) + math.log(rss / n) + 1.0)
    else:
        log_lik = math.inf
    aic = -2.0 * log_lik + 2.0 * (k + 1)

    return RegressionFit(
        names=tuple(names),
        estimates=tuple(float(b) for b in beta),
        standard_errors=tuple(float(s) for s in se),
        t_stats=tuple(t_stats),
        p_values=tuple(p_values),
        ci95=ci95,
        r_squared=float(r_squared),
        rss=rss,
        n=int(n),
        k=int(k),
        log_likelihood=float(log_lik),
        aic=float(aic),
    )


def simple_ols(x: Sequence[float], y: Sequence[float]) -> RegressionFit:
    """Simple linear regression y = intercept + slope * x with Student-t inference."""
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise ValidationError("x and y must be one-dimensional and the same length")
    if xa.size < 3:
        raise ValidationError(f"need at least 3 observations, got {xa.size}")
    _check_finite("x", xa)
    _check_finite("y", ya)
    if np.ptp(xa) == 0.0:
        raise ValidationError("x has zero variance")
    X = np.column_stack([np.ones_like(xa), xa])
    return _fit_least_squares(X, ya, ("intercept", "slope"))


def factored_ols(
    records: Sequence[ScoredRecord],
    formula: str,
    response: str = "log1p",
) -> RegressionFit:
    """Fit one of the nested log-citation models.

    Parameters
    ----------
    records : scored records carrying age, major_field, and base citations.
    formula : "age_and_field", "field_only", or "age_only".
    response : "log1p" regresses log(citations + 1); "log" regresses
        log(citations) and drops zero-citation records first.

    The field factor is treatment-coded against the alphabetically first
    field present; AIC counts the error variance as an estimated parameter.
    """
    if formula not in FACTORED_FORMULAS:
        raise ValidationError(f"formula must be one of {FACTORED_FORMULAS}, got {formula!r}")
    if response not in ("log1p", "log"):
        raise ValidationError(f"response must be 'log1p' or 'log', got {response!r}")
    recs = list(records)
    if response == "log":
        recs = [r for r in recs if r.base.citations > 0]
    if not recs:
        raise ValidationError("no records to fit")

    cit = np.array([r.base.citations for r in recs], dtype=float)
    y = np.log1p(cit) if response == "log1p" else np.log(cit)
    age = np.array([r.age for r in recs], dtype=float)

    columns: list[np.ndarray] = [np.ones(len(recs))]
    names: list[str] = ["intercept"]
    if formula in ("age_and_field", "age_only"):
        columns.append(age)
        names.append("age")
    if formula in ("age_and_field", "field_only"):
        levels = sorted({r.major_field for r in recs})
        if len(levels) < 2:
            raise ValidationError("field factor needs at least 2 fields present")
        fields = [r.major_field for r in recs]
        for level in levels[1:]:
            columns.append(np.array([1.0 if f == level else 0.0 for f in fields]))
            names.append(f"field[{level}]")
    X = np.column_stack(columns)
    return _fit_least_squares(X, y, names)


# ---------------------------------------------------------------------------
# per-field summaries and z-scores


def _by_field(records: Sequence[ScoredRecord]) -> dict[str, list[ScoredRecord]]:
    groups: dict[str, list[ScoredRecord]] = {}
    for rec in records:
        groups.setdefault(rec.major_field, []).append(rec)
    return groups


def field_summary(records: Sequence[ScoredRecord]) -> tuple[FieldStats, ...]:
    """One row per field present, sorted by mean normalized citations, descending."""
    if not records:
        raise ValidationError("no records to summarize")
    rows = []
    for fname, members in _by_field(records).items():
        cit = np.array([m.base.citations for m in members], dtype=float)
        norm = np.array([m.norm_cit for m in members], dtype=float)
        sd = float(np.std(cit, ddof=1)) if len(members) >= 2 else 0.0
        rows.append(
            FieldStats(
                field=fname,
                count=len(members),
                mean_cit=float(cit.mean()),
                sd_cit=sd,
                mean_norm=float(norm.mean()),
            )
        )
    return tuple(sorted(rows, key=lambda s: (-s.mean_norm, s.field)))


def zscore_by_field(records: Sequence[ScoredRecord]) -> tuple[ScoredRecord, ...]:
    """Fill each record's z with its within-field standardized norm_cit.

    Fields with a single member or zero spread get z = 0 for all members.
    Input order is preserved.
    """
    if not records:
        raise ValidationError("no records to standardize")
    stats: dict[str, tuple[float, float]] = {}
    for fname, members in _by_field(records).items():
        norm = np.array([m.norm_cit for m in members], dtype=float)
        if len(members) < 2:
            stats[fname] = (0.0, 0.0)
            continue
        stats[fname] = (float(norm.mean()), float(np.std(norm, ddof=1)))
    out = []
    for rec in records:
        mean, sd = stats[rec.major_field]
        z = 0.0 if sd == 0.0 else (rec.norm_cit - mean) / sd
        out.append(replace(rec, z=float(z)))
    return tuple(out)


# ---------------------------------------------------------------------------
# permutation tests


def _derive_pair_seed(master_seed: int, field_a: str, field_b: str) -> int:
    payload = f"{master_seed}\x1f{field_a}\x1f{field_b}".encode("utf-8")
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")


def _stat_from_side(sk: float, total: float, na: int, nb: int, side_is_a: bool) -> float:
    if side_is_a:
        return sk / na - (total - sk) / nb
    return (total - sk) / na - sk / nb


def _exact_count(
    pooled: list[float], na: int, nb: int, t_obs: float, side_is_a: bool
) -> tuple[int, int]:
    # enumerate assignments of the smaller group; fsum keeps subset sums
    # order-independent so the identity assignment ties t_obs exactly
    total = math.fsum(pooled)
    n = na + nb
    k = na if side_is_a else nb
    count = 0
    n_assignments = 0
    for combo in itertools.combinations(range(n), k):
        sk = math.fsum(pooled[i] for i in combo)
        if _stat_from_side(sk, total, na, nb, side_is_a) >= t_obs:
            count += 1
        n_assignments += 1
    return count, n_assignments


def _mc_count(
    pooled: np.ndarray,
    na: int,
    nb: int,
    side_is_a: bool,
    n_perm: int,
    rng: np.random.Generator,
) -> int:
    n = pooled.size
    total = float(math.fsum(pooled.tolist()))
    k = na if side_is_a else nb

    def stats_for(subset_sums: np.ndarray) -> np.ndarray:
        if side_is_a:
            return subset_sums / na - (total - subset_sums) / nb
        return (total - subset_sums) / na - subset_sums / nb

    # threshold computed through the very same gather-and-sum path as the
    # permuted statistics, so tied assignments (the identity one above all)
    # compare equal bit for bit
    identity = np.arange(0, k) if side_is_a else np.arange(na, n)
    t_threshold = float(stats_for(pooled[identity[None, :]].sum(axis=1))[0])

    block = max(1, _MC_BLOCK_CELLS // n)
    count = 0
    remaining = n_perm
    while remaining > 0:
        m = min(block, remaining)
        keys = rng.random((m, n))
        idx = np.argpartition(keys, k - 1, axis=1)[:, :k]
        idx.sort(axis=1)  # canonical order: equal subsets sum identically
        t = stats_for(pooled[idx].sum(axis=1))
        count += int(np.count_nonzero(t >= t_threshold))
        remaining -= m
    return count


def permutation_test(
    a: Sequence[float],
    b: Sequence[float],
    n_perm: int = DEFAULT_N_PERM,
    seed: int = 0,
    exact_threshold: int = DEFAULT_EXACT_THRESHOLD,
    field_a: str = "a",
    field_b: str = "b",
) -> PermutationResult:
    """One-sided two-sample permutation test of mean(a) > mean(b).

    The statistic is T = mean(a) - mean(b). When the number of distinct label
    assignments C(|a|+|b|, |a|) is at most ``exact_threshold`` the null
    distribution is enumerated fully and the exact tail fraction is reported;
    otherwise ``n_perm`` seeded random assignments are drawn and the add-one
    estimate (1 + #{T_perm >= T_obs}) / (n_perm + 1) is reported, which never
    returns zero.
    """
    av = sorted(float(v) for v in a)
    bv = sorted(float(v) for v in b)
    if not av or not bv:
        raise ValidationError("both samples must be non-empty")
    if n_perm < 1:
        raise ValidationError(f"n_perm must be at least 1, got {n_perm}")
    # canonical value order makes the Monte Carlo draw depend only on the
    # multisets, not on how the caller happened to order the records
    pooled = av + bv
    if not all(math.isfinite(v) for v in pooled):
        raise ValidationError("samples contain non-finite values")
    na, nb = len(av), len(bv)
    total = math.fsum(pooled)
    # work on the smaller group's sum; it determines the statistic
    side_is_a = na <= nb
    sk_obs = math.fsum(av) if side_is_a else math.fsum(bv)
    t_obs = _stat_from_side(sk_obs, total, na, nb, side_is_a)

    if math.comb(na + nb, na) <= exact_threshold:
        count, n_assignments = _exact_count(pooled, na, nb, t_obs, side_is_a)
        return PermutationResult(
            field_a=field_a,
            field_b=field_b,
            t_obs=float(t_obs),
            p_value=count / n_assignments,
            n_perm=n_assignments,
            seed=seed,
            exact=True,
        )

    rng = np.random.default_rng(seed)
    count = _mc_count(np.asarray(pooled), na, nb, side_is_a, n_perm, rng)
    return PermutationResult(
        field_a=field_a,
        field_b=field_b,
        t_obs=float(t_obs),
        p_value=(1 + count) / (n_perm + 1),
        n_perm=n_perm,
        seed=seed,
        exact=False,
    )


def all_pairwise_tests(
    records: Sequence[ScoredRecord],
    n_perm: int = DEFAULT_N_PERM,
    seed: int = 0,
    exact_threshold: int = DEFAULT_EXACT_THRESHOLD,
) -> tuple[PermutationResult, ...]:
    """Test every ordered field pair (A, B) with mean_norm(A) >= mean_norm(B).

    Per-pair seeds are derived from the master seed and the pair names, so
    results do not depend on execution order. Pairs with p > 0.05 carry
    ``inconclusive=True``.
    """
    groups = _by_field(records)
    if len(groups) < 2:
        raise ValidationError("need at least 2 fields for pairwise tests")
    values = {f: np.array([m.norm_cit for m in members]) for f, members in groups.items()}
    order = sorted(values, key=lambda f: (-float(values[f].mean()), f))
    results = []
    for i, fa in enumerate(order):
        for fb in order[i + 1 :]:
            pair_seed = _derive_pair_seed(seed, fa, fb)
            results.append(
                permutation_test(
                    values[fa],
                    values[fb],
                    n_perm=n_perm,
                    seed=pair_seed,
                    exact_threshold=exact_threshold,
                    field_a=fa,
                    field_b=fb,
                )
            )
    return tuple(results)


# ---------------------------------------------------------------------------
# exponential QQ data


def qq_exponential(values: Sequence[float]) -> QQSeries:
    """QQ data for sorted values against a rate-1/mean exponential.

    ``values`` must already carry any transformation (callers pass square
    roots of the raw quantity). Plotting positions are (i - 0.5) / n.
    """
    arr = np.sort(np.asarray(values, dtype=float))
    if arr.size == 0:
        raise ValidationError("no values for QQ series")
    _check_finite("values", arr)
    if np.any(arr < 0):
        raise ValidationError("values must be non-negative")
    mean = float(arr.mean())
    if mean == 0.0:
        raise ValidationError("values have zero mean; exponential rate undefined")
    rate = 1.0 / mean
    n = arr.size
    probs = (np.arange(1, n + 1) - 0.5) / n
    theoretical = -np.log1p(-probs) / rate
    points = tuple((float(t), float(e)) for t, e in zip(theoretical, arr))
    return QQSeries(points=points, rate_estimate=rate)


# ---------------------------------------------------------------------------
# CSV emitters


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _table(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def field_summary_csv(rows: Sequence[FieldStats]) -> str:
    return _table(
        ("field", "count", "mean_cit", "sd_cit", "mean_norm"),
        ((r.field, r.count, r.mean_cit, r.sd_cit, r.mean_norm) for r in rows),
    )


def permutation_results_csv(results: Sequence[PermutationResult]) -> str:
    return _table(
        ("field_a", "field_b", "t_obs", "p_value", "n_perm", "exact"),
        ((r.field_a, r.field_b, r.t_obs, r.p_value, r.n_perm, r.exact) for r in results),
    )


def regression_report_csv(fit: RegressionFit) -> str:
    rows = [
        (name, est, se, t, p, lo, hi)
        for name, est, se, t, p, (lo, hi) in zip(
            fit.names, fit.estimates, fit.standard_errors, fit.t_stats, fit.p_values, fit.ci95
        )
    ]
    return _table(("term", "estimate", "stderr", "t", "p", "ci_lo", "ci_hi"), rows)


def model_comparison_csv(named_fits: Mapping[str, RegressionFit]) -> str:
    return _table(
        ("model", "aic", "rss", "k"),
        ((name, fit.aic, fit.rss, fit.k) for name, fit in named_fits.items()),
    )


def qq_csv(series: QQSeries) -> str:
    return _table(("theoretical", "empirical"), series.points)
