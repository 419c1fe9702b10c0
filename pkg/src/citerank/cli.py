"""Command-line pipeline: ingest -> normalize -> analyze -> rank.

Every run writes its outputs plus a manifest.json recording the exact
configuration, seed, and an input checksum, so any run can be reproduced
byte for byte.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

from . import normalize, rank, stats, synth
from .corpus import Corpus, corpus_csv, parse_corpus, rejections_csv
from .errors import ParseError, ValidationError
from .fields import UNKNOWN_POLICIES, default_field_map, load_field_map

DEFAULT_SEED = 2020


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="citerank",
        description="Age-corrected, field-adjusted citation statistics and department ranking.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output-dir", "-o", default="out", help="directory for outputs and manifest")
    common.add_argument("--snapshot-year", type=int, default=2020)
    common.add_argument("--alpha", type=float, default=normalize.DEFAULT_ALPHA)
    common.add_argument("--min-age", type=int, default=normalize.DEFAULT_MIN_AGE)
    common.add_argument("--field-map", default=None, help="override mapping CSV (raw_tag, major_field)")
    common.add_argument("--unknown-policy", choices=UNKNOWN_POLICIES, default="other")

    withinput = argparse.ArgumentParser(add_help=False)
    withinput.add_argument("--input", "-i", required=True, help="faculty-record CSV")

    sub.add_parser("ingest", parents=[common, withinput], help="validate records, emit corpus and rejection report")
    sub.add_parser("summarize", parents=[common, withinput], help="per-field summary table")

    p_cal = sub.add_parser("calibrate", parents=[common, withinput], help="grid search for the normalization exponent")
    p_cal.add_argument("--grid-lo", type=float, default=normalize.DEFAULT_GRID[0])
    p_cal.add_argument("--grid-hi", type=float, default=normalize.DEFAULT_GRID[1])
    p_cal.add_argument("--grid-step", type=float, default=normalize.DEFAULT_GRID[2])

    p_models = sub.add_parser("models", parents=[common, withinput], help="nested log-citation models with AIC")
    p_models.add_argument("--response", choices=("log1p", "log"), default="log1p")

    p_perm = sub.add_parser("permtest", parents=[common, withinput], help="pairwise one-sided permutation tests")
    p_perm.add_argument("--n-perm", type=int, default=stats.DEFAULT_N_PERM)
    p_perm.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_perm.add_argument("--exact-threshold", type=int, default=stats.DEFAULT_EXACT_THRESHOLD)

    p_qq = sub.add_parser("qq", parents=[common, withinput], help="exponential QQ data for sqrt-transformed values")
    p_qq.add_argument("--quantity", choices=("citations", "normalized"), default="citations")

    p_rank = sub.add_parser("rank", parents=[common, withinput], help="department ranking by mean interfield z-score")
    p_rank.add_argument("--format", choices=rank.REPORT_FORMATS, default="csv")

    p_synth = sub.add_parser("synth", parents=[common], help="write a seeded synthetic corpus CSV")
    p_synth.add_argument(
        "--field",
        action="append",
        required=True,
        metavar="NAME:COUNT:EFFECT",
        help="planted field, repeatable (e.g. --field PDE:300:3.0)",
    )
    p_synth.add_argument("--age-min", type=int, default=1)
    p_synth.add_argument("--age-max", type=int, default=40)
    p_synth.add_argument("--exponent", type=float, default=1.3)
    p_synth.add_argument("--noise-sd", type=float, default=0.3)
    p_synth.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_synth.add_argument("--n-institutions", type=int, default=8)

    return parser


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ValidationError(message)


def _config_dict(args: argparse.Namespace) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "command"}


def _write_manifest(
    out_dir: Path,
    command: str,
    args: argparse.Namespace,
    input_sha256: str | None,
    outputs: list[str],
    results: dict | None = None,
) -> None:
    manifest = {
        "command": command,
        "config": _config_dict(args),
        "input_sha256": input_sha256,
        "outputs": sorted(outputs),
    }
    if results:
        manifest["results"] = results
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _load_corpus(args: argparse.Namespace) -> tuple[Corpus, str]:
    data = Path(args.input).read_bytes()
    checksum = hashlib.sha256(data).hexdigest()
    field_map = default_field_map(args.unknown_policy)
    if args.field_map:
        field_map = load_field_map(args.field_map, base=field_map)
    corpus = parse_corpus(
        data,
        snapshot_year=args.snapshot_year,
        field_map=field_map,
        provenance=str(args.input),
    )
    if corpus.rejections:
        print(
            f"warning: {len(corpus.rejections)} input rows rejected; "
            "run the ingest subcommand for the full report",
            file=sys.stderr,
        )
    return corpus, checksum


def _scored(args: argparse.Namespace, corpus: Corpus) -> tuple[normalize.ScoredRecord, ...]:
    config = normalize.NormalizationConfig(alpha=args.alpha, min_age=args.min_age)
    return normalize.score_corpus(corpus, config)


def _write(out_dir: Path, name: str, text: str) -> str:
    (out_dir / name).write_text(text, encoding="utf-8")
    return name


def _cmd_ingest(args: argparse.Namespace, out_dir: Path) -> None:
    corpus, checksum = _load_corpus(args)
    outputs = [
        _write(out_dir, "corpus.csv", corpus_csv(corpus.records)),
        _write(out_dir, "rejections.csv", rejections_csv(corpus.rejections)),
    ]
    _write_manifest(
        out_dir, "ingest", args, checksum, outputs,
        results={"records": len(corpus), "rejections": len(corpus.rejections)},
    )


def _cmd_summarize(args: argparse.Namespace, out_dir: Path) -> None:
    corpus, checksum = _load_corpus(args)
    rows = stats.field_summary(_scored(args, corpus))
    outputs = [_write(out_dir, "field_summary.csv", stats.field_summary_csv(rows))]
    _write_manifest(out_dir, "summarize", args, checksum, outputs)


def _cmd_calibrate(args: argparse.Namespace, out_dir: Path) -> None:
    _require(args.grid_step > 0, "--grid-step must be positive")
    _require(0 < args.grid_lo < args.grid_hi, "--grid-lo must be positive and below --grid-hi")
    corpus, checksum = _load_corpus(args)
    result = normalize.calibrate_exponent(
        corpus, grid=(args.grid_lo, args.grid_hi, args.grid_step), min_age=args.min_age
    )
    outputs = [_write(out_dir, "calibration.csv", normalize.calibration_csv(result))]
    _write_manifest(
        out_dir, "calibrate", args, checksum, outputs, results={"alpha_star": result.alpha_star}
    )


def _cmd_models(args: argparse.Namespace, out_dir: Path) -> None:
    corpus, checksum = _load_corpus(args)
    scored = _scored(args, corpus)
    fits = {
        formula: stats.factored_ols(scored, formula, response=args.response)
        for formula in stats.FACTORED_FORMULAS
    }
    outputs = [_write(out_dir, "model_comparison.csv", stats.model_comparison_csv(fits))]
    for formula, fit in fits.items():
        outputs.append(
            _write(out_dir, f"coefficients_{formula}.csv", stats.regression_report_csv(fit))
        )
    _write_manifest(
        out_dir, "models", args, checksum, outputs,
        results={formula: fit.aic for formula, fit in fits.items()},
    )


def _cmd_permtest(args: argparse.Namespace, out_dir: Path) -> None:
    _require(args.n_perm >= 1, "--n-perm must be at least 1")
    _require(args.exact_threshold >= 0, "--exact-threshold must be non-negative")
    corpus, checksum = _load_corpus(args)
    results = stats.all_pairwise_tests(
        _scored(args, corpus),
        n_perm=args.n_perm,
        seed=args.seed,
        exact_threshold=args.exact_threshold,
    )
    outputs = [_write(out_dir, "permutation_tests.csv", stats.permutation_results_csv(results))]
    inconclusive = sum(1 for r in results if r.inconclusive)
    _write_manifest(
        out_dir, "permtest", args, checksum, outputs,
        results={"pairs": len(results), "inconclusive": inconclusive},
    )


def _cmd_qq(args: argparse.Namespace, out_dir: Path) -> None:
    corpus, checksum = _load_corpus(args)
    scored = _scored(args, corpus)
    if args.quantity == "citations":
        values = [math.sqrt(r.base.citations) for r in scored]
    else:
        values = [math.sqrt(r.norm_cit) for r in scored]
    series = stats.qq_exponential(values)
    outputs = [_write(out_dir, "qq.csv", stats.qq_csv(series))]
    _write_manifest(
        out_dir, "qq", args, checksum, outputs, results={"rate_estimate": series.rate_estimate}
    )


def _cmd_rank(args: argparse.Namespace, out_dir: Path) -> None:
    corpus, checksum = _load_corpus(args)
    scored = stats.zscore_by_field(_scored(args, corpus))
    scores = rank.rank_departments(scored)
    suffix = {"csv": "csv", "json": "json", "markdown": "md"}[args.format]
    name = f"ranking.{suffix}"
    (out_dir / name).write_bytes(rank.emit_ranking_report(scores, args.format))
    _write_manifest(out_dir, "rank", args, checksum, [name])


def _parse_synth_fields(specs: list[str]) -> tuple[synth.SynthField, ...]:
    fields = []
    for item in specs:
        parts = item.split(":")
        _require(len(parts) == 3, f"--field {item!r} must look like NAME:COUNT:EFFECT")
        name, count_s, effect_s = parts
        try:
            count = int(count_s)
            effect = float(effect_s)
        except ValueError:
            raise ValidationError(f"--field {item!r} has a non-numeric count or effect") from None
        fields.append(synth.SynthField(name=name, count=count, mean_effect=effect))
    return tuple(fields)


def _cmd_synth(args: argparse.Namespace, out_dir: Path) -> None:
    spec = synth.SynthSpec(
        fields=_parse_synth_fields(args.field),
        age_range=(args.age_min, args.age_max),
        exponent=args.exponent,
        noise_sd=args.noise_sd,
        seed=args.seed,
        snapshot_year=args.snapshot_year,
        n_institutions=args.n_institutions,
    )
    corpus = synth.generate(spec)
    outputs = [_write(out_dir, "corpus.csv", corpus_csv(corpus.records))]
    _write_manifest(out_dir, "synth", args, None, outputs, results={"records": len(corpus)})


_COMMANDS = {
    "ingest": _cmd_ingest,
    "summarize": _cmd_summarize,
    "calibrate": _cmd_calibrate,
    "models": _cmd_models,
    "permtest": _cmd_permtest,
    "qq": _cmd_qq,
    "rank": _cmd_rank,
    "synth": _cmd_synth,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out_dir = Path(args.output_dir)
    try:
        _require(args.alpha > 0, "--alpha must be positive")
        _require(args.min_age >= 1, "--min-age must be at least 1")
        out_dir.mkdir(parents=True, exist_ok=True)
        _COMMANDS[args.command](args, out_dir)
    except (ParseError, ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
