"""Department-level aggregation of interfield z-scores and ranking reports."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ValidationError
from .normalize import ScoredRecord

REPORT_FORMATS = ("csv", "json", "markdown")


@dataclass(frozen=True)
class DepartmentScore:
    institution: str
    mean_z: float
    faculty_count: int
    rank: int


def rank_departments(records: Sequence[ScoredRecord]) -> tuple[DepartmentScore, ...]:
    """Aggregate per-person z-scores into a deterministic department ranking.

    Departments are ordered by mean z descending; ties break by faculty count
    descending, then institution name ascending. Ranks are consecutive from 1.
    """
    if not records:
        raise ValidationError("no records to rank")
    missing = [r.base.person_id for r in records if not r.base.institution.strip()]
    if missing:
        raise ValidationError("records without institution: " + ", ".join(missing))
    groups: dict[str, list[float]] = {}
    for rec in records:
        groups.setdefault(rec.base.institution, []).append(rec.z)
    # fsum keeps the mean independent of record order
    scored = [
        (institution, math.fsum(zs) / len(zs), len(zs)) for institution, zs in groups.items()
    ]
    scored.sort(key=lambda item: (-item[1], -item[2], item[0]))
    return tuple(
        DepartmentScore(institution=inst, mean_z=mean_z, faculty_count=count, rank=i + 1)
        for i, (inst, mean_z, count) in enumerate(scored)
    )


def emit_ranking_report(scores: Sequence[DepartmentScore], fmt: str = "csv") -> bytes:
    """Serialize the ranking as csv, json, or a markdown numbered list."""
    if not scores:
        raise ValidationError("no scores to report")
    if fmt not in REPORT_FORMATS:
        raise ValidationError(f"format must be one of {REPORT_FORMATS}, got {fmt!r}")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("rank", "institution", "mean_z", "faculty_count"))
        for s in scores:
            writer.writerow((s.rank, s.institution, f"{s.mean_z:.6f}", s.faculty_count))
        return buf.getvalue().encode("utf-8")
    if fmt == "json":
        payload = [
            {
                "rank": s.rank,
                "institution": s.institution,
                "mean_z": round(s.mean_z, 6),
                "faculty_count": s.faculty_count,
            }
            for s in scores
        ]
        return (json.dumps(payload, indent=2) + "\n").encode("utf-8")
    lines = [
        f"{s.rank}. {s.institution} (mean_z={s.mean_z:.6f}, n={s.faculty_count})"
        for s in scores
    ]
    return ("\n".join(lines) + "\n").encode("utf-8")
