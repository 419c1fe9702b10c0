"""Ingestion and validation of raw faculty citation records.

Input CSV schema (header names exact, column order free):
person_id, institution, raw_field, first_pub_year, citations.
Rows violating record invariants are collected into a rejection report
rather than dropped silently; structural problems raise ParseError.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable

from .errors import ParseError, ValidationError
from .fields import FieldMap, default_field_map

REQUIRED_COLUMNS = ("person_id", "institution", "raw_field", "first_pub_year", "citations")

EARLIEST_PUB_YEAR = 1900


@dataclass(frozen=True)
class FacultyRecord:
    """One professor's citation record at a fixed snapshot year."""

    person_id: str
    institution: str
    raw_field: str
    first_pub_year: int
    citations: int
    snapshot_year: int

    def __post_init__(self) -> None:
        if self.citations < 0:
            raise ValidationError(f"{self.person_id}: citations must be non-negative")
        if not EARLIEST_PUB_YEAR <= self.first_pub_year <= self.snapshot_year:
            raise ValidationError(
                f"{self.person_id}: first_pub_year {self.first_pub_year} outside "
                f"[{EARLIEST_PUB_YEAR}, {self.snapshot_year}]"
            )


@dataclass(frozen=True)
class RowRejection:
    """A rejected input row: 1-based file line number plus the violated rule."""

    row: int
    reason: str


@dataclass(frozen=True)
class Corpus:
    """An immutable, validated set of faculty records sharing one snapshot year."""

    records: tuple[FacultyRecord, ...]
    field_map: FieldMap
    snapshot_year: int
    provenance: str = ""
    rejections: tuple[RowRejection, ...] = field(default=())

    def __post_init__(self) -> None:
        for rec in self.records:
            if rec.snapshot_year != self.snapshot_year:
                raise ValidationError(
                    f"{rec.person_id}: snapshot_year {rec.snapshot_year} differs from "
                    f"corpus snapshot_year {self.snapshot_year}"
                )

    def __len__(self) -> int:
        return len(self.records)

    @property
    def institutions(self) -> tuple[str, ...]:
        return tuple(sorted({r.institution for r in self.records}))


def _open_text(source: str | Path | bytes | IO) -> IO[str]:
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(source.decode("utf-8"))
    if isinstance(source, (str, Path)):
        return open(source, newline="", encoding="utf-8")
    if isinstance(source, io.TextIOBase):
        return source
    # binary file object
    return io.TextIOWrapper(source, encoding="utf-8", newline="")


def parse_corpus(
    source: str | Path | bytes | IO,
    snapshot_year: int = 2020,
    field_map: FieldMap | None = None,
    provenance: str = "",
) -> Corpus:
    """Parse a faculty-record CSV into a validated Corpus.

    Parameters
    ----------
    source : path, raw bytes, or open file
        UTF-8 CSV with a header row containing at least REQUIRED_COLUMNS.
    snapshot_year : int
        The year the citation counts were collected; ages are measured
        against it.
    field_map : FieldMap, optional
        Mapping applied downstream when records are scored. Defaults to the
        embedded mapping.
    provenance : str
        Free-text source note stored on the corpus.

    Rows that fail a record invariant (negative citations, out-of-range
    first_pub_year, missing or duplicate person_id) are reported in
    ``Corpus.rejections``; structural CSV problems raise ParseError with the
    offending line number.
    """
    if field_map is None:
        field_map = default_field_map()
    records: list[FacultyRecord] = []
    rejections: list[RowRejection] = []
    seen_ids: set[str] = set()

    with _open_text(source) as handle:
        reader = csv.reader(handle)
        try:
            header = [cell.strip() for cell in next(reader)]
        except StopIteration:
            raise ParseError("empty CSV: missing header row") from None
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if missing:
            raise ParseError("missing required columns: " + ", ".join(missing))
        col = {name: header.index(name) for name in REQUIRED_COLUMNS}

        for row in reader:
            if not row:
                continue
            line = reader.line_num
            if len(row) != len(header):
                raise ParseError(f"line {line}: expected {len(header)} fields, got {len(row)}")
            person_id = row[col["person_id"]].strip()
            reason = _validate_row(row, col, person_id, seen_ids, snapshot_year)
            if reason is not None:
                rejections.append(RowRejection(line, reason))
                continue
            seen_ids.add(person_id)
            records.append(
                FacultyRecord(
                    person_id=person_id,
                    institution=row[col["institution"]].strip(),
                    raw_field=row[col["raw_field"]].strip(),
                    first_pub_year=int(row[col["first_pub_year"]].strip()),
                    citations=int(row[col["citations"]].strip()),
                    snapshot_year=snapshot_year,
                )
            )

    return Corpus(
        records=tuple(records),
        field_map=field_map,
        snapshot_year=snapshot_year,
        provenance=provenance,
        rejections=tuple(rejections),
    )


def _validate_row(
    row: list[str],
    col: dict[str, int],
    person_id: str,
    seen_ids: set[str],
    snapshot_year: int,
) -> str | None:
    """Return the violated rule for a row, or None when the row is valid."""
    if not person_id:
        return "empty person_id"
    if person_id in seen_ids:
        return f"duplicate person_id {person_id!r}"
    try:
        citations = int(row[col["citations"]].strip())
    except ValueError:
        return f"citations {row[col['citations']]!r} is not an integer"
    if citations < 0:
        return f"citations {citations} is negative"
    try:
        first_pub_year = int(row[col["first_pub_year"]].strip())
    except ValueError:
        return f"first_pub_year {row[col['first_pub_year']]!r} is not an integer"
    if first_pub_year < EARLIEST_PUB_YEAR:
        return f"first_pub_year {first_pub_year} before {EARLIEST_PUB_YEAR}"
    if first_pub_year > snapshot_year:
        return f"first_pub_year {first_pub_year} after snapshot_year {snapshot_year}"
    return None


def corpus_csv(records: Iterable[FacultyRecord]) -> str:
    """Serialize records back to the input CSV schema."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REQUIRED_COLUMNS)
    for rec in records:
        writer.writerow(
            [rec.person_id, rec.institution, rec.raw_field, rec.first_pub_year, rec.citations]
        )
    return buf.getvalue()


def rejections_csv(rejections: Iterable[RowRejection]) -> str:
    """Serialize a rejection report (columns: row, reason)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("row", "reason"))
    for rej in rejections:
        writer.writerow((rej.row, rej.reason))
    return buf.getvalue()
