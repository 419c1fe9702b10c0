"""Subject-tag taxonomy: reduction of raw MathSciNet subject tags to 20 major fields.

The default mapping ships embedded so results are reproducible out of the box;
an override CSV (columns: raw_tag, major_field) can redirect individual tags.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError, ValidationError

logger = logging.getLogger(__name__)

#: The 20 canonical major-field names. Every mapping target must be one of these.
MAJOR_FIELDS: tuple[str, ...] = (
    "Algebra",
    "Algebraic Geometry",
    "Analysis",
    "Applied Mathematics",
    "Combinatorics",
    "Complex Analysis",
    "Computer Science",
    "Dynamics",
    "Geometry",
    "Group Theory",
    "Harmonic Analysis",
    "History",
    "Lie Groups",
    "Logic",
    "Mathematical Physics",
    "Number Theory",
    "Other",
    "PDE",
    "Probability",
    "Statistics",
)

# Raw subject tags grouped by the major field they reduce to. Matching is
# case- and whitespace-insensitive, so near-duplicate spellings are listed
# only when they differ in more than case/spacing.
#
# "Global analysis, analysis on manifolds" is claimed by both Harmonic
# Analysis and PDE; the builder keeps the first owner (Harmonic Analysis)
# and logs the conflict. An override file can redirect it.
_SUBFIELD_TABLE: dict[str, tuple[str, ...]] = {
    "Algebra": (
        "Algebraic Topology",
        "Associative Rings and Algebra",
        "Associative rings and algebras",
        "Category theory, Homological algebra",
        "Commutative rings and algebras",
        "Field theory",
        "General algebraic systems",
        "K-theory",
        "Linear and Multilinear Algebra, matrix theory",
        "Order, lattices, ordered algebraic structures",
    ),
    "Algebraic Geometry": ("Algebraic Geometry",),
    "Analysis": (
        "Difference and functional equations",
        "Integral equations",
        "Integral transforms, operational calculus",
        "Ordinary differential equations",
        "Real functions",
        "Special functions",
    ),
    "Applied Mathematics": (
        "Approximations and expansions",
        "Biology other natural sciences",
        "Calculus of variations and optimal control, optimization",
        "Fluid mechanics",
        "Game theory, economics, social and behavioral sciences",
        "Geophysics",
        "Mechanics of deformable sciences",
        "Mechanics of solids",
        "Operations research, mathematical programming",
        "Systems theory, control",
    ),
    "Combinatorics": ("Combinatorics",),
    "Complex Analysis": (
        "Functions of a complex variable",
        "Potential theory",
        "Several complex variables and analytic spaces",
    ),
    "Computer Science": (
        "Computer Science",
        "Numerical Analysis",
        "Information and communication, circuits",
    ),
    "Dynamics": ("Dynamical Systems and Ergodic Theory",),
    "Geometry": (
        "Convex and discrete geometry",
        "Differential Geometry",
        "General topology",
        "Geometry",
        "Manifolds and cell complexes",
    ),
    "Group Theory": ("Group theory and generalizations",),
    "Harmonic Analysis": (
        "Abstract harmonic analysis",
        "Fourier analysis",
        "Functional analysis",
        "Global analysis, analysis on manifolds",
        "Measure and integration",
        "Operator theory",
    ),
    "History": ("History and biography",),
    "Lie Groups": ("Topological Groups, Lie Groups",),
    "Logic": (
        "Logic and foundations",
        "Mathematical logic and foundations",
        "Set theory",
    ),
    "Mathematical Physics": (
        "Classical thermodynamics, heat transfer",
        "Mechanics of particles and systems",
        "Optics, electromagnetic theory",
        "Quantum theory",
        "Relativity and gravitational theory",
        "Statistical mechanics, structure of matter",
    ),
    "Number Theory": ("Number Theory",),
    "Other": ("Other",),
    "PDE": (
        "Partial Differential Equations",
        "Global Analysis, Analysis on manifolds",
    ),
    "Probability": ("Probability theory and stochastic processes",),
    "Statistics": ("Statistics",),
}

UNKNOWN_POLICIES = ("other", "reject")


def normalize_tag(tag: str) -> str:
    """Canonical lookup key: trimmed, inner whitespace collapsed, casefolded."""
    return " ".join(tag.split()).casefold()


@dataclass(frozen=True)
class FieldMap:
    """Association from raw subject tags to major fields.

    ``entries`` keys are stored in normalized form; every target must be one
    of the 20 names in MAJOR_FIELDS. ``unknown_policy`` is "other" (fall back
    to the Other field with a warning) or "reject" (raise on unknown tags).
    """

    entries: dict[str, str]
    unknown_policy: str = "other"

    def __post_init__(self) -> None:
        if self.unknown_policy not in UNKNOWN_POLICIES:
            raise ValidationError(
                f"unknown_policy must be one of {UNKNOWN_POLICIES}, got {self.unknown_policy!r}"
            )
        normalized: dict[str, str] = {}
        for raw, major in self.entries.items():
            if major not in MAJOR_FIELDS:
                raise ValidationError(
                    f"mapping target {major!r} for tag {raw!r} is not a major field"
                )
            normalized[normalize_tag(raw)] = major
        object.__setattr__(self, "entries", normalized)


_DEFAULT_ENTRIES: dict[str, str] | None = None


def _build_default_entries() -> dict[str, str]:
    entries: dict[str, str] = {}
    for major, tags in _SUBFIELD_TABLE.items():
        for tag in tags:
            key = normalize_tag(tag)
            if key in entries and entries[key] != major:
                logger.warning(
                    "subject tag %r is listed under both %r and %r; keeping %r",
                    tag, entries[key], major, entries[key],
                )
                continue
            entries[key] = major
    return entries


def default_field_map(unknown_policy: str = "other") -> FieldMap:
    """The embedded tag-to-major-field mapping (built once, conflict warned once)."""
    global _DEFAULT_ENTRIES
    if _DEFAULT_ENTRIES is None:
        _DEFAULT_ENTRIES = _build_default_entries()
    return FieldMap(dict(_DEFAULT_ENTRIES), unknown_policy)


def representative_tag(major: str) -> str:
    """A raw subject tag that the default map resolves to the given major field."""
    if major not in _SUBFIELD_TABLE:
        raise ValidationError(f"{major!r} is not a major field")
    return _SUBFIELD_TABLE[major][0]


def map_field(raw_field: str, field_map: FieldMap) -> str:
    """Resolve a raw subject tag to its major field.

    Unknown tags fall back to "Other" with a logged warning under the
    "other" policy, or raise ValidationError under "reject".
    """
    major = field_map.entries.get(normalize_tag(raw_field))
    if major is not None:
        return major
    if field_map.unknown_policy == "reject":
        raise ValidationError(f"unknown subject tag: {raw_field!r}")
    logger.warning("unknown subject tag %r mapped to 'Other'", raw_field)
    return "Other"


def _canonical_major(name: str) -> str:
    wanted = normalize_tag(name)
    for major in MAJOR_FIELDS:
        if normalize_tag(major) == wanted:
            return major
    raise ValidationError(
        f"{name!r} is not a major field; expected one of: " + ", ".join(MAJOR_FIELDS)
    )


def load_field_map(
    source: str | Path | bytes,
    base: FieldMap | None = None,
    unknown_policy: str | None = None,
) -> FieldMap:
    """Load a mapping override CSV (columns raw_tag, major_field).

    Entries from the file are overlaid on ``base`` (the embedded default when
    base is None), so an override file only needs to list redirected tags.
    """
    if isinstance(source, bytes):
        handle = io.StringIO(source.decode("utf-8"))
    else:
        handle = open(source, newline="", encoding="utf-8")
    with handle:
        reader = csv.reader(handle)
        try:
            header = [cell.strip() for cell in next(reader)]
        except StopIteration:
            raise ParseError("field-map file is empty: missing header row") from None
        try:
            tag_col = header.index("raw_tag")
            major_col = header.index("major_field")
        except ValueError:
            raise ParseError(
                "field-map header must contain columns raw_tag and major_field"
            ) from None
        overrides: dict[str, str] = {}
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"field-map line {reader.line_num}: expected {len(header)} fields, got {len(row)}"
                )
            key = normalize_tag(row[tag_col])
            major = _canonical_major(row[major_col].strip())
            if key in overrides and overrides[key] != major:
                raise ValidationError(
                    f"field-map line {reader.line_num}: conflicting entries for tag {row[tag_col]!r}"
                )
            overrides[key] = major
    if base is None:
        base = default_field_map()
    merged = dict(base.entries)
    merged.update(overrides)
    return FieldMap(merged, unknown_policy or base.unknown_policy)
