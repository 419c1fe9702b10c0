"""Exception types shared across the package."""


class ParseError(ValueError):
    """Structurally malformed input (bad CSV shape, missing header columns)."""


class ValidationError(ValueError):
    """Well-formed input that violates a domain invariant."""
