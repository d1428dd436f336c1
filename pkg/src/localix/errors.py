"""Exception hierarchy shared by every localix module."""

from __future__ import annotations


class LocalixError(Exception):
    """Base class for all errors raised deliberately by this package."""


class DomainError(LocalixError):
    """An argument lies outside the structure it was claimed to belong to."""


class StructureError(LocalixError):
    """A composite value violates the defining laws of its type."""


class PreconditionError(LocalixError):
    """An operation's stated precondition failed; names the violated clause."""

    def __init__(self, clause: str, detail: str = ""):
        self.clause = clause
        msg = f"precondition violated: {clause}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class ResourceBudgetError(LocalixError):
    """An enumeration would exceed the configured size budget."""


class NoImageError(LocalixError):
    """No least preimage bound exists for the requested direct image."""


class NotSeparableError(LocalixError):
    """Separation is impossible; carries a concrete witness."""

    def __init__(self, witness, detail: str = ""):
        self.witness = witness
        msg = f"not separable; witness: {witness!r}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class UnstabilizedError(LocalixError):
    """A truncated diagram did not stabilize; deepen the truncation."""


class ParseError(LocalixError):
    """DSL syntax error with position and expected-token information."""

    def __init__(self, line: int, col: int, found: str, expected: tuple[str, ...]):
        self.line = line
        self.col = col
        self.found = found
        self.expected = tuple(expected)
        want = ", ".join(expected)
        super().__init__(f"line {line}, col {col}: found {found!r}, expected {want}")
