"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class RelindetError(Exception):
    """Base class for every error raised by this package."""


class SuperluminalError(RelindetError, ValueError):
    """A velocity at or beyond the maximal signal speed was supplied."""


class DeclarationError(RelindetError, KeyError):
    """A proposition or query referenced an undeclared variable."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class ArityError(RelindetError, ValueError):
    """A connective received the wrong number of operands."""


class ModelInconsistencyError(RelindetError, ValueError):
    """Conditioning on an event of probability zero, or an invalid table."""


class ScenarioError(RelindetError):
    """A scenario document failed to parse or validate.

    ``issues`` holds one human-readable message per problem found; syntax
    errors carry a ``line:column`` prefix.
    """

    def __init__(self, issues: list[str] | str):
        if isinstance(issues, str):
            issues = [issues]
        self.issues = list(issues)
        super().__init__("; ".join(self.issues))
