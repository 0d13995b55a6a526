"""Exception hierarchy.

Every error raised on purpose by the engine derives from :class:`AgentCalcError`.
The CLI maps the families below onto its exit codes.
"""
from __future__ import annotations


class AgentCalcError(Exception):
    pass


class ScenarioError(AgentCalcError):
    """Malformed, unresolvable or invalid scenario input (CLI exit 2)."""


class ParseError(ScenarioError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"syntax error{where}: {message}")


class UnresolvedReference(ScenarioError):
    def __init__(self, path: str, name: str):
        self.path = path
        self.name = name
        super().__init__(f"{path}: unresolved reference {name!r}")


class NormalizationError(ScenarioError):
    def __init__(self, row: str, total: float):
        self.row = row
        self.total = total
        super().__init__(f"{row}: probabilities sum to {total:.12g}, expected 1")


class VersionMismatch(ScenarioError):
    pass


class DomainError(ScenarioError):
    """A value lies outside its declared finite domain."""


class FormMismatch(ScenarioError):
    """An update function was applied to a state of the wrong form."""


class ValidationError(ScenarioError):
    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class CoverageError(AgentCalcError):
    """A kernel or emission has no row for the requested key."""


class DeadEndError(AgentCalcError):
    """Restriction left zero probability mass on the allowed actions."""


class GoalError(ScenarioError):
    pass


class BudgetExceeded(AgentCalcError):
    def __init__(self, terms: int, budget: int):
        self.terms = terms
        self.budget = budget
        super().__init__(f"enumeration needs up to {terms} leaf terms, budget is {budget}")


class DofViolation(AgentCalcError):
    def __init__(self, handle: str, strategy: str):
        self.handle = handle
        self.strategy = strategy
        super().__init__(f"DOF violation: handle {handle!r} is not a degree of freedom of {strategy}")
