"""Exception hierarchy shared by every module."""

from __future__ import annotations


class NomeqError(Exception):
    """Base class for all errors raised by this package."""


class LengthMismatch(NomeqError):
    pass


class MissingVariable(NomeqError):
    pass


class ValenceMismatch(NomeqError):
    pass


class FreshnessViolated(NomeqError):
    def __init__(self, variable: str, detail: str = ""):
        self.variable = variable
        super().__init__(f"freshness violated for {variable}" + (f": {detail}" if detail else ""))


class TheorySyntaxError(NomeqError):
    """Malformed theory, term or proof text. Carries a 1-based position."""

    def __init__(self, message: str, line: int, col: int):
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


class UnknownOperator(NomeqError):
    def __init__(self, name: str, line: int | None = None, col: int | None = None):
        self.name = name
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(f"{where}unknown operator or variable {name!r}")


class ScopeError(NomeqError):
    def __init__(self, where: str, subterm: object, detail: str = ""):
        self.where = where
        self.subterm = subterm
        msg = f"{where}: {subterm} is not well scoped"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class SideConditionViolated(NomeqError):
    def __init__(self, rule: str, detail: str):
        self.rule = rule
        self.detail = detail
        super().__init__(f"{rule}: side condition violated: {detail}")


class UnknownAxiom(NomeqError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Axiom: no equation named {name!r}")


class ChildMismatch(NomeqError):
    def __init__(self, rule: str, detail: str):
        self.rule = rule
        self.detail = detail
        super().__init__(f"{rule}: {detail}")


class SeparationViolated(NomeqError):
    pass


class MissingAssignment(NomeqError):
    pass


class NotClassical(NomeqError):
    pass
