"""Exception types shared across the toolkit."""

from __future__ import annotations


class CgrlError(Exception):
    pass


class ParseError(CgrlError):
    def __init__(self, message, loc, expected=None):
        self.loc = loc
        self.expected = expected
        suffix = f" (expected {expected})" if expected else ""
        super().__init__(f"{loc}: {message}{suffix}")


class UnboundVariable(CgrlError):
    def __init__(self, name, loc):
        self.name = name
        self.loc = loc
        super().__init__(f"{loc}: unbound variable '{name}'")


class MiniJSRuntimeError(CgrlError):
    def __init__(self, loc, message):
        self.loc = loc
        super().__init__(f"{loc}: {message}")


class NotCallable(MiniJSRuntimeError):
    def __init__(self, loc, value_desc="value"):
        super().__init__(loc, f"{value_desc} is not callable")


class StepBudgetExceeded(CgrlError):
    def __init__(self, budget):
        self.budget = budget
        super().__init__(f"step budget of {budget} exceeded")


class NotAnInvoke(CgrlError):
    pass


class NotADynamicAccess(CgrlError):
    pass


class UnknownNode(CgrlError):
    pass
