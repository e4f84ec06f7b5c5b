"""
Exception hierarchy.

Every error carries the CLI exit code it maps to:
1 infeasible or validation failure, 2 format error, 3 guard or cap
exceeded, 4 internal assertion.
"""


class MfasError(Exception):
    exit_code = 1

    def __init__(self, message, *, dump=None):
        super().__init__(message)
        self.message = message
        self.dump = dump


# 1: infeasible input or failed validation


class ValidationFailed(MfasError):
    exit_code = 1


class NotFeasible(MfasError):
    exit_code = 1


class NotFeasibleInput(MfasError):
    exit_code = 1


class PosetViolated(MfasError):
    exit_code = 1


class NotHemimetric(MfasError):
    exit_code = 1


class NotIntegral(MfasError):
    exit_code = 1


class DimensionMismatch(MfasError):
    exit_code = 1


class UnknownName(MfasError):
    exit_code = 1


# 2: malformed input


class FormatError(MfasError):
    exit_code = 2

    def __init__(self, message, *, line=None, dump=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, dump=dump)
        self.line = line


class PosetError(FormatError):
    pass


class WeightError(FormatError):
    pass


# 3: guards and caps


class CapExceeded(MfasError):
    exit_code = 3


class GuardExceeded(MfasError):
    exit_code = 3


class BudgetExhausted(MfasError):
    exit_code = 3


# 4: internal assertions; these should never fire on valid input


class LemmaViolated(MfasError):
    exit_code = 4


class NonTermination(MfasError):
    exit_code = 4
