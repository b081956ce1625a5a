"""Exception hierarchy.

Every error carries a short ``category`` string; the CLI prints it as the
machine-parsable prefix of its one-line error report.
"""


class QfiwError(Exception):
    category = "error"


class DimensionError(QfiwError, ValueError):
    category = "dimension-mismatch"


class NotHermitianError(QfiwError, ValueError):
    category = "not-hermitian"


class ConvergenceError(QfiwError, ArithmeticError):
    category = "iteration-failure"


class CapExceededError(QfiwError, ValueError):
    category = "cap-exceeded"


class InvalidStateError(QfiwError, ValueError):
    category = "invalid-state"


class PositivityError(InvalidStateError):
    category = "positivity"


class EmptySubsetError(QfiwError, ValueError):
    category = "empty-subset"


class InvalidOperatorSetError(QfiwError, ValueError):
    category = "invalid-operators"


class ZeroVectorError(QfiwError, ValueError):
    category = "zero-vector"


class RangeError(QfiwError, ValueError):
    category = "range"


class NoSignChangeError(QfiwError, ValueError):
    category = "no-sign-change"


class FormatError(QfiwError, ValueError):
    category = "format"
