"""Exception hierarchy shared by every module.

Parse-level problems map to CLI exit code 2, analysis failures to exit code 3.
"""

from __future__ import annotations


class DAEError(Exception):
    """Base class of all errors raised by daeindex."""


class ParseError(DAEError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(f"{where}{message}")


class UndeclaredSymbol(ParseError):
    pass


class NonIntegerExponent(ParseError):
    pass


class InvalidSystem(DAEError, ValueError):
    """The equations do not form an admissible DAE system (r > n, e = 0, ...)."""


class AnalysisError(DAEError):
    """Base class of failures that happen while analysing a valid system."""


class MissingAssignment(AnalysisError, KeyError):
    def __init__(self, var):
        self.var = var
        super().__init__(f"no value assigned to {var!r}")

    def __str__(self) -> str:
        return self.args[0]


class InconsistentWitness(AnalysisError):
    pass


class RankDeficient(AnalysisError):
    pass


class BadIndices(AnalysisError, ValueError):
    pass


class NotStabilized(AnalysisError):
    def __init__(self, k_max: int, mu: list[int]):
        self.k_max = k_max
        self.mu = mu
        super().__init__(
            f"mu sequence did not stabilize up to k={k_max} (mu={mu}); "
            "the system is not quasi-regular at the chosen point or the rank "
            "hypothesis fails there"
        )


class NegativeOrder(AnalysisError):
    pass


class ProjectionFailed(AnalysisError):
    def __init__(self, step: int, residual: float):
        self.step = step
        self.residual = residual
        super().__init__(
            f"Newton projection stalled at step {step} (residual {residual:.3e})"
        )


class CapExceeded(AnalysisError):
    def __init__(self, dimension: int, limit: int):
        self.dimension = dimension
        self.limit = limit
        super().__init__(f"linear system of size {dimension} exceeds limit {limit}")


class TooLarge(DAEError, ValueError):
    pass


class InfiniteEntry(DAEError, ValueError):
    pass


class KTooSmall(DAEError, ValueError):
    pass
