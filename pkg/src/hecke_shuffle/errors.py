"""Exception hierarchy.

Two families matter to callers (and to the CLI exit-code contract):
``PreconditionError`` for inputs outside an operation's domain and
``ConvergenceError`` for numerical procedures that failed to certify
their own accuracy.
"""
from __future__ import annotations


class HeckeShuffleError(Exception):
    pass


class PreconditionError(HeckeShuffleError, ValueError):
    pass


class ConvergenceError(HeckeShuffleError, ArithmeticError):
    pass


class NotWhitelisted(PreconditionError):
    pass


class DomainError(PreconditionError):
    pass


class ContinuationUnavailable(PreconditionError):
    pass


class PreconditionViolated(PreconditionError):
    pass


class PoleAt(PreconditionError):
    def __init__(self, n: int, message: str | None = None):
        self.n = n
        super().__init__(message or f"Gamma pole at non-positive integer {n}")


class PoleProximity(PreconditionError):
    def __init__(self, message: str, pair: tuple[int, int] | None = None):
        self.pair = pair
        if pair is not None:
            message = f"{message} (factor {pair})"
        super().__init__(message)


class GeneratorSearchFailed(ConvergenceError):
    pass


class TailNotConverged(ConvergenceError):
    pass


class QuadratureNotConverged(ConvergenceError):
    pass


class TruncationNotConverged(ConvergenceError):
    pass
