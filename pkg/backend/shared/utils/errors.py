"""
Grid Lab Errors
Error codes and the exception hierarchy raised by the frequency-control backend.

Every domain error is a ``ValueError`` so task modules can keep the
``except ValueError`` -> 400 mapping used across the services.
"""

from __future__ import annotations

from enum import Enum
from typing import Optional


class ErrorCodes(str, Enum):
    """Standard error codes carried by domain errors and error payloads."""
    DIMENSION_MISMATCH = "DIMENSION_MISMATCH"
    COST_DOMAIN = "COST_DOMAIN"
    INFEASIBLE_DISPATCH = "INFEASIBLE_DISPATCH"
    ROOT_NOT_BRACKETED = "ROOT_NOT_BRACKETED"
    NON_CONVERGENCE = "NON_CONVERGENCE"
    ALGEBRAIC_SOLVE = "ALGEBRAIC_SOLVE"
    SECURITY_REGION = "SECURITY_REGION"
    NO_EQUILIBRIUM = "NO_EQUILIBRIUM"
    INTEGRATOR_FAILURE = "INTEGRATOR_FAILURE"
    UNSUPPORTED_DIAGNOSTIC = "UNSUPPORTED_DIAGNOSTIC"
    INVALID_CASE = "INVALID_CASE"
    INVALID_SCENARIO = "INVALID_SCENARIO"
    INVALID_INPUT = "INVALID_INPUT"
    NOT_FOUND = "NOT_FOUND"
    INTERNAL_ERROR = "INTERNAL_ERROR"


class GridLabError(ValueError):
    """Base class for all domain errors."""

    code: ErrorCodes = ErrorCodes.INVALID_INPUT

    def __init__(self, message: str, code: Optional[ErrorCodes] = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class DimensionError(GridLabError):
    code = ErrorCodes.DIMENSION_MISMATCH


class CostDomainError(GridLabError):
    code = ErrorCodes.COST_DOMAIN


class InfeasibleDispatchError(GridLabError):
    code = ErrorCodes.INFEASIBLE_DISPATCH


class RootBracketError(GridLabError):
    code = ErrorCodes.ROOT_NOT_BRACKETED


class NonConvergenceError(GridLabError):
    """Iterative solver stopped without meeting its tolerance."""

    code = ErrorCodes.NON_CONVERGENCE

    def __init__(self, message: str, last_residual: float, iterations: int):
        super().__init__(message)
        self.last_residual = last_residual
        self.iterations = iterations


class AlgebraicSolveError(GridLabError):
    """Passive-bus Newton solve did not reach its tolerance."""

    code = ErrorCodes.ALGEBRAIC_SOLVE

    def __init__(self, message: str, worst_bus: int, residual: float):
        super().__init__(message)
        self.worst_bus = worst_bus
        self.residual = residual


class SecurityRegionError(GridLabError):
    code = ErrorCodes.SECURITY_REGION


class EquilibriumNotFoundError(GridLabError):
    code = ErrorCodes.NO_EQUILIBRIUM


class IntegratorError(GridLabError):
    """Time step failed after all retries."""

    code = ErrorCodes.INTEGRATOR_FAILURE

    def __init__(self, message: str, t: float):
        super().__init__(message)
        self.t = t


class UnsupportedDiagnosticError(GridLabError):
    code = ErrorCodes.UNSUPPORTED_DIAGNOSTIC


class CaseFileError(GridLabError):
    """Case or scenario document failed to parse or validate."""

    code = ErrorCodes.INVALID_CASE

    def __init__(self, message: str, source: str = "<string>", line: Optional[int] = None, path: str = ""):
        self.detail = message
        self.source = source
        self.line = line
        self.path = path
        location = source if line is None else f"{source}:{line}"
        prefix = f"{location}: {path}: " if path else f"{location}: "
        super().__init__(prefix + message)


class ScenarioError(CaseFileError):
    code = ErrorCodes.INVALID_SCENARIO
