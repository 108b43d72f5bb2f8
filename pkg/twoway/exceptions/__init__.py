"""예외 클래스 모듈"""

from .solver_exceptions import (
    ConfigurationError,
    ConvergenceError,
    FitError,
    GridError,
    InvalidProblemError,
    OutOfRangeError,
    PreconditionError,
    RankDeficiencyError,
    SingularSystemError,
    SpectrumError,
    ThresholdError,
    TwoWayError,
    ZeroModeError,
)

__all__ = [
    "TwoWayError",
    "InvalidProblemError",
    "GridError",
    "SpectrumError",
    "ZeroModeError",
    "SingularSystemError",
    "ThresholdError",
    "RankDeficiencyError",
    "PreconditionError",
    "OutOfRangeError",
    "FitError",
    "ConfigurationError",
    "ConvergenceError",
]
