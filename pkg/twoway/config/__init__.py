from .config_loader import ConfigLoader, get_config_loader, load_run_config
from .schemas import (
    LoggingConfig,
    NormsConfig,
    NumericsConfig,
    OutputConfig,
    ProblemConfig,
    RunConfig,
    RunSettings,
    SolverConfig,
    SweepConfig,
)

__all__ = [
    "ConfigLoader",
    "get_config_loader",
    "load_run_config",
    "RunConfig",
    "ProblemConfig",
    "NumericsConfig",
    "SolverConfig",
    "NormsConfig",
    "SweepConfig",
    "OutputConfig",
    "LoggingConfig",
    "RunSettings",
]
