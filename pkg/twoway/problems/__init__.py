from .problem_factory import ProblemFactory, cos_minus_r_spec
from .problem_registry import ProblemPreset, ProblemRegistry

__all__ = ["ProblemFactory", "ProblemPreset", "ProblemRegistry", "cos_minus_r_spec"]
