"""문제 정의 데이터 모델 (가중치, 경계 조건, 경계 데이터)."""

from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Optional, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from .exceptions import InvalidProblemError


class WeightKind(str, Enum):
    COS = "cos"
    COS_MINUS_R = "cos_minus_r"
    SGN = "sgn"
    LINEAR = "linear"
    CUBIC = "cubic"
    TABULATED = "tabulated"


class BoundaryKind(str, Enum):
    PERIODIC = "periodic"
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"
    SEPARATED = "separated"


class Framework(str, Enum):
    SIMPLE = "simple"
    EXTENDED = "extended"
    THRESHOLDED = "thresholded"


class LMode(str, Enum):
    DROP_TRANSCENDENTAL = "drop_transcendental"
    INCLUDE_L = "include_L"


class DirectMethod(str, Enum):
    LEAST_SQUARES = "least_squares"
    PROJECTED = "projected"


class Command(str, Enum):
    SPECTRUM = "spectrum"
    SOLVE = "solve"
    NORMS = "norms"
    PNORM = "pnorm"
    FIT = "fit"
    SWEEP_L = "sweep-L"
    SWEEP_R = "sweep-r"
    ORACLE_COMPARE = "oracle-compare"
    LAMBDA_R = "lambda-r"
    DIFFUSIVITY = "diffusivity"
    PRESETS = "presets"


@dataclass(frozen=True, eq=False)
class TabulatedFunction:
    """표본점으로 주어진 함수 (3차 스플라인 보간)."""

    theta: np.ndarray
    values: np.ndarray
    periodic: bool = False

    def __post_init__(self) -> None:
        theta = np.asarray(self.theta, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if theta.ndim != 1 or theta.shape != values.shape or theta.size < 4:
            raise InvalidProblemError(
                "표본 함수는 같은 길이(4 이상)의 1차원 배열이어야 합니다",
                field="samples",
                value=int(theta.size),
            )
        if np.any(np.diff(theta) <= 0):
            raise InvalidProblemError(
                "표본점은 순증가해야 합니다", field="samples.theta"
            )
        if self.periodic:
            values = values.copy()
            values[-1] = values[0]
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "values", values)

    @cached_property
    def spline(self) -> CubicSpline:
        bc_type = "periodic" if self.periodic else "not-a-knot"
        return CubicSpline(self.theta, self.values, bc_type=bc_type)

    def _wrap(self, theta: np.ndarray) -> np.ndarray:
        if not self.periodic:
            return theta
        a, b = self.theta[0], self.theta[-1]
        return a + np.mod(theta - a, b - a)

    def __call__(self, theta: np.ndarray, derivative: int = 0) -> np.ndarray:
        return self.spline(self._wrap(np.asarray(theta, dtype=float)), derivative)

    def roots(self) -> np.ndarray:
        return np.asarray(self.spline.roots(extrapolate=False), dtype=float)


@dataclass(frozen=True, eq=False)
class Weight:
    """가중치 h(θ) 정의."""

    kind: WeightKind
    r: float = 0.0
    table: Optional[TabulatedFunction] = None

    def __call__(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if self.kind == WeightKind.COS:
            return np.cos(theta)
        if self.kind == WeightKind.COS_MINUS_R:
            return np.cos(theta) - self.r
        if self.kind == WeightKind.SGN:
            return np.sign(theta)
        if self.kind == WeightKind.LINEAR:
            return theta.copy()
        if self.kind == WeightKind.CUBIC:
            return theta**3
        assert self.table is not None
        return self.table(theta)

    @property
    def multiplicity(self) -> int:
        """전환점의 대수적 중복도 (sgn은 0)."""
        return {
            WeightKind.SGN: 0,
            WeightKind.CUBIC: 3,
        }.get(self.kind, 1)

    @property
    def is_cosine(self) -> bool:
        return self.kind in (WeightKind.COS, WeightKind.COS_MINUS_R)

    def zeros(self, a: float, b: float) -> np.ndarray:
        """구간 (a, b) 내부의 h 영점."""
        if self.kind == WeightKind.COS:
            k = np.arange(np.ceil((a - np.pi / 2) / np.pi), np.floor((b - np.pi / 2) / np.pi) + 1)
            candidates = np.pi / 2 + k * np.pi
        elif self.kind == WeightKind.COS_MINUS_R:
            base = np.arccos(self.r)
            period = 2 * np.pi
            k = np.arange(np.floor((a - np.pi) / period), np.ceil((b + np.pi) / period) + 1)
            candidates = np.concatenate([base + 2 * np.pi * k, -base + 2 * np.pi * k])
        elif self.kind == WeightKind.TABULATED:
            assert self.table is not None
            candidates = self.table.roots()
        else:
            candidates = np.array([0.0])
        tol = 1e-12 * max(1.0, b - a)
        inside = candidates[(candidates > a + tol) & (candidates < b - tol)]
        return np.unique(np.round(np.sort(inside), 14))


@dataclass(frozen=True, eq=False)
class Coefficient:
    """확산 계수 p(θ): 상수 또는 표본 함수."""

    constant: float = 1.0
    table: Optional[TabulatedFunction] = None

    @property
    def is_constant(self) -> bool:
        return self.table is None

    def __call__(self, theta: np.ndarray, derivative: int = 0) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if self.table is not None:
            return self.table(theta, derivative)
        if derivative:
            return np.zeros_like(theta)
        return np.full_like(theta, self.constant)


@dataclass(frozen=True)
class BoundaryCondition:
    """θ 방향 경계 조건.

    분리형 조건은 v cos α − p v′ sin α = 0 (θ = a), v cos β − p v′ sin β = 0
    (θ = b) 형태이며, Dirichlet은 α = β = 0, Neumann은 α = β = π/2에 해당합니다.
    """

    kind: BoundaryKind
    alpha: float = 0.0
    beta: float = 0.0

    @property
    def angles(self) -> Tuple[float, float]:
        if self.kind == BoundaryKind.DIRICHLET:
            return 0.0, 0.0
        if self.kind == BoundaryKind.NEUMANN:
            return np.pi / 2, np.pi / 2
        return self.alpha, self.beta

    def is_dirichlet_at(self, end: int) -> bool:
        if self.kind == BoundaryKind.PERIODIC:
            return False
        return abs(np.sin(self.angles[end])) < 1e-14

    def robin_coefficient(self, end: int) -> float:
        """약형식에 더해지는 cot 계수 (Dirichlet 끝점은 0)."""
        angle = self.angles[end]
        if self.kind == BoundaryKind.PERIODIC or abs(np.sin(angle)) < 1e-14:
            return 0.0
        return float(np.cos(angle) / np.sin(angle))

    @property
    def has_zero_mode(self) -> bool:
        if self.kind == BoundaryKind.PERIODIC:
            return True
        return all(
            not self.is_dirichlet_at(end) and abs(self.robin_coefficient(end)) < 1e-14
            for end in (0, 1)
        )


@dataclass(frozen=True, eq=False)
class BoundaryData:
    """반구간 경계 데이터 w(θ).

    h > 0에서는 x = 0의 유입값, h < 0에서는 x = L의 유입값입니다.
    """

    rho_plus: float = 1.0
    rho_minus: float = 2.0
    table: Optional[TabulatedFunction] = None

    @property
    def delta_rho(self) -> float:
        return self.rho_minus - self.rho_plus

    def sample(self, theta: np.ndarray, h_values: np.ndarray) -> np.ndarray:
        if self.table is not None:
            return np.asarray(self.table(theta), dtype=float)
        return np.where(np.asarray(h_values) > 0, self.rho_plus, self.rho_minus)


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """양방향 확산 문제 h ∂f/∂x = −A f 의 한 인스턴스."""

    a: float
    b: float
    weight: Weight
    bc: BoundaryCondition
    L: float = 1.0
    p: Coefficient = field(default_factory=Coefficient)
    w: BoundaryData = field(default_factory=BoundaryData)
    name: str = "custom"

    def __post_init__(self) -> None:
        if not self.a < self.b:
            raise InvalidProblemError(
                "정의역 끝점은 a < b를 만족해야 합니다",
                field="domain",
                value=[self.a, self.b],
            )
        if not self.L > 0:
            raise InvalidProblemError(
                "슬랩 길이 L은 양수여야 합니다", field="L", value=self.L
            )
        if self.weight.kind == WeightKind.COS_MINUS_R and not 0 <= self.weight.r < 1:
            raise InvalidProblemError(
                "cos − r 가중치는 0 ≤ r < 1 이어야 합니다",
                field="weight.r",
                value=self.weight.r,
            )
        samples = np.linspace(self.a, self.b, 257)
        if np.any(self.p(samples) <= 0):
            raise InvalidProblemError(
                "계수 p(θ)는 모든 점에서 양수여야 합니다", field="p"
            )

    @property
    def periodic(self) -> bool:
        return self.bc.kind == BoundaryKind.PERIODIC

    @property
    def period(self) -> float:
        return self.b - self.a

    @property
    def has_zero_mode(self) -> bool:
        return self.bc.has_zero_mode

    def h(self, theta: np.ndarray) -> np.ndarray:
        return self.weight(theta)

    def turning_points(self) -> np.ndarray:
        return self.weight.zeros(self.a, self.b)

    def breakpoints(self) -> np.ndarray:
        """끝점과 전환점을 포함한 요소 경계."""
        return np.concatenate([[self.a], self.turning_points(), [self.b]])

    def with_L(self, L: float) -> "ProblemSpec":
        return replace(self, L=L)

    def with_boundary_data(self, w: BoundaryData) -> "ProblemSpec":
        return replace(self, w=w)
