"""Pydantic 기반 실행 설정 스키마 정의"""

import hashlib
import json
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..models import Command, DirectMethod, LMode

PERIODIC_COS_COMMANDS = {Command.PNORM, Command.DIFFUSIVITY, Command.SWEEP_L}


class ProblemConfig(BaseModel):
    """문제 프리셋과 매개변수 덮어쓰기"""

    preset: str = Field(default="periodic-cos", description="내장 문제 프리셋 이름")
    L: Optional[float] = Field(default=None, gt=0, description="슬랩 길이")
    r: Optional[float] = Field(default=None, ge=0, lt=1, description="cos θ − r 의 r")
    rho_plus: Optional[float] = Field(default=None, description="h > 0 쪽 유입 밀도 ρ₁")
    rho_minus: Optional[float] = Field(default=None, description="h < 0 쪽 유입 밀도 ρ₂")
    p: Optional[float] = Field(default=None, gt=0, description="상수 확산 계수")
    epsilon: Optional[float] = Field(default=None, gt=0, lt=0.5, description="bothe 끝점 여유")
    v_max: Optional[float] = Field(default=None, gt=0, description="fokker-planck 속도 절단")
    n_samples: Optional[int] = Field(default=None, ge=8, description="표본 함수 점 수")

    def overrides(self) -> Dict[str, Any]:
        return self.model_dump(exclude={"preset"}, exclude_none=True)


class NumericsConfig(BaseModel):
    """이산화 설정"""

    n_modes: int = Field(default=32, gt=0, description="부호별 고유모드 수 N")
    n_nodes: int = Field(default=1024, ge=16, description="구적 노드 수")
    basis_size: Optional[int] = Field(default=None, gt=0, description="초기 Galerkin 기저 크기")
    residual_tol: float = Field(default=1e-6, gt=0, description="고유쌍 잔차 허용치")


class SolverConfig(BaseModel):
    """Neumann 급수와 직접 풀이 설정"""

    tol: float = Field(default=1e-10, gt=0, description="증분 노름 수렴 기준")
    max_iter: int = Field(default=200, gt=0, description="최대 차수")
    lambda_threshold: Optional[Union[float, Literal["auto"]]] = Field(
        default=None, description="Λ 임계값 (auto는 기본 규칙)"
    )
    direct_method: DirectMethod = Field(default=DirectMethod.PROJECTED)
    oversample: int = Field(default=2, ge=2, description="최소제곱 오라클 과표본 배수")

    @model_validator(mode="after")
    def _positive_threshold(self) -> "SolverConfig":
        if isinstance(self.lambda_threshold, float) and self.lambda_threshold <= 0:
            raise ValueError("lambda_threshold must be positive")
        return self


class NormsConfig(BaseModel):
    """노름 진단 설정"""

    N_values: List[int] = Field(default=[25, 50, 100, 200, 400], min_length=1)
    L_mode: LMode = Field(default=LMode.DROP_TRANSCENDENTAL)
    L: Optional[float] = Field(default=None, gt=0, description="include_L 모드의 L")
    n_samples: int = Field(default=100, gt=0, description="노름 동치 표본 수")


class SweepConfig(BaseModel):
    """L, r 스윕과 출력 격자 설정"""

    L_values: List[float] = Field(
        default=[0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0],
        min_length=1,
    )
    r_values: List[float] = Field(default=[0.02, 0.05, 0.1, 0.2, 0.3, 0.5], min_length=1)
    diffusivity_L_values: List[float] = Field(default=[20.0, 50.0, 100.0], min_length=2)
    x_points: int = Field(default=41, ge=2, description="프로파일 x 점 수")
    theta_points: int = Field(default=129, ge=2, description="프로파일 θ 점 수")
    sum_terms: int = Field(default=64, gt=0, description="𝒜, ℬ 합의 음의 모드 수")


class OutputConfig(BaseModel):
    """출력 설정"""

    path: str = Field(default="results", description="출력 디렉토리")


class LoggingConfig(BaseModel):
    """로깅 설정"""

    level: str = Field(
        default="INFO",
        pattern="^(DEBUG|INFO|WARNING|ERROR|CRITICAL)$",
        description="로그 레벨",
    )
    format: str = Field(default="%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    file: Optional[str] = Field(default=None, description="로그 파일 경로")


class RunSettings(BaseModel):
    """재현성·병렬성 설정"""

    seed: int = Field(default=0, ge=0, description="난수 시드")
    jobs: int = Field(default=1, ge=1, description="스윕 동시 작업 수")
    environment: str = Field(
        default="development", pattern="^(development|test|production)$"
    )


class RunConfig(BaseModel):
    """실행 전체 설정"""

    model_config = ConfigDict(validate_assignment=True)

    command: Command = Field(default=Command.SOLVE)
    problem: ProblemConfig = Field(default_factory=ProblemConfig)
    numerics: NumericsConfig = Field(default_factory=NumericsConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    norms: NormsConfig = Field(default_factory=NormsConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    run: RunSettings = Field(default_factory=RunSettings)

    @model_validator(mode="after")
    def _command_requirements(self) -> "RunConfig":
        if self.command in PERIODIC_COS_COMMANDS and self.problem.preset != "periodic-cos":
            raise ValueError(
                f"command '{self.command.value}' requires problem.preset = periodic-cos"
            )
        if self.command == Command.FIT and len(self.norms.N_values) < 5:
            raise ValueError("command 'fit' requires at least 5 norms.N_values")
        if self.command in (Command.NORMS, Command.FIT):
            if max(self.norms.N_values) > 2000:
                raise ValueError("norms.N_values above 2000 are not desk-feasible")
        if self.norms.L_mode == LMode.INCLUDE_L and self.norms.L is None:
            raise ValueError("norms.L is required when norms.L_mode = include_L")
        if any(not 0 < r < 1 for r in self.sweep.r_values):
            raise ValueError("sweep.r_values must lie in (0, 1)")
        if any(L <= 0 for L in self.sweep.L_values + self.sweep.diffusivity_L_values):
            raise ValueError("sweep L values must be positive")
        return self

    def config_hash(self) -> str:
        """출력 경로와 작업 수를 제외한 설정의 SHA-256."""
        payload = self.model_dump(mode="json", exclude={"output": {"path"}, "run": {"jobs"}})
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
