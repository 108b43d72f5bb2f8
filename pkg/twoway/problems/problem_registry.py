"""문제 프리셋 레지스트리 - 내장 문제 메타데이터와 생성 함수 관리"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from ..models import (
    BoundaryCondition,
    BoundaryData,
    BoundaryKind,
    Coefficient,
    ProblemSpec,
    TabulatedFunction,
    Weight,
    WeightKind,
)

Builder = Callable[[Dict[str, Any]], ProblemSpec]


@dataclass
class ProblemPreset:
    """내장 문제 프리셋"""

    name: str
    display_name: str
    description: str
    builder: Builder
    defaults: Dict[str, Any] = field(default_factory=dict)
    is_active: bool = True


class ProblemRegistry:
    """문제 프리셋 레지스트리 클래스

    프리셋 이름으로 문제 정의 생성 함수와 기본 매개변수를 조회
    """

    _presets: Dict[str, ProblemPreset] = {}

    @classmethod
    def register(cls, preset: ProblemPreset) -> None:
        """프리셋 등록

        Args:
            preset: 등록할 프리셋
        """
        cls._presets[preset.name] = preset

    @classmethod
    def get(cls, name: str) -> Optional[ProblemPreset]:
        return cls._presets.get(name)

    @classmethod
    def get_all(cls, active_only: bool = True) -> List[ProblemPreset]:
        """등록된 프리셋 목록 (등록 순서)"""
        presets = list(cls._presets.values())
        if active_only:
            presets = [preset for preset in presets if preset.is_active]
        return presets

    @classmethod
    def names(cls) -> List[str]:
        return [preset.name for preset in cls.get_all()]


def _boundary_data(params: Dict[str, Any]) -> BoundaryData:
    return BoundaryData(rho_plus=float(params["rho_plus"]), rho_minus=float(params["rho_minus"]))


def _periodic(params: Dict[str, Any], weight: Weight, name: str) -> ProblemSpec:
    return ProblemSpec(
        a=-np.pi,
        b=np.pi,
        weight=weight,
        bc=BoundaryCondition(BoundaryKind.PERIODIC),
        L=float(params["L"]),
        p=Coefficient(float(params["p"])),
        w=_boundary_data(params),
        name=name,
    )


def _absorbing(kind: WeightKind, name: str) -> Builder:
    def build(params: Dict[str, Any]) -> ProblemSpec:
        return ProblemSpec(
            a=-1.0,
            b=1.0,
            weight=Weight(kind),
            bc=BoundaryCondition(BoundaryKind.DIRICHLET),
            L=float(params["L"]),
            p=Coefficient(float(params["p"])),
            w=_boundary_data(params),
            name=name,
        )

    return build


def _build_bothe(params: Dict[str, Any]) -> ProblemSpec:
    eps = float(params["epsilon"])
    theta = np.linspace(eps, np.pi - eps, int(params["n_samples"]))
    return ProblemSpec(
        a=float(theta[0]),
        b=float(theta[-1]),
        weight=Weight(
            WeightKind.TABULATED,
            table=TabulatedFunction(theta, np.sin(theta) * np.cos(theta)),
        ),
        bc=BoundaryCondition(BoundaryKind.NEUMANN),
        L=float(params["L"]),
        p=Coefficient(table=TabulatedFunction(theta, np.sin(theta))),
        w=_boundary_data(params),
        name="bothe",
    )


def _build_fokker_planck(params: Dict[str, Any]) -> ProblemSpec:
    v_max = float(params["v_max"])
    v = np.linspace(-v_max, v_max, int(params["n_samples"]))
    gauss = np.exp(-0.5 * v**2)
    return ProblemSpec(
        a=-v_max,
        b=v_max,
        weight=Weight(WeightKind.TABULATED, table=TabulatedFunction(v, v * gauss)),
        bc=BoundaryCondition(BoundaryKind.NEUMANN),
        L=float(params["L"]),
        p=Coefficient(table=TabulatedFunction(v, gauss)),
        w=_boundary_data(params),
        name="fokker-planck",
    )


COMMON_DEFAULTS: Dict[str, Any] = {"L": 1.0, "p": 1.0, "rho_plus": 1.0, "rho_minus": 2.0}


def register_default_problems() -> None:
    """기본 문제 프리셋들을 레지스트리에 등록"""
    ProblemRegistry.register(
        ProblemPreset(
            name="periodic-cos",
            display_name="주기 cos θ",
            description="h = cos θ, θ ∈ [−π, π) 주기 경계 (자가 추진 입자 채널)",
            builder=lambda params: _periodic(params, Weight(WeightKind.COS), "periodic-cos"),
            defaults=dict(COMMON_DEFAULTS),
        )
    )
    ProblemRegistry.register(
        ProblemPreset(
            name="periodic-cos-r",
            display_name="주기 cos θ − r",
            description="h = cos θ − r, 0 ≤ r < 1 주기 경계 (작은 고유값 λ_R ≈ 2r)",
            builder=lambda params: _periodic(
                params,
                Weight(WeightKind.COS_MINUS_R, r=float(params["r"])),
                "periodic-cos-r",
            ),
            defaults={**COMMON_DEFAULTS, "r": 0.1},
        )
    )
    for name, kind, label in (
        ("step", WeightKind.SGN, "sgn θ"),
        ("linear", WeightKind.LINEAR, "θ"),
        ("cubic", WeightKind.CUBIC, "θ³"),
    ):
        ProblemRegistry.register(
            ProblemPreset(
                name=name,
                display_name=f"h = {label}",
                description=f"h = {label}, −1 < θ < 1 흡수 (Dirichlet) 경계",
                builder=_absorbing(kind, name),
                defaults=dict(COMMON_DEFAULTS),
            )
        )
    ProblemRegistry.register(
        ProblemPreset(
            name="bothe",
            display_name="운동론 경계층",
            description="h = sin θ cos θ, p = sin θ, [ε, π − ε] Neumann 경계 (표본 함수)",
            builder=_build_bothe,
            defaults={**COMMON_DEFAULTS, "epsilon": 0.05, "n_samples": 2049},
        )
    )
    ProblemRegistry.register(
        ProblemPreset(
            name="fokker-planck",
            display_name="속도 Fokker–Planck",
            description="p = e^{−v²/2}, h = v e^{−v²/2}, [−V, V] 무유속 경계 (표본 함수)",
            builder=_build_fokker_planck,
            defaults={**COMMON_DEFAULTS, "v_max": 4.0, "n_samples": 2049},
        )
    )


# 모듈 로드 시 기본 프리셋 등록
register_default_problems()
