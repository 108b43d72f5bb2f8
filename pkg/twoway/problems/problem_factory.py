"""프리셋 + 덮어쓰기 값으로 ProblemSpec을 만드는 팩토리"""

import logging
from typing import Any, Dict, Optional

from ..exceptions import InvalidProblemError
from ..models import ProblemSpec
from .problem_registry import ProblemRegistry

logger = logging.getLogger(__name__)


class ProblemFactory:
    """문제 정의 팩토리 클래스"""

    @classmethod
    def create(cls, preset: str, overrides: Optional[Dict[str, Any]] = None) -> ProblemSpec:
        """프리셋 이름으로 검증된 문제 정의 생성

        Args:
            preset: 프리셋 이름 (예: "periodic-cos")
            overrides: 기본 매개변수 덮어쓰기 (None 값은 무시)

        Returns:
            ProblemSpec

        Raises:
            InvalidProblemError: 알 수 없는 프리셋이나 매개변수
        """
        entry = ProblemRegistry.get(preset)
        if entry is None:
            raise InvalidProblemError(
                f"알 수 없는 프리셋입니다. 사용 가능: {', '.join(ProblemRegistry.names())}",
                field="preset",
                value=preset,
            )
        given = {k: v for k, v in (overrides or {}).items() if v is not None}
        unknown = sorted(set(given) - set(entry.defaults))
        if unknown:
            raise InvalidProblemError(
                f"프리셋 '{preset}'에 없는 매개변수: {', '.join(unknown)}",
                field="overrides",
                value=unknown,
            )
        params = {**entry.defaults, **given}
        logger.debug(f"Creating problem '{preset}' with {params}")
        return entry.builder(params)

    @classmethod
    def is_supported(cls, preset: str) -> bool:
        return ProblemRegistry.get(preset) is not None


def cos_minus_r_spec(r: float, L: float = 1.0) -> ProblemSpec:
    """h = cos θ − r 주기 문제."""
    return ProblemFactory.create("periodic-cos-r", {"r": r, "L": L})
