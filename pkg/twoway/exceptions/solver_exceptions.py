"""솔버 커스텀 예외 클래스들"""

from typing import Any, Dict, List, Optional


class TwoWayError(Exception):
    """기본 솔버 에러 클래스"""

    def __init__(
        self,
        message: str,
        error_code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        self.message = message
        self.error_code = error_code or self.__class__.__name__
        self.details = details or {}
        super().__init__(self.message)

    def to_dict(self) -> Dict[str, Any]:
        """에러를 딕셔너리로 변환 (로그/출력용)"""
        return {
            "error_code": self.error_code,
            "message": self.message,
            "details": self.details,
        }


class InvalidProblemError(TwoWayError):
    """문제 정의 검증 에러"""

    def __init__(
        self,
        message: str = "잘못된 문제 정의입니다",
        field: Optional[str] = None,
        value: Optional[Any] = None,
    ):
        details: Dict[str, Any] = {}
        if field:
            details["field"] = field
        if value is not None:
            details["value"] = value
        super().__init__(message, "INVALID_PROBLEM", details)


class GridError(TwoWayError):
    """구적 격자 구성 에러"""

    def __init__(self, message: str, n_nodes: Optional[int] = None):
        details = {"n_nodes": n_nodes} if n_nodes is not None else {}
        super().__init__(message, "GRID_ERROR", details)


class SpectrumError(TwoWayError):
    """고유값 문제 풀이 실패"""

    def __init__(self, message: str, requested: int, resolved: int, basis_size: int):
        details = {
            "requested_per_sign": requested,
            "resolved_per_sign": resolved,
            "basis_size": basis_size,
        }
        super().__init__(message, "SPECTRUM_FAILURE", details)


class ZeroModeError(TwoWayError):
    """영 모드(상수 고유함수)가 없거나 g를 정의할 수 없음"""

    def __init__(self, message: str = "영 모드가 없는 문제입니다"):
        super().__init__(message, "NO_ZERO_MODE")


class SingularSystemError(TwoWayError):
    """특이(또는 거의 특이) 선형 시스템 에러"""

    def __init__(self, message: str, condition: float):
        super().__init__(message, "SINGULAR_SYSTEM", {"condition": condition})


class ThresholdError(TwoWayError):
    """퇴화된 Λ 임계값 에러"""

    def __init__(self, threshold: float, largest: float):
        message = "Λ가 모든 |λ_j|보다 커서 사영이 퇴화됩니다"
        details = {"threshold": threshold, "largest_eigenvalue": largest}
        super().__init__(message, "DEGENERATE_THRESHOLD", details)


class RankDeficiencyError(TwoWayError):
    """최소제곱 시스템 계수 부족 에러"""

    def __init__(self, singular_value: float, rank: int, unknowns: int):
        message = "최소제곱 시스템의 계수가 부족합니다"
        details = {
            "singular_value": singular_value,
            "rank": rank,
            "unknowns": unknowns,
        }
        super().__init__(message, "RANK_DEFICIENT", details)


class PreconditionError(TwoWayError):
    """연산 전제 조건 위반"""

    def __init__(self, message: str, **details: Any):
        super().__init__(message, "PRECONDITION_FAILED", dict(details))


class OutOfRangeError(TwoWayError):
    """허용 범위를 벗어난 인자"""

    def __init__(self, name: str, value: float, low: float, high: float):
        message = f"{name}={value} 값이 허용 범위 [{low}, {high}]를 벗어났습니다"
        details = {"name": name, "value": value, "range": [low, high]}
        super().__init__(message, "OUT_OF_RANGE", details)


class FitError(TwoWayError):
    """거듭제곱 법칙 적합 에러"""

    def __init__(self, message: str, n_points: int):
        super().__init__(message, "FIT_ERROR", {"n_points": n_points})


class ConfigurationError(TwoWayError):
    """설정 관련 오류"""

    def __init__(self, message: str, problems: Optional[List[str]] = None):
        details = {"problems": problems} if problems else {}
        super().__init__(message, "INVALID_CONFIG", details)


class ConvergenceError(TwoWayError):
    """Neumann 급수 미수렴 (부분 결과는 이미 기록됨)"""

    def __init__(self, message: str, iterations: int, final_increment: float):
        details = {"iterations": iterations, "final_increment": final_increment}
        super().__init__(message, "NOT_CONVERGED", details)
