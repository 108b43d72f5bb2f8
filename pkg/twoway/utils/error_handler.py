"""전역 에러 핸들러 및 로깅 시스템"""

import json
import logging
from datetime import datetime
from typing import Any, Dict, Optional

from ..exceptions import ConfigurationError, ConvergenceError, InvalidProblemError, TwoWayError

logger = logging.getLogger(__name__)

DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_NOT_CONVERGED = 2
EXIT_INVALID_CONFIG = 3


class ErrorHandler:
    """전역 에러 처리 및 로깅 클래스."""

    @staticmethod
    def setup_logging(
        level: str = "INFO",
        log_file: Optional[str] = None,
        fmt: str = DEFAULT_FORMAT,
    ) -> None:
        """로깅 시스템 설정.

        Args:
            level: 로그 레벨 이름
            log_file: 지정하면 UTF-8 FileHandler 추가
            fmt: 로그 포맷
        """
        handlers: list[logging.Handler] = [logging.StreamHandler()]
        if log_file:
            handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
        logging.basicConfig(level=level, format=fmt, handlers=handlers, force=True)

    @staticmethod
    def exit_code(error: BaseException) -> int:
        """예외를 CLI 종료 코드로 변환"""
        if isinstance(error, (ConfigurationError, InvalidProblemError)):
            return EXIT_INVALID_CONFIG
        if isinstance(error, ConvergenceError):
            return EXIT_NOT_CONVERGED
        return EXIT_FAILURE

    @staticmethod
    def handle_cli_error(error: BaseException, context: Optional[Dict[str, Any]] = None) -> int:
        """
        명령 실행 중 발생한 에러 처리

        Args:
            error: 발생한 예외
            context: 추가 컨텍스트 정보 (명령, 프리셋 등)

        Returns:
            int: 프로세스 종료 코드
        """
        ErrorHandler._log_error(error, "CLI", context or {})
        return ErrorHandler.exit_code(error)

    @staticmethod
    def _log_error(error: BaseException, error_type: str, context: Dict[str, Any]) -> None:
        """에러 로깅."""
        error_info: Dict[str, Any] = {
            "error_type": error_type,
            "exception_class": error.__class__.__name__,
            "message": str(error),
            "context": context,
            "timestamp": datetime.now().isoformat(),
        }

        if isinstance(error, TwoWayError):
            error_info.update({"error_code": error.error_code, "details": error.details})
            logger.warning(
                f"Solver Error: {json.dumps(error_info, ensure_ascii=False, default=str)}"
            )
        else:
            logger.error(
                f"Unexpected Error: {json.dumps(error_info, ensure_ascii=False, default=str)}",
                exc_info=True,
            )

    @staticmethod
    def create_user_friendly_message(error: BaseException) -> str:
        """사용자 친화적 에러 메시지 생성."""
        if isinstance(error, TwoWayError):
            return error.message

        error_messages = {
            "ValueError": "입력 값이 올바르지 않습니다",
            "KeyError": "필수 정보가 누락되었습니다",
            "FileNotFoundError": "파일을 찾을 수 없습니다",
            "PermissionError": "파일 접근 권한이 없습니다",
            "LinAlgError": "선형대수 계산에 실패했습니다",
        }
        return error_messages.get(error.__class__.__name__, "알 수 없는 오류가 발생했습니다")
