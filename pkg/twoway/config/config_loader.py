"""설정 파일 로더 (Pydantic 기반).

병합 순서: config/default.yaml → config/{TWOWAY_ENV}.yaml → 사용자 설정 파일 → 명령행 플래그
"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from pydantic import ValidationError

from ..exceptions import ConfigurationError
from .schemas import RunConfig

logger = logging.getLogger(__name__)

ENV_VAR = "TWOWAY_ENV"


class ConfigLoader:
    """설정 파일을 로드하고 RunConfig로 검증하는 클래스"""

    def __init__(self, config_dir: Optional[Path] = None):
        """
        Args:
            config_dir: 설정 파일 디렉토리 경로. None이면 프로젝트 루트의 config 사용
        """
        if config_dir is None:
            project_root = Path(__file__).parent.parent.parent
            config_dir = project_root / "config"

        self.config_dir = Path(config_dir)
        self._environment = os.getenv(ENV_VAR, "development")
        self._raw_cache: Optional[Dict[str, Any]] = None

        if not self.config_dir.exists():
            # 설치된 패키지에는 config 디렉토리가 없을 수 있음 (스키마 기본값 사용)
            logger.debug(f"Config directory not found, using schema defaults: {self.config_dir}")

    @property
    def environment(self) -> str:
        return self._environment

    def load_config(
        self,
        user_file: Optional[Path] = None,
        overrides: Optional[Dict[str, Any]] = None,
    ) -> RunConfig:
        """
        계층 설정을 병합하고 검증합니다.

        Args:
            user_file: --config 로 지정한 YAML 파일
            overrides: 명령행 플래그에서 온 중첩 딕셔너리 (None 값은 무시)

        Returns:
            검증된 RunConfig

        Raises:
            ConfigurationError: 파일 누락, YAML 파싱 오류, 스키마 검증 실패
        """
        merged = self._deep_merge(
            self._load_base_layers(), {"run": {"environment": self._environment}}
        )

        if user_file is not None:
            merged = self._deep_merge(merged, self._load_yaml_file(Path(user_file)))

        if overrides:
            merged = self._deep_merge(merged, _drop_none(overrides))

        return self.validate_config(merged)

    def _load_base_layers(self) -> Dict[str, Any]:
        if self._raw_cache is not None:
            return self._raw_cache

        config: Dict[str, Any] = {}
        default_path = self.config_dir / "default.yaml"
        if default_path.exists():
            config = self._load_yaml_file(default_path)

        env_path = self.config_dir / f"{self._environment}.yaml"
        if env_path.exists():
            config = self._deep_merge(config, self._load_yaml_file(env_path))

        self._raw_cache = config
        return config

    def _load_yaml_file(self, file_path: Path) -> Dict[str, Any]:
        """YAML 파일을 로드합니다."""
        try:
            with open(file_path, "r", encoding="utf-8") as f:
                content = yaml.safe_load(f)
        except FileNotFoundError:
            raise ConfigurationError(f"설정 파일을 찾을 수 없습니다: {file_path}")
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            where = f" (line {mark.line + 1}, column {mark.column + 1})" if mark else ""
            raise ConfigurationError(
                f"YAML 파싱 오류 in {file_path}{where}",
                problems=[str(e)],
            )

        if content is None:
            return {}
        if not isinstance(content, dict):
            raise ConfigurationError(
                f"설정 파일 내용이 딕셔너리가 아닙니다: {file_path}. "
                f"YAML 파일은 키-값 쌍을 포함해야 합니다."
            )
        return content

    def _deep_merge(self, base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
        """두 딕셔너리를 깊이 병합합니다."""
        result = base.copy()

        for key, value in override.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = self._deep_merge(result[key], value)
            else:
                result[key] = value

        return result

    def validate_config(self, config_dict: Dict[str, Any]) -> RunConfig:
        """딕셔너리 설정을 검증하고 RunConfig 인스턴스를 반환합니다."""
        try:
            return RunConfig(**config_dict)
        except ValidationError as e:
            error_messages = []
            for error in e.errors():
                loc = " -> ".join(str(x) for x in error["loc"]) or "<root>"
                error_messages.append(f"  - {loc}: {error['msg']}")
            raise ConfigurationError(
                "설정 검증 실패:\n" + "\n".join(error_messages),
                problems=error_messages,
            )

    def clear_cache(self) -> None:
        self._raw_cache = None


def _drop_none(tree: Dict[str, Any]) -> Dict[str, Any]:
    pruned: Dict[str, Any] = {}
    for key, value in tree.items():
        if isinstance(value, dict):
            inner = _drop_none(value)
            if inner:
                pruned[key] = inner
        elif value is not None:
            pruned[key] = value
    return pruned


# 전역 설정 로더 인스턴스
_config_loader: Optional[ConfigLoader] = None


def get_config_loader() -> ConfigLoader:
    """전역 설정 로더 인스턴스를 반환합니다."""
    global _config_loader
    if _config_loader is None:
        _config_loader = ConfigLoader()
    return _config_loader


def load_run_config(
    user_file: Optional[Path] = None, overrides: Optional[Dict[str, Any]] = None
) -> RunConfig:
    """편의 함수: 검증된 실행 설정을 가져옵니다."""
    return get_config_loader().load_config(user_file, overrides)
