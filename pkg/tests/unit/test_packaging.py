"""패키지 구성 테스트 - 의존성 구분과 모듈 단독 import"""

import subprocess
import sys
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path

import pytest

PYPROJECT = Path(__file__).parent.parent.parent / "pyproject.toml"

MODULES = [
    "twoway.norms",
    "twoway.periodic",
    "twoway.problems",
    "twoway.solver",
    "twoway.cli",
]


def _names(requirements):
    return {req.split(">")[0].split("=")[0].strip().lower() for req in requirements}


class TestDependencies:
    """런타임 의존성과 개발 의존성 구분"""

    @pytest.fixture(scope="class")
    def manifest(self):
        with PYPROJECT.open("rb") as f:
            return tomllib.load(f)

    def test_runtime_stack(self, manifest):
        runtime = _names(manifest["project"]["dependencies"])
        assert runtime == {"numpy", "scipy", "pydantic", "pyyaml"}

    @pytest.mark.important
    def test_type_stubs_are_dev_only(self, manifest):
        runtime = _names(manifest["project"]["dependencies"])
        dev = _names(manifest["tool"]["uv"]["dev-dependencies"])
        assert "types-pyyaml" not in runtime
        assert {"types-pyyaml", "mypy"} <= dev


class TestModuleImports:
    """새 인터프리터에서 각 모듈을 먼저 import 해도 순환이 없음"""

    @pytest.mark.critical
    @pytest.mark.parametrize("module", MODULES)
    def test_import_first(self, module):
        result = subprocess.run(
            [sys.executable, "-c", f"import {module}"],
            capture_output=True,
            text=True,
            cwd=PYPROJECT.parent,
        )
        assert result.returncode == 0, result.stderr
