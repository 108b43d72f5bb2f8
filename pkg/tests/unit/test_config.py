"""설정 로더와 스키마 테스트 - 계층 병합, 검증 오류, 설정 해시"""

from pathlib import Path

import pytest

from twoway.config import ConfigLoader, RunConfig
from twoway.config import config_loader as loader_module
from twoway.config.config_loader import get_config_loader, load_run_config
from twoway.exceptions import ConfigurationError
from twoway.models import Command, DirectMethod, LMode

PROJECT_CONFIG = Path(__file__).parent.parent.parent / "config"


def _write(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


@pytest.fixture
def config_dir(tmp_path, monkeypatch):
    """default.yaml + test.yaml 만 있는 임시 설정 디렉토리"""
    monkeypatch.setenv("TWOWAY_ENV", "test")
    _write(tmp_path / "default.yaml", "numerics:\n  n_modes: 32\nsolver:\n  tol: 1.0e-10\n")
    _write(tmp_path / "test.yaml", "numerics:\n  n_modes: 8\nlogging:\n  level: WARNING\n")
    return tmp_path


class TestConfigLoader:
    """계층 병합 순서"""

    @pytest.mark.critical
    def test_environment_layer_overrides_default(self, config_dir):
        config = ConfigLoader(config_dir).load_config()
        assert config.numerics.n_modes == 8
        assert config.solver.tol == 1e-10
        assert config.logging.level == "WARNING"
        assert config.run.environment == "test"

    def test_user_file_and_flags(self, config_dir):
        user = _write(
            config_dir / "run.yaml",
            "command: norms\nproblem:\n  preset: linear\nnumerics:\n  n_modes: 12\n",
        )
        config = ConfigLoader(config_dir).load_config(
            user, {"numerics": {"n_modes": 20, "n_nodes": None}, "problem": {"L": 2.0}}
        )
        assert config.command == Command.NORMS
        assert config.problem.preset == "linear"
        assert config.numerics.n_modes == 20
        assert config.numerics.n_nodes == 1024
        assert config.problem.overrides() == {"L": 2.0}

    def test_missing_directory_uses_schema_defaults(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TWOWAY_ENV", "production")
        config = ConfigLoader(tmp_path / "absent").load_config()
        assert config.numerics.n_modes == 32
        assert config.run.environment == "production"

    def test_missing_user_file(self, config_dir):
        with pytest.raises(ConfigurationError):
            ConfigLoader(config_dir).load_config(config_dir / "nope.yaml")

    @pytest.mark.critical
    def test_yaml_syntax_error_reports_line(self, config_dir):
        bad = _write(config_dir / "bad.yaml", "numerics:\n  n_modes: [1, 2\n")
        with pytest.raises(ConfigurationError) as exc_info:
            ConfigLoader(config_dir).load_config(bad)
        assert "line" in exc_info.value.message
        assert exc_info.value.details["problems"]

    def test_non_mapping_file(self, config_dir):
        bad = _write(config_dir / "list.yaml", "- 1\n- 2\n")
        with pytest.raises(ConfigurationError):
            ConfigLoader(config_dir).load_config(bad)

    def test_validation_error_lists_locations(self, config_dir):
        with pytest.raises(ConfigurationError) as exc_info:
            ConfigLoader(config_dir).load_config(overrides={"solver": {"oversample": 1}})
        assert "solver -> oversample" in exc_info.value.message

    def test_cache_is_cleared(self, config_dir):
        loader = ConfigLoader(config_dir)
        assert loader.load_config().numerics.n_modes == 8
        _write(config_dir / "test.yaml", "numerics:\n  n_modes: 4\n")
        assert loader.load_config().numerics.n_modes == 8
        loader.clear_cache()
        assert loader.load_config().numerics.n_modes == 4

    def test_global_loader(self, monkeypatch):
        monkeypatch.setattr(loader_module, "_config_loader", None)
        monkeypatch.setenv("TWOWAY_ENV", "test")
        loader = get_config_loader()
        assert loader is get_config_loader()
        assert loader.config_dir == PROJECT_CONFIG
        assert load_run_config().numerics.n_modes == 16


class TestRunConfig:
    """스키마 교차 검증"""

    def test_defaults(self):
        config = RunConfig()
        assert config.command == Command.SOLVE
        assert config.solver.direct_method == DirectMethod.PROJECTED
        assert config.norms.L_mode == LMode.DROP_TRANSCENDENTAL

    @pytest.mark.critical
    @pytest.mark.parametrize("command", ["pnorm", "diffusivity", "sweep-L"])
    def test_periodic_only_commands(self, command):
        with pytest.raises(ValueError):
            RunConfig(command=command, problem={"preset": "linear"})

    def test_fit_needs_five_points(self):
        with pytest.raises(ValueError):
            RunConfig(command="fit", norms={"N_values": [10, 20, 30]})

    def test_desk_scale_limit(self):
        with pytest.raises(ValueError):
            RunConfig(command="norms", norms={"N_values": [100, 4000]})

    def test_include_L_needs_length(self):
        with pytest.raises(ValueError):
            RunConfig(norms={"L_mode": "include_L"})
        assert RunConfig(norms={"L_mode": "include_L", "L": 2.0}).norms.L == 2.0

    @pytest.mark.parametrize(
        "sweep", [{"r_values": [0.0]}, {"r_values": [1.0]}, {"L_values": [-1.0]}]
    )
    def test_sweep_ranges(self, sweep):
        with pytest.raises(ValueError):
            RunConfig(sweep=sweep)

    def test_threshold_forms(self):
        assert RunConfig(solver={"lambda_threshold": "auto"}).solver.lambda_threshold == "auto"
        assert RunConfig(solver={"lambda_threshold": 1.5}).solver.lambda_threshold == 1.5
        with pytest.raises(ValueError):
            RunConfig(solver={"lambda_threshold": -1.0})

    @pytest.mark.critical
    def test_config_hash_ignores_output_and_jobs(self):
        base = RunConfig()
        moved = RunConfig(output={"path": "elsewhere"}, run={"jobs": 4})
        changed = RunConfig(numerics={"n_modes": 16})
        assert base.config_hash() == moved.config_hash()
        assert base.config_hash() != changed.config_hash()
        assert len(base.config_hash()) == 64
