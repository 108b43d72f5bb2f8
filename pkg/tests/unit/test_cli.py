"""명령행 진입점 테스트 - 종료 코드, 출력 파일, 재현성"""

import json

import pytest

from twoway import cli
from twoway.config import config_loader as loader_module
from twoway.problems import ProblemRegistry
from twoway.utils.output_writer import read_csv_body

from ..conftest import TEST_CONFIG


@pytest.fixture(autouse=True)
def test_environment(monkeypatch):
    """프로젝트 config/test.yaml 을 쓰는 새 전역 로더"""
    monkeypatch.setenv("TWOWAY_ENV", "test")
    monkeypatch.delenv(cli.JOBS_ENV, raising=False)
    monkeypatch.setattr(loader_module, "_config_loader", None)


def _read_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


class TestArguments:
    """인자 파싱"""

    @pytest.mark.critical
    def test_unknown_command_exits_with_config_code(self):
        with pytest.raises(SystemExit) as exc_info:
            cli.main(["integrate"])
        assert exc_info.value.code == 3

    def test_threshold_flag(self):
        args = cli.build_parser().parse_args(["solve", "--threshold", "auto"])
        assert cli.overrides_from_args(args)["solver"]["lambda_threshold"] == "auto"
        args = cli.build_parser().parse_args(["solve", "--threshold", "0.7"])
        assert cli.overrides_from_args(args)["solver"]["lambda_threshold"] == 0.7
        with pytest.raises(SystemExit):
            cli.build_parser().parse_args(["solve", "--threshold", "many"])

    def test_jobs_from_environment(self, monkeypatch):
        monkeypatch.setenv(cli.JOBS_ENV, "3")
        args = cli.build_parser().parse_args(["sweep-r"])
        assert cli.overrides_from_args(args)["run"]["jobs"] == 3


class TestCommands:
    """명령 실행과 결과 파일"""

    def test_presets(self, tmp_path, capsys):
        assert cli.main(["presets", "--out", str(tmp_path)]) == 0
        document = _read_json(tmp_path / "presets.json")
        assert [p["name"] for p in document["presets"]] == ProblemRegistry.names()
        assert "periodic-cos" in capsys.readouterr().out

    @pytest.mark.critical
    def test_pnorm(self, tmp_path):
        assert cli.main(["pnorm", "--N", "8", "--out", str(tmp_path)]) == 0
        document = _read_json(tmp_path / "pnorm.json")
        assert document["p_norm"] == pytest.approx(TEST_CONFIG["p_norm"], rel=1e-12)
        assert document["p_norm_numeric"] == pytest.approx(TEST_CONFIG["p_norm"], abs=1e-3)
        assert document["meta"]["command"] == "pnorm"

    @pytest.mark.critical
    def test_reruns_are_byte_identical(self, tmp_path):
        first, second = tmp_path / "first", tmp_path / "second"
        for out in (first, second):
            assert cli.main(["spectrum", "--N", "8", "--out", str(out)]) == 0
        names = sorted(p.name for p in first.iterdir())
        assert names == sorted(p.name for p in second.iterdir())
        assert "spectrum.csv" in names and "g.csv" in names
        for name in names:
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_solve_absorbing_preset(self, tmp_path):
        code = cli.main(["solve", "--preset", "linear", "--N", "8", "--out", str(tmp_path)])
        assert code == 0
        document = _read_json(tmp_path / "solution.json")
        assert document["problem"] == "linear"
        assert "flux" not in document
        labels, rows, _ = read_csv_body(tmp_path / "profile.csv")
        assert labels == ["x [length]", "theta [rad]", "f [density]"]
        assert len(rows) == 5 * 9

    def test_solve_periodic_writes_flux_and_series(self, tmp_path):
        assert cli.main(["solve", "--N", "16", "--out", str(tmp_path)]) == 0
        document = _read_json(tmp_path / "solution.json")
        assert document["solution"]["converged"] is True
        assert "series" in document
        assert document["flux"] < 0.0


class TestFailures:
    """실패 종료 코드"""

    @pytest.mark.critical
    def test_bad_yaml(self, tmp_path):
        bad = tmp_path / "bad.yaml"
        bad.write_text("solver:\n  tol: [1\n", encoding="utf-8")
        assert cli.main(["solve", "--config", str(bad), "--out", str(tmp_path)]) == 3

    def test_unknown_preset(self, tmp_path):
        assert cli.main(["solve", "--preset", "sphere", "--out", str(tmp_path)]) == 3

    def test_periodic_only_command_on_absorbing_preset(self, tmp_path):
        assert cli.main(["pnorm", "--preset", "step", "--out", str(tmp_path)]) == 3
