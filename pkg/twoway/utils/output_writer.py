"""CSV/JSON 결과 파일 기록기

모든 파일은 설정 해시를 담은 헤더를 가진다. 본문은 설정과 시드가 같으면 바이트 단위로 동일하다.
"""

import csv
import json
import logging
import math
import threading
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..version import __version__

logger = logging.getLogger(__name__)

CSV_DIGITS = 17

Column = Tuple[str, str]


def format_float(value: float) -> str:
    """17 유효숫자 문자열"""
    return format(float(value), f".{CSV_DIGITS}g")


def to_jsonable(value: Any) -> Any:
    """numpy 값과 비유한 실수를 JSON으로 직렬화 가능한 형태로 변환"""
    if isinstance(value, Mapping):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, Enum):
        return value.value
    return value


class OutputWriter:
    """명령별 결과 디렉토리에 CSV/JSON을 기록하는 클래스"""

    def __init__(self, out_dir: Path, command: str, config_hash: str):
        """
        Args:
            out_dir: 출력 디렉토리 (없으면 생성)
            command: 명령 이름 (헤더에 기록)
            config_hash: 검증된 설정의 SHA-256
        """
        self.out_dir = Path(out_dir)
        self.command = command
        self.config_hash = config_hash
        self._locks: Dict[str, threading.Lock] = {}
        self._guard = threading.Lock()
        self.written: List[Path] = []
        self.out_dir.mkdir(parents=True, exist_ok=True)

    @property
    def header(self) -> str:
        return f"# twoway {self.command} config_hash={self.config_hash}"

    def _lock_for(self, name: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(name, threading.Lock())

    def write_csv(
        self,
        name: str,
        columns: Sequence[Column],
        rows: Iterable[Sequence[Any]],
    ) -> Path:
        """
        CSV 파일 기록

        Args:
            name: 파일 이름 (예: "sweep_L.csv")
            columns: (열 이름, 단위) 목록. 단위가 빈 문자열이면 무차원
            rows: 행 데이터. 실수는 17 유효숫자로 기록

        Returns:
            기록한 파일 경로
        """
        path = self.out_dir / name
        labels = [f"{col} [{unit}]" if unit else col for col, unit in columns]
        with self._lock_for(name):
            with open(path, "w", encoding="utf-8", newline="") as f:
                f.write(self.header + "\n")
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(labels)
                for row in rows:
                    if len(row) != len(columns):
                        raise ValueError(
                            f"{name}: row has {len(row)} fields, expected {len(columns)}"
                        )
                    writer.writerow([_cell(v) for v in row])
        self._record(path)
        return path

    def write_json(self, name: str, payload: Mapping[str, Any]) -> Path:
        """JSON 파일 기록 (키 정렬, meta 블록 포함)"""
        path = self.out_dir / name
        document = dict(to_jsonable(payload))
        document["meta"] = {
            "command": self.command,
            "config_hash": self.config_hash,
            "version": __version__,
        }
        text = json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False)
        with self._lock_for(name):
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write(text + "\n")
        self._record(path)
        return path

    def _record(self, path: Path) -> None:
        with self._guard:
            self.written.append(path)
        logger.debug(f"Wrote {path}")


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if value is None:
        return ""
    return str(value)


def read_csv_body(path: Path) -> Tuple[List[str], List[List[str]], Optional[str]]:
    """헤더 해시, 열 이름, 본문 행 반환 (테스트와 후처리용)"""
    with open(path, "r", encoding="utf-8", newline="") as f:
        first = f.readline().rstrip("\n")
        reader = csv.reader(f)
        labels = next(reader)
        rows = [row for row in reader]
    config_hash = first.split("config_hash=", 1)[1] if "config_hash=" in first else None
    return labels, rows, config_hash
