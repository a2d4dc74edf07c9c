"""
Reports - Сохранение результатов
================================

CSV: pandas, float_format "%.17g"; при обрыве последней строкой идёт
"#TRUNCATED step=K".
JSON: {"columns", "rows", "truncated", "summary"}; float сериализуются
кратчайшим представлением, которое восстанавливает число бит в бит,
неконечные значения (NaN, ±inf) пишутся как null.

В файлах нет временных меток: одинаковый прогон даёт одинаковые байты.
"""

import json
import math
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from app.core.config import settings
from app.core.errors import ExportError
from app.core.logger import logger
from app.simulation.records import TrajectoryRecord

FORMATS = ("csv", "json")
TRUNCATION_MARKER = "#TRUNCATED"


def json_safe(value: Any) -> Any:
    """Заменить NaN и ±inf на None рекурсивно (строгий JSON)"""
    if isinstance(value, dict):
        return {k: json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if isinstance(value, np.ndarray):
        return json_safe(value.tolist())
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    return value


class ReportGenerator:
    """Запись траекторий и сводок"""

    def __init__(self, output_dir: Optional[Path] = None):
        self.output_dir = Path(output_dir) if output_dir is not None else settings.output_dir

    def _prepare(self, path: Path) -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ExportError(f"cannot create directory {path.parent}: {e}", path=str(path)) from e
        return path

    def write_trajectory(
        self,
        record: TrajectoryRecord,
        fmt: str,
        path: Optional[Path] = None,
        summary: Optional[Dict[str, Any]] = None,
        allow_empty: bool = False,
    ) -> Path:
        """
        Сохранить траекторию

        Args:
            allow_empty: разрешить пустую траекторию (обрыв на первом шаге)
        """
        if fmt not in FORMATS:
            raise ExportError(f"unknown format: {fmt}", format=fmt)
        if len(record) == 0 and not allow_empty:
            raise ExportError("empty trajectory record")
        path = self._prepare(path or self.output_dir / f"trajectory.{fmt}")

        try:
            if fmt == "csv":
                self._write_csv(record, path)
            else:
                self._write_json(record, path, summary)
        except OSError as e:
            raise ExportError(f"cannot write {path}: {e}", path=str(path)) from e

        logger.info(f"📄 Trajectory saved: {path} ({len(record)} rows)")
        return path

    def _write_csv(self, record: TrajectoryRecord, path: Path) -> None:
        record.to_frame().to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
        if record.truncated:
            with open(path, "a") as f:
                f.write(f"{TRUNCATION_MARKER} step={record.last_step + 1}\n")

    def _write_json(self, record: TrajectoryRecord, path: Path, summary: Optional[Dict[str, Any]]) -> None:
        data = record.to_dict()
        data["summary"] = summary or {}
        with open(path, "w") as f:
            json.dump(json_safe(data), f, indent=2, allow_nan=False)
            f.write("\n")

    def write_summary(self, summary: Dict[str, Any], path: Optional[Path] = None) -> Path:
        path = self._prepare(path or self.output_dir / "summary.json")
        try:
            with open(path, "w") as f:
                json.dump(json_safe(summary), f, indent=2, allow_nan=False)
                f.write("\n")
        except OSError as e:
            raise ExportError(f"cannot write {path}: {e}", path=str(path)) from e
        logger.info(f"📄 Summary saved: {path}")
        return path

    def load_trajectory(self, path: Path) -> TrajectoryRecord:
        """Прочитать траекторию из CSV или JSON"""
        path = Path(path)
        if not path.is_file():
            raise ExportError(f"no such file: {path}", path=str(path))

        try:
            if path.suffix == ".json":
                with open(path) as f:
                    data = json.load(f)
                frame = pd.DataFrame(data["rows"], columns=data["columns"])
                truncated = bool(data.get("truncated", False))
            else:
                frame = pd.read_csv(path, comment="#", float_precision="round_trip")
                with open(path) as f:
                    truncated = any(line.startswith(TRUNCATION_MARKER) for line in f)
            return TrajectoryRecord.from_frame(frame, truncated=truncated)
        except (OSError, KeyError, ValueError) as e:
            raise ExportError(f"cannot read trajectory {path}: {e}", path=str(path)) from e

    def export(self, source: Path, fmt: str, destination: Path) -> Path:
        """Конвертировать сохранённую траекторию в другой формат"""
        record = self.load_trajectory(source)
        summary = None
        if Path(source).suffix == ".json":
            with open(source) as f:
                summary = json.load(f).get("summary")
        return self.write_trajectory(record, fmt, destination, summary=summary, allow_empty=record.truncated)

    def generate_summary(self, summary: Dict[str, Any]) -> str:
        """Текстовая сводка для консоли"""
        lines = [
            "=" * 60,
            f"SIMULATION SUMMARY: {summary.get('scenario', '?')}",
            "=" * 60,
            "",
        ]
        for key, value in summary.items():
            if isinstance(value, float):
                lines.append(f"   {key}: {value:.6g}")
            elif isinstance(value, list) and value and isinstance(value[0], float):
                lines.append(f"   {key}: [{', '.join(f'{v:.6g}' for v in value)}]")
            elif not isinstance(value, dict):
                lines.append(f"   {key}: {value}")
        lines.append("")
        lines.append("=" * 60)
        return "\n".join(lines)
