"""
Generador de reportes JSON por líneas
Un registro por verificación más un registro de resumen por suite
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List

import numpy as np

from src import __version__
from src.models import SuiteResult


logger = logging.getLogger(__name__)

TOOL_NAME = "tetradjet"


def _json_default(value: Any):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (set, frozenset, tuple)):
        return list(value)
    return str(value)


class ReportGenerator:
    """
    Serializa SuiteResult como JSON por líneas

    Con include_timing=False se omiten tiempos y marcas de fecha, y la salida
    es idéntica byte a byte para la misma entrada y semilla.
    """

    def __init__(self, include_timing: bool = True):
        self.include_timing = include_timing

    def summary(self, result: SuiteResult) -> Dict[str, Any]:
        passed = sum(1 for c in result.checks if c.passed)
        record = {
            "record": "summary",
            "tool": TOOL_NAME,
            "version": __version__,
            "suite": result.suite,
            "target": result.target,
            "input_digest": result.input_digest,
            "seed": result.seed,
            "grid": result.grid,
            "status": "pass" if result.success else "fail",
            "passed": passed,
            "total": len(result.checks),
            "error": result.error_message,
            "extra": result.extra,
        }
        if self.include_timing:
            record["timing"] = {
                "started_at": result.started_at.isoformat(timespec="seconds"),
                "execution_time_seconds": result.execution_time_seconds,
            }
        return record

    def records(self, result: SuiteResult) -> List[Dict[str, Any]]:
        checks = [c.to_dict(include_timing=self.include_timing) for c in result.checks]
        return checks + [self.summary(result)]

    def render(self, result: SuiteResult) -> str:
        lines = [
            json.dumps(record, sort_keys=True, ensure_ascii=False, default=_json_default)
            for record in self.records(result)
        ]
        return "\n".join(lines) + "\n"

    def write(self, result: SuiteResult, output_path: Path) -> Path:
        """
        Escribe el reporte en output_path (se crean los directorios faltantes)

        Returns:
            Ruta del archivo generado
        """
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        output_path.write_text(self.render(result), encoding="utf-8")
        logger.info(f"✅ Reporte generado: {output_path} ({len(result.checks)} verificaciones)")
        return output_path
