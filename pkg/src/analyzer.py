"""
Analizador de residuos usando Pandas
Tablas por punto y componente, normas por ecuación y exportación CSV/JSON
"""

import logging
from itertools import product
from pathlib import Path
from typing import List, Optional, Sequence

import pandas as pd

from src.config import EXPORT_CSV, REPORTS_DIR
from src.exprdsl import DEFAULT_COORDS
from src.models import ResidualReport, SuiteResult
from src.utils import format_timestamp


logger = logging.getLogger(__name__)

# Etiquetas de componentes: resA[i, λ, σ] y resB[p, ν]
_COMPONENTS_A = [f"{i},{l},{s}" for i, l, s in product(range(4), repeat=3)]
_COMPONENTS_B = [f"{p},{n}" for p, n in product(range(4), repeat=2)]


class ResidualAnalyzer:
    """
    Convierte un ResidualReport en DataFrame y calcula estadísticas
    """

    def __init__(self, report: ResidualReport, coords: Sequence[str] = DEFAULT_COORDS):
        """
        Args:
            report: residuos evaluados sobre la malla
            coords: nombres de columna para las coordenadas del punto
        """
        self.report = report
        self.coords = tuple(coords)
        self.df: Optional[pd.DataFrame] = None

    def load_data(self) -> pd.DataFrame:
        """
        Una fila por punto, ecuación y componente

        Columns: point, <coords...>, equation ('A' | 'B'), component, value
        """
        rows = []
        for k, x in enumerate(self.report.grid):
            base = {"point": k, **{name: float(v) for name, v in zip(self.coords, x)}}
            for label, value in zip(_COMPONENTS_A, self.report.resA[k].ravel()):
                rows.append({**base, "equation": "A", "component": label, "value": float(value)})
            for label, value in zip(_COMPONENTS_B, self.report.resB[k].ravel()):
                rows.append({**base, "equation": "B", "component": label, "value": float(value)})

        self.df = pd.DataFrame(rows)
        logger.info(f"✅ {len(self.report.grid)} puntos cargados ({len(self.df)} filas)")
        return self.df

    def _frame(self) -> pd.DataFrame:
        if self.df is None:
            self.load_data()
        return self.df

    def norms(self) -> pd.DataFrame:
        """max_abs y rms por ecuación"""
        df = self._frame().assign(abs_value=lambda d: d["value"].abs(), sq=lambda d: d["value"] ** 2)
        grouped = df.groupby("equation").agg(max_abs=("abs_value", "max"), mean_sq=("sq", "mean"))
        grouped["rms"] = grouped.pop("mean_sq") ** 0.5
        return grouped

    def worst_points(self, n: int = 5) -> pd.DataFrame:
        """Los n puntos con mayor |residuo| de cada ecuación"""
        df = self._frame().assign(abs_value=lambda d: d["value"].abs())
        per_point = df.groupby(["equation", "point"], as_index=False)["abs_value"].max()
        return (
            per_point.sort_values(["equation", "abs_value"], ascending=[True, False])
            .groupby("equation")
            .head(n)
            .reset_index(drop=True)
        )

    def export_csv(self, filepath: Optional[Path] = None) -> Optional[Path]:
        if not EXPORT_CSV:
            logger.warning("⚠️ Exportación CSV deshabilitada (EXPORT_CSV=false)")
            return None
        if filepath is None:
            filepath = REPORTS_DIR / f"residuos_{format_timestamp()}.csv"
        filepath = Path(filepath)
        filepath.parent.mkdir(parents=True, exist_ok=True)
        self._frame().to_csv(filepath, index=False, encoding="utf-8")
        logger.info(f"✅ CSV exportado: {filepath}")
        return filepath

    def export_json(self, filepath: Path) -> Path:
        filepath = Path(filepath)
        filepath.parent.mkdir(parents=True, exist_ok=True)
        self._frame().to_json(filepath, orient="records", indent=2)
        logger.info(f"✅ JSON exportado: {filepath}")
        return filepath


def checks_frame(results: List[SuiteResult]) -> pd.DataFrame:
    """Tabla de verificaciones de varias suites (una fila por check)"""
    rows = [
        {
            "suite": r.suite,
            "target": r.target,
            "check": c.name,
            "status": c.status,
            "max_deviation": c.max_deviation,
            "tolerance": c.tolerance,
        }
        for r in results
        for c in r.checks
    ]
    return pd.DataFrame(rows, columns=["suite", "target", "check", "status", "max_deviation", "tolerance"])
