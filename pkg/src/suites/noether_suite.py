"""
Suite `noether`: corrientes de campos de Noether sobre una sección crítica
"""

from typing import List, Optional, Sequence

import numpy as np

from src.config import GRID_INSET, TF_THREADS, TOLERANCES
from src.exceptions import NotCritical
from src.models import SuiteResult
from src.noether import NoetherField, current, defect_exponent, divergence_identity_gap
from src.specfile import SpecFile
from src.suites.base_suite import BaseSuite
from src.transforms import JVectorField
from src.utils import build_grid, parallel_map
from src.variational import residual_report


class NoetherSuite(BaseSuite):
    """
    Checks por campo: divergence (|∂J| relativo a 1 + max|J|),
    identity (identidad de divergencia fuera de la capa de masa) y,
    con defect=True, defect_exponent (pendiente ≈ 2 de una simetría)
    """

    name = "noether"

    def __init__(
        self,
        spec: SpecFile,
        fields: Sequence[JVectorField],
        counts: Sequence[int] = (2, 5, 5, 2),
        defect: bool = False,
        threads: int = TF_THREADS,
    ):
        super().__init__(spec.name, threads)
        if not fields:
            raise ValueError("se requiere al menos un campo (--translate o [vectorfield])")
        self.spec = spec
        self.fields = list(fields)
        self.counts = tuple(int(c) for c in counts)
        self.defect = defect
        self.currents: List[np.ndarray] = []

    def execute(self, result: SuiteResult) -> None:
        spec = self.spec
        result.input_digest = spec.digest
        result.grid = {"counts": list(self.counts), "inset": GRID_INSET}
        grid = build_grid(spec.domain, self.counts, GRID_INSET)
        section = spec.section()

        baseline = residual_report(section, grid, self.threads)
        worst = max(baseline.norms["resA_rms"], baseline.norms["resB_rms"])
        if worst > TOLERANCES["critical"]:
            raise NotCritical(worst, TOLERANCES["critical"])
        self.logger.info(f"Sección crítica (rms {worst:.2e}); {len(self.fields)} campo(s) sobre {len(grid)} puntos")

        for X in self.fields:
            Z = NoetherField(X)
            label = X.name or "campo"
            values = parallel_map(lambda x: current(section, Z, x), grid, self.threads)
            self.currents = [v.J for v in values]
            scale = 1.0 + max(float(np.max(np.abs(v.J))) for v in values)
            divergences = np.array([abs(v.div) for v in values])
            k = int(np.argmax(divergences))
            self.measure(
                f"divergence[{label}]",
                lambda: (float(divergences[k]) / scale, {
                    "max_abs_J": scale - 1.0,
                    "worst_point": [float(c) for c in grid[k]],
                }),
                TOLERANCES["noether_div"],
                spec.expects_failure("divergence"),
            )

            gaps = parallel_map(lambda x: abs(divergence_identity_gap(section, Z, x)), grid, self.threads)
            self.measure(
                f"identity[{label}]",
                lambda: (max(gaps) / scale, {}),
                TOLERANCES["noether_div"],
                spec.expects_failure("identity"),
            )

            if self.defect:
                self.measure(
                    f"defect_exponent[{label}]",
                    lambda: self._defect(section, X, grid),
                    TOLERANCES["defect_slope"],
                    spec.expects_failure("defect_exponent"),
                )

    def _defect(self, section, X: JVectorField, grid) -> tuple:
        """|pendiente − 2|; un defecto nulo en ambos pasos cuenta como simetría exacta"""
        slope, (big, small) = defect_exponent(section, X, grid, threads=self.threads)
        details = {"slope": slope, "defects": [big, small]}
        if max(big, small) < TOLERANCES["critical"]:
            return 0.0, {**details, "exact": True}
        return abs(slope - 2.0), details


def translation_fields(spec: SpecFile, names: Optional[Sequence[str]]) -> List[JVectorField]:
    """Traslaciones ∂/∂x^k para los nombres de coordenada dados"""
    fields = []
    for name in names or []:
        if name in spec.coords:
            axis = spec.coords.index(name)
        elif name.isdigit() and int(name) < 4:
            axis = int(name)
        else:
            raise ValueError(f"coordenada desconocida para --translate: {name}")
        field = JVectorField.translation(axis)
        field.name = f"∂{spec.coords[axis]}"
        fields.append(field)
    return fields
