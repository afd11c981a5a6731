"""
Suite `verify`: validaciones cruzadas de geometría, holonomía, residuos y
oráculo de Einstein sobre la malla del dominio de un spec
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from src.config import DEFAULT_GRID_POINTS, GRID_INSET, TF_THREADS, TOLERANCES
from src.geometry import (
    antisym_jet, christoffel, covariant_ext_diff, jet_from_spin, metric_from_tetrad,
    spin_from_christoffel, spin_from_tetrad, tetrad_at,
)
from src.models import ResidualReport, SuiteResult
from src.sections import Section
from src.specfile import SpecFile
from src.suites.base_suite import BaseSuite, Measurement
from src.transforms import contact_pullback, frame_point, transform_section
from src.utils import build_grid, parallel_map, relative_deviation
from src.variational import einstein_oracle, residual_B, residuals_at, transform_residual_B


@dataclass
class PointRecord:
    """Desviaciones de todas las verificaciones en un punto de la malla"""

    x: np.ndarray
    two_route: float
    roundtrip: float
    torsion: float
    contact: float
    res_a: np.ndarray
    res_b: np.ndarray
    einstein: float
    covariance: Optional[float] = None


class VerifySuite(BaseSuite):
    """
    Verificaciones de un spec sobre una malla uniforme

    Checks: two_route, roundtrip, torsion, contact, residual_A, vacuum,
    einstein y, si el spec declara [lorentz] o [coordchange], covariance.
    """

    name = "verify"

    def __init__(
        self,
        spec: SpecFile,
        counts: Sequence[int] = (DEFAULT_GRID_POINTS,) * 4,
        threads: int = TF_THREADS,
    ):
        super().__init__(spec.name, threads)
        self.spec = spec
        self.counts = tuple(int(c) for c in counts)
        self.report: Optional[ResidualReport] = None
        self.records: List[PointRecord] = []

    def execute(self, result: SuiteResult) -> None:
        spec = self.spec
        result.input_digest = spec.digest
        result.grid = {"counts": list(self.counts), "inset": GRID_INSET, "domain": [list(iv) for iv in spec.domain]}
        grid = build_grid(spec.domain, self.counts, GRID_INSET)
        self.logger.info(f"Evaluando {len(grid)} puntos con {self.threads} hilo(s)")

        section = spec.section()
        induced = Section(section.tetrad, name=section.name)
        transformed = None
        if spec.lorentz is not None or spec.forward is not None:
            lorentz, change = spec.lorentz_field(), spec.coord_change()
            change.verify(grid)
            transformed = (lorentz, change, transform_section(section, lorentz, change))

        self.records = parallel_map(lambda x: self._evaluate(section, induced, transformed, x), grid, self.threads)
        self.report = ResidualReport(
            grid=[r.x for r in self.records],
            resA=[r.res_a for r in self.records],
            resB=[r.res_b for r in self.records],
        )
        norms = self.report.compute_norms()
        result.extra["norms"] = norms

        self.measure("two_route", lambda: self._worst("two_route"), TOLERANCES["two_route"], spec.expects_failure("two_route"))
        self.measure("roundtrip", lambda: self._worst("roundtrip"), TOLERANCES["roundtrip"], spec.expects_failure("roundtrip"))
        self.measure("torsion", lambda: self._worst("torsion"), TOLERANCES["torsion"], spec.expects_failure("torsion"))
        self.measure("contact", lambda: self._worst("contact"), TOLERANCES["contact"], spec.expects_failure("contact"))
        self.measure(
            "residual_A",
            lambda: (norms["resA_max_abs"], {"rms": norms["resA_rms"]}),
            TOLERANCES["residual_a"],
            spec.expects_failure("residual_A"),
        )
        self.measure(
            "vacuum",
            lambda: (norms["resB_max_abs"], {"rms": norms["resB_rms"]}),
            TOLERANCES["vacuum"],
            spec.expects_failure("vacuum"),
        )
        self.measure("einstein", lambda: self._worst("einstein"), TOLERANCES["einstein"], spec.expects_failure("einstein"))
        if transformed is not None:
            self.measure(
                "covariance", lambda: self._worst("covariance"), TOLERANCES["prop31"], spec.expects_failure("covariance")
            )

    def _evaluate(self, section: Section, induced: Section, transformed, x: np.ndarray) -> PointRecord:
        f = section.tetrad
        v = tetrad_at(f, x)
        g = metric_from_tetrad(v)
        omega = spin_from_tetrad(v, g)
        gamma = christoffel(g)
        res_a, res_b = residuals_at(section, x)

        covariance = None
        if transformed is not None:
            lorentz, change, section_bar = transformed
            point = frame_point(lorentz, change, change.forward_at(x))
            expected = transform_residual_B(res_b, point)
            covariance = relative_deviation(residual_B(section_bar, point.xbar), expected)

        return PointRecord(
            x=np.asarray(x, dtype=float),
            two_route=float(np.max(np.abs(omega.omega - spin_from_christoffel(v, gamma).omega))),
            roundtrip=float(np.max(np.abs(jet_from_spin(v, omega).E - antisym_jet(v).E))),
            torsion=float(np.max(np.abs(covariant_ext_diff(v, omega, gamma)))),
            contact=float(np.max(np.abs(contact_pullback(section, x).C))),
            res_a=res_a,
            res_b=res_b,
            einstein=relative_deviation(residual_B(induced, x), einstein_oracle(f, x)),
            covariance=covariance,
        )

    def _worst(self, attribute: str) -> Measurement:
        values = [getattr(r, attribute) for r in self.records]
        k = int(np.argmax(values))
        details: Dict[str, object] = {"worst_point": [float(c) for c in self.records[k].x]}
        return float(values[k]), details
