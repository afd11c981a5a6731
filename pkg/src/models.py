"""
Modelos de datos del proyecto
Valores puntuales de geometría, reportes de residuos y resultados de verificación
usando dataclasses

Convenciones de índices (todas las matrices densas, eje de derivada al final):
    e[μ, i]        = e^μ_i          (fila Lorentz, columna coordenada)
    einv[i, μ]     = e^i_μ
    de[μ, i, j]    = ∂_j e^μ_i
    g[i, j], dg[i, j, k] = ∂_k g_ij
    E[μ, i, j]     = E^μ_ij
    ω[i, μ, ν]     = ω_i^{μν},   dω[i, μ, ν, j] = ∂_j ω_i^{μν}
    Γ[k, i, j]     = Γ^k_ij
    R[j, i, λ, σ]  = R_ji^{λσ}
    resA[i, λ, σ], resB[p, ν]
"""

from dataclasses import asdict, dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Optional

import numpy as np


@dataclass(frozen=True)
class TetradValue:
    """Tétrada y sus derivadas exactas en un punto"""

    e: np.ndarray
    de: np.ndarray
    einv: np.ndarray
    det: float
    # derivadas de orden ≥ 2: higher[0][μ,i,j,k] = ∂_k ∂_j e^μ_i, ...
    higher: tuple = ()

    def derivatives(self) -> List[np.ndarray]:
        return [self.e, self.de, *self.higher]


@dataclass(frozen=True)
class MetricValue:
    g: np.ndarray
    ginv: np.ndarray
    dg: np.ndarray

    def signature(self) -> tuple:
        eigenvalues = np.linalg.eigvalsh(self.g)
        return tuple(int(s) for s in np.sign(eigenvalues))


@dataclass(frozen=True)
class AntisymJet:
    E: np.ndarray


@dataclass(frozen=True)
class SpinConnectionValue:
    omega: np.ndarray
    domega: Optional[np.ndarray] = None


@dataclass(frozen=True)
class ChristoffelValue:
    gamma: np.ndarray


@dataclass(frozen=True)
class CurvatureValue:
    R: np.ndarray


@dataclass(frozen=True)
class ThetaDensity:
    """Coeficiente ℒ(x) de ds en γ*(Θ)"""

    value: float


@dataclass(frozen=True)
class ContactValue:
    """Coeficientes C[μ, i, j] de dx^i∧dx^j (i<j) en γ*(θ^μ), antisimétricos"""

    C: np.ndarray


@dataclass(frozen=True)
class CurrentValue:
    J: np.ndarray
    div: float


@dataclass
class ResidualReport:
    """Residuos de ambas ecuaciones de campo sobre una malla"""

    grid: List[np.ndarray]
    resA: List[np.ndarray]
    resB: List[np.ndarray]
    norms: Dict[str, float] = field(default_factory=dict)

    def compute_norms(self) -> Dict[str, float]:
        from src.utils import max_abs, rms

        self.norms = {
            "resA_max_abs": max_abs(self.resA),
            "resA_rms": rms(self.resA),
            "resB_max_abs": max_abs(self.resB),
            "resB_rms": rms(self.resB),
        }
        return self.norms


@dataclass
class CheckResult:
    """
    Resultado de una verificación individual
    status: 'pass', 'fail', 'expected-fail' o 'error'
    """

    name: str
    status: str
    max_deviation: float = 0.0
    tolerance: float = 0.0
    details: Dict[str, Any] = field(default_factory=dict)
    timing_seconds: Optional[float] = None

    @property
    def passed(self) -> bool:
        return self.status in ("pass", "expected-fail")

    def to_dict(self, include_timing: bool = True) -> dict:
        data = asdict(self)
        data["record"] = "check"
        if not include_timing:
            data.pop("timing_seconds", None)
        return data


@dataclass
class SuiteResult:
    """Resultado de una suite completa (análogo a un lote de verificaciones)"""

    suite: str
    target: str
    checks: List[CheckResult] = field(default_factory=list)
    seed: Optional[int] = None
    grid: Optional[Dict[str, Any]] = None
    input_digest: str = ""
    extra: Dict[str, Any] = field(default_factory=dict)
    error_message: Optional[str] = None
    started_at: datetime = field(default_factory=datetime.now)
    execution_time_seconds: float = 0.0

    @property
    def success(self) -> bool:
        return self.error_message is None and all(c.passed for c in self.checks)

    def failed_checks(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]
