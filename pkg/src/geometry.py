"""
Geometría puntual de la tétrada
Métrica, jet antisimetrizado E, anholonomía Σ, conexión de espín (ambas rutas),
Christoffel, diferencial exterior covariante y curvatura

Las fórmulas internas (prefijo _) aceptan arreglos o Jets indistintamente;
las operaciones públicas trabajan con los valores puntuales de src.models.
Índices latinos se suben y bajan con la métrica inducida, griegos con η.
"""

import logging
from functools import lru_cache
from itertools import permutations
from typing import Optional, Sequence, Tuple

import numpy as np
from sympy.combinatorics.permutations import Permutation

from src.config import SINGULAR_DET_TOL
from src.exceptions import MissingDerivatives, SingularTetrad
from src.exprdsl import DEFAULT_COORDS, ExprArray, ParamEnv, parse
from src.jets import Array, base_value, from_derivatives, jeinsum, jinv
from src.utils import Interval
from src.models import (
    AntisymJet, ChristoffelValue, CurvatureValue, MetricValue,
    SpinConnectionValue, TetradValue,
)


logger = logging.getLogger(__name__)

ETA = np.diag([-1.0, 1.0, 1.0, 1.0])




@lru_cache(maxsize=None)
def levi_civita_symbol(dim: int = 4) -> np.ndarray:
    """Símbolo de permutación puro, +1 en (0, 1, ..., dim-1)"""
    epsilon = np.zeros((dim,) * dim)
    for perm in permutations(range(dim)):
        epsilon[perm] = Permutation(list(perm)).signature()
    epsilon.setflags(write=False)
    return epsilon


EPSILON = levi_civita_symbol(4)


# ============================================================================
# CAMPO DE TÉTRADAS
# ============================================================================

class TetradField:
    """
    Campo simbólico e^μ_i(x) sobre una carta con dominio de intervalos abiertos
    """

    def __init__(
        self,
        components,
        params: Optional[ParamEnv] = None,
        domain: Optional[Sequence[Interval]] = None,
        coords: Sequence[str] = DEFAULT_COORDS,
        name: str = "",
    ):
        self.components = components if isinstance(components, ExprArray) else ExprArray(components)
        if self.components.shape != (4, 4):
            raise ValueError(f"la tétrada debe ser 4×4, recibida {self.components.shape}")
        self.params = dict(params or {})
        self.domain = tuple(tuple(float(v) for v in iv) for iv in domain) if domain else None
        self.coords = tuple(coords)
        self.name = name

    @classmethod
    def from_strings(cls, rows, params: Optional[ParamEnv] = None, coords: Sequence[str] = DEFAULT_COORDS, **kwargs):
        """Construye el campo a partir de una matriz 4×4 de textos"""
        declared = list((params or {}).keys())
        exprs = [[parse(str(cell), coords, declared) for cell in row] for row in rows]
        return cls(exprs, params=params, coords=coords, **kwargs)

    def with_params(self, params: ParamEnv) -> "TetradField":
        merged = {**self.params, **params}
        clone = TetradField(self.components, merged, self.domain, self.coords, self.name)
        return clone

    def contains(self, x: Sequence[float]) -> bool:
        if self.domain is None:
            return True
        return all(a < xi < b for xi, (a, b) in zip(x, self.domain))

    def derivatives(self, x: Sequence[float], order: int) -> list:
        return self.components.derivatives(x, self.params, order)


def identity_tetrad(**kwargs) -> TetradField:
    return TetradField([[1.0 if m == i else 0.0 for i in range(4)] for m in range(4)], **kwargs)


# ============================================================================
# FÓRMULAS INTERNAS (arreglos o jets)
# ============================================================================

def _metric(e: Array) -> Array:
    return jeinsum("mi,mn,nj->ij", e, ETA, e)


def _metric_derivative(e: Array, de: Array) -> Array:
    half = jeinsum("mik,mn,nj->ijk", de, ETA, e)
    return half + jeinsum("jik->ijk", half)


def _antisym(de: Array) -> Array:
    # E^μ_ij = ½(∂_j e^μ_i − ∂_i e^μ_j)
    return 0.5 * (jeinsum("mij->mij", de) - jeinsum("mij->mji", de))


def _sigma(einv: Array, E: Array) -> Array:
    return jeinsum("pl,lij->pji", einv, E)


def _spin_formula(e: Array, einv: Array, g: Array, ginv: Array, E: Array) -> Array:
    """
    ω_i^μ_ν = e^μ_p (Σ^p_ji − Σ_j^p_i + Σ_ij^p) e^j_ν, luego ω^{μν} = ω^μ_σ η^{σν}
    """
    sig = _sigma(einv, E)
    low = jeinsum("ad,dbc->abc", g, sig)
    mid = jeinsum("jbi,bp->pji", low, ginv)
    last = jeinsum("ijb,bp->pji", low, ginv)
    combined = sig - mid + last
    mixed = jeinsum("mp,pji,jn->imn", e, combined, einv)
    return jeinsum("ims,sn->imn", mixed, ETA)


def induced_spin(e: Array, de: Array) -> Array:
    """Conexión de Levi-Civita en base de Lorentz a partir de (e, ∂e)"""
    einv = jinv(e)
    g = _metric(e)
    return _spin_formula(e, einv, g, jinv(g), _antisym(de))


def _christoffel(ginv: Array, dg: Array) -> Array:
    combo = jeinsum("lji->lij", dg) + dg - jeinsum("ijl->lij", dg)
    return 0.5 * jeinsum("kl,lij->kij", ginv, combo)


def _lower_lorentz(omega: Array) -> Array:
    # ω_i^μ_ν = ω_i^{μσ} η_σν
    return jeinsum("ims,sn->imn", omega, ETA)


def _jet_from_spin(e: Array, omega: Array) -> Array:
    product = jeinsum("imn,nj->mij", _lower_lorentz(omega), e)
    return 0.5 * (product - jeinsum("mij->mji", product))


def _curvature(omega: Array, domega: Array) -> Array:
    """R_ji^{λσ} = ∂_j ω_i − ∂_i ω_j + ω_j^λ_η ω_i^{ησ} − ω_i^λ_η ω_j^{ησ}"""
    quad = jeinsum("jle,ies->jils", _lower_lorentz(omega), omega)
    deriv = jeinsum("ilsj->jils", domega)
    return deriv - jeinsum("jils->ijls", deriv) + quad - jeinsum("jils->ijls", quad)


# ============================================================================
# OPERACIONES PUNTUALES
# ============================================================================

def check_determinant(det: float, x: Optional[Sequence[float]] = None) -> None:
    if not np.isfinite(det) or abs(det) < SINGULAR_DET_TOL:
        raise SingularTetrad(float(det), None if x is None else tuple(float(v) for v in x))


def tetrad_value(derivs: Sequence[np.ndarray], x: Optional[Sequence[float]] = None) -> TetradValue:
    """Arma un TetradValue a partir de [e, ∂e, ∂∂e, ...]"""
    e = np.asarray(derivs[0], dtype=float)
    det = float(np.linalg.det(e))
    check_determinant(det, x)
    return TetradValue(
        e=e,
        de=np.asarray(derivs[1], dtype=float),
        einv=np.linalg.inv(e),
        det=det,
        higher=tuple(np.asarray(d, dtype=float) for d in derivs[2:]),
    )


def tetrad_at(f: TetradField, x: Sequence[float], derivatives: int = 1) -> TetradValue:
    """
    Valores y derivadas exactas de la tétrada en x

    Args:
        derivatives: orden máximo de derivada a evaluar (≥ 1)

    Raises:
        SingularTetrad: |det e| < 1e-10
        DomainError: propagado desde la evaluación
    """
    order = max(1, derivatives)
    return tetrad_value(f.derivatives(x, order), x)


def tetrad_jets(v: TetradValue, depth: int) -> Tuple[Array, Array]:
    """(e, ∂e) como jets de profundidad `depth`; requiere derivadas hasta orden depth+1"""
    derivs = v.derivatives()
    if len(derivs) < depth + 2:
        raise MissingDerivatives(f"se requieren derivadas de orden {depth + 1} de la tétrada")
    return from_derivatives(derivs, depth, 0), from_derivatives(derivs, depth, 1)


def metric_from_tetrad(v: TetradValue) -> MetricValue:
    g = _metric(v.e)
    return MetricValue(g=g, ginv=np.linalg.inv(g), dg=_metric_derivative(v.e, v.de))


def antisym_jet(v: TetradValue) -> AntisymJet:
    return AntisymJet(E=_antisym(v.de))


def sigma(v: TetradValue, E: AntisymJet) -> np.ndarray:
    """Σ[p, j, i] = Σ^p_ji = e^p_λ E^λ_ij"""
    return _sigma(v.einv, E.E)


def spin_from_tetrad(v: TetradValue, g: Optional[MetricValue] = None) -> SpinConnectionValue:
    if g is None:
        g = metric_from_tetrad(v)
    omega = _spin_formula(v.e, v.einv, g.g, g.ginv, _antisym(v.de))
    return SpinConnectionValue(omega=omega)


def christoffel(m: MetricValue) -> ChristoffelValue:
    return ChristoffelValue(gamma=_christoffel(m.ginv, m.dg))


def spin_from_christoffel(v: TetradValue, gamma: ChristoffelValue) -> SpinConnectionValue:
    """ω_i^μ_ν = e^μ_k (Γ^k_ij e^j_ν + ∂_i e^k_ν) con ∂e⁻¹ = −e⁻¹(∂e)e⁻¹"""
    d_einv = -np.einsum("ka,abi,bn->kni", v.einv, v.de, v.einv)
    mixed = (
        np.einsum("mk,kij,jn->imn", v.e, gamma.gamma, v.einv)
        + np.einsum("mk,kni->imn", v.e, d_einv)
    )
    return SpinConnectionValue(omega=np.einsum("ims,sn->imn", mixed, ETA))


def jet_from_spin(v: TetradValue, omega: SpinConnectionValue) -> AntisymJet:
    return AntisymJet(E=_jet_from_spin(v.e, omega.omega))


def covariant_ext_diff(v: TetradValue, omega: SpinConnectionValue, gamma: ChristoffelValue) -> np.ndarray:
    """
    D[μ, i, j] = ∇_j e^μ_i − ∇_i e^μ_j
    ∇_j e^μ_i = ∂_j e^μ_i + ω_j^μ_ν e^ν_i − Γ^k_ji e^μ_k
    """
    nabla = (
        v.de
        + np.einsum("jmn,ni->mij", _lower_lorentz(omega.omega), v.e)
        - np.einsum("kji,mk->mij", gamma.gamma, v.e)
    )
    return nabla - np.transpose(nabla, (0, 2, 1))


def curvature(omega: SpinConnectionValue) -> CurvatureValue:
    if omega.domega is None:
        raise MissingDerivatives("la conexión no trae ∂ω")
    return CurvatureValue(R=_curvature(omega.omega, omega.domega))


def ricci_mixed(R: CurvatureValue, v: TetradValue) -> np.ndarray:
    """Ric[j, σ] = R_ji^{λσ} e^i_λ"""
    return np.einsum("jils,il->js", R.R, v.einv)


def induced_spin_at(f: TetradField, x: Sequence[float]) -> Tuple[TetradValue, SpinConnectionValue]:
    """Tétrada y conexión inducida con ∂ω exacta (requiere ∂∂e)"""
    v = tetrad_at(f, x, derivatives=2)
    e_jet, de_jet = tetrad_jets(v, 1)
    omega = induced_spin(e_jet, de_jet)
    return v, SpinConnectionValue(omega=base_value(omega), domega=base_value(omega.der))
