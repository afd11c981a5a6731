"""
Campos de Noether, corrientes conservadas y defecto de simetría

Sobre secciones con conexión inducida, Z = J(X) admite ε^i(x), D^μ_ν(x) y
G^μ_q(x) arbitrarios: la variación de la conexión es la derivada direccional
de ω(e, ∂e) en la dirección (V_e, ∂V_e), V_e = Z_e − ε^k∂_k e.

Con conexión explícita solo se admite G = 0 y D^μ_ν(x) en so(1,3):

    Z_ω,i^{μν} = D^μ_σ ω_i^{σν} + D^ν_γ ω_i^{μγ} − ∂_iε^j ω_j^{μν} − ∂_iD^μ_η η^{ην}

En ambos casos

    J^a = ε^a ℒ + ¼ ε^{qpia} ε_{μνλσ} e^μ_q e^ν_p (Z_ω − ε^k∂_kω)_i^{λσ} − α^a

Si Θ es invariante bajo Z, ∂_a J^a + ∂_a α^a coincide con −γ*(V⌟dΘ), V la
variación arrastrada; sobre secciones críticas se anula.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from src.config import TF_THREADS, TOLERANCES
from src.exceptions import NotCritical, UnsupportedNoetherField
from src.exprdsl import ZERO, Constant, ExprArray, add, differentiate, mul, neg
from src.geometry import EPSILON, ETA, induced_spin
from src.jets import Array, Jet, base_value, from_derivatives, jeinsum
from src.models import CurrentValue
from src.sections import Section, SectionFields, spin_array
from src.transforms import JVectorField, _sum
from src.variational import _contraction, _residual_a, _residual_b, lagrangian_density, residual_report


logger = logging.getLogger(__name__)

_ETA_DIAG = (-1.0, 1.0, 1.0, 1.0)


def _has_translational_part(X: JVectorField) -> bool:
    return any(X.G[idx] != ZERO for idx in np.ndindex(4, 4))


@dataclass
class NoetherField:
    """J-prolongación de X más la 3-forma opcional α (densidades α^a de ds_a)"""

    X: JVectorField
    alpha: Optional[ExprArray] = None
    # id(tetrad) -> (tetrad, V_e simbólica)
    _variations: Dict[int, tuple] = field(default_factory=dict, init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.alpha is not None and self.alpha.shape != (4,):
            raise ValueError(f"α debe tener 4 componentes, recibida {self.alpha.shape}")

    def __add__(self, other: "NoetherField") -> "NoetherField":
        if self.alpha is not None or other.alpha is not None:
            raise ValueError("la suma solo se define con α = 0")
        return NoetherField(self.X + other.X)

    def check_generator(self, D: np.ndarray, x: Sequence[float], tol: float = 1e-12) -> None:
        lowered = ETA @ D
        deviation = float(np.max(np.abs(lowered + lowered.T)))
        if deviation > tol:
            raise UnsupportedNoetherField(
                f"D no pertenece a so(1,3) en x={tuple(float(v) for v in x)} (desviación {deviation:.3e})"
            )

    def tetrad_variation(self, section: Section) -> ExprArray:
        """V_e simbólica sobre la tétrada de la sección (se guarda por tétrada)"""
        cached = self._variations.get(id(section.tetrad))
        if cached is not None and cached[0] is section.tetrad:
            return cached[1]
        variation = self.X.tetrad_variation(section.tetrad)
        self._variations[id(section.tetrad)] = (section.tetrad, variation)
        return variation


@dataclass(frozen=True)
class _Variations:
    current: Array
    alpha: Array
    v_e: np.ndarray
    v_omega: np.ndarray
    res_a: np.ndarray
    res_b: np.ndarray


def _linearized_spin(e: Array, de: Array, v: Array, dv: Array) -> Array:
    """Derivada direccional de la conexión inducida en la dirección (v, ∂v)"""
    unit = np.ones(1)
    e_dir = Jet(e, jeinsum("mq,t->mqt", v, unit))
    de_dir = Jet(de, jeinsum("mqk,t->mqkt", dv, unit))
    omega = induced_spin(e_dir, de_dir)
    return jeinsum("imnt,t->imn", omega.der, unit)


def induced_spin_variation(section: Section, Z: NoetherField, x: Sequence[float]) -> Array:
    """
    V_ω = Z_ω − ε^k∂_kω sobre una sección de conexión inducida, como jet de profundidad 1

    Raises:
        UnsupportedNoetherField: la sección trae conexión explícita o deformaciones
    """
    if not section.is_induced or section.deformations:
        raise UnsupportedNoetherField("la variación por regla de la cadena requiere conexión inducida sin deformar")
    return _induced_variation(section, Z, x, section.fields_at(x, depth=2))


def _induced_variation(section: Section, Z: NoetherField, x: Sequence[float], fields: SectionFields) -> Array:
    derivs = Z.tetrad_variation(section).derivatives(x, {**section.params, **Z.X.params}, 2)
    v, dv = from_derivatives(derivs, 1, 0), from_derivatives(derivs, 1, 1)
    v_omega = _linearized_spin(fields.e.val, fields.de.val, v, dv)
    if section.spin_scale != 1.0:
        v_omega = v_omega * section.spin_scale
    return v_omega


def _closed_form_spin(D: Array, dD: Array, deps: Array, eps: Array, omega: Array, domega: Array) -> Array:
    z_omega = (
        jeinsum("ms,isn->imn", D, omega)
        + jeinsum("ng,img->imn", D, omega)
        - jeinsum("ji,jmn->imn", deps, omega)
        - jeinsum("mei,en->imn", dD, ETA)
    )
    return z_omega - jeinsum("k,imnk->imn", eps, domega)


def _evaluate(section: Section, Z: NoetherField, x: Sequence[float]) -> _Variations:
    fields = section.fields_at(x, depth=2)
    e, de = fields.e.val, fields.de.val
    omega, domega = fields.omega.val, fields.omega.der

    env = section.params
    eps_d, D_d, G_d = Z.X.derivatives(x, 2, env)
    eps, deps = from_derivatives(eps_d, 1, 0), from_derivatives(eps_d, 1, 1)
    if Z.alpha is not None:
        alpha = from_derivatives(Z.alpha.derivatives(x, {**env, **Z.X.params}, 1), 1, 0)
    else:
        alpha = from_derivatives([np.zeros(4), np.zeros((4, 4))], 1, 0)

    if section.is_induced and not section.deformations:
        v_omega = _induced_variation(section, Z, x, fields)
    else:
        if _has_translational_part(Z.X):
            raise UnsupportedNoetherField("G ≠ 0 solo se admite sobre secciones de conexión inducida sin deformar")
        Z.check_generator(D_d[0], x)
        D, dD = from_derivatives(D_d, 1, 0), from_derivatives(D_d, 1, 1)
        v_omega = _closed_form_spin(D, dD, deps, eps, omega, domega)

    density = lagrangian_density(e, omega, domega)
    current = (
        jeinsum("a,->a", eps, density)
        + 0.25 * jeinsum("qpia,mnls,mq,np,ils->a", EPSILON, EPSILON, e, e, v_omega)
        - alpha
    )

    e0, de0 = base_value(e), base_value(de)
    omega0, domega0 = base_value(omega), base_value(domega)
    eps0, deps0 = base_value(eps), base_value(deps)
    v_e = (
        -np.einsum("kq,mk->mq", deps0, e0)
        + np.einsum("mn,nq->mq", D_d[0], e0)
        + G_d[0]
        - np.einsum("k,mqk->mq", eps0, de0)
    )
    return _Variations(
        current=current,
        alpha=alpha,
        v_e=v_e,
        v_omega=base_value(v_omega),
        res_a=_residual_a(e0, de0, omega0),
        res_b=_residual_b(e0, omega0, domega0),
    )


def current(section: Section, Z: NoetherField, x: Sequence[float]) -> CurrentValue:
    """
    Densidades J^a de γ*(Z⌟Θ − α) y su divergencia exacta

    La sección se evalúa con derivadas de tétrada hasta tercer orden.
    """
    data = _evaluate(section, Z, x)
    return CurrentValue(J=base_value(data.current), div=float(np.trace(data.current.der)))


def divergence_identity_gap(section: Section, Z: NoetherField, x: Sequence[float]) -> float:
    """∂_a J^a + ∂_a α^a + γ*(V⌟dΘ); nulo fuera de la capa de masa"""
    data = _evaluate(section, Z, x)
    divergence = float(np.trace(data.current.der)) + float(np.trace(data.alpha.der))
    return divergence + _contraction(data.res_a, data.res_b, data.v_e, data.v_omega)


# ============================================================================
# DEFECTO DE SIMETRÍA
# ============================================================================

def spin_variation(X: JVectorField, spin: ExprArray) -> ExprArray:
    """V_ω = Z_ω − ε^k ∂_k ω simbólico para una conexión explícita"""
    if _has_translational_part(X):
        raise UnsupportedNoetherField("G ≠ 0 solo se admite sobre secciones de conexión inducida")
    entries = {}
    for i in range(4):
        for mu in range(4):
            for nu in range(mu + 1, 4):
                terms = [mul(X.D[mu, s], spin[i, s, nu]) for s in range(4)]
                terms += [mul(X.D[nu, g], spin[i, mu, g]) for g in range(4)]
                terms += [neg(mul(differentiate(X.epsilon[j], i), spin[j, mu, nu])) for j in range(4)]
                terms.append(neg(mul(differentiate(X.D[mu, nu], i), Constant(_ETA_DIAG[nu]))))
                terms += [neg(mul(X.epsilon[k], differentiate(spin[i, mu, nu], k))) for k in range(4)]
                entry = _sum(terms)
                if entry != ZERO:
                    entries[(i, mu, nu)] = entry
    return spin_array(entries)


def flow_section(section: Section, X: JVectorField, xi: float) -> Section:
    """Paso de Euler de J(X) sobre la sección (la conexión inducida se reinduce)"""
    if section.deformations:
        raise ValueError("el flujo no admite secciones deformadas")
    tetrad = X.euler_flow(section.tetrad, xi)
    if section.spin is None:
        return Section(tetrad, spin_scale=section.spin_scale, name=section.name)
    variation = spin_variation(X, section.spin)
    scale = Constant(float(xi))
    arr = np.empty((4, 4, 4), dtype=object)
    for idx in np.ndindex(4, 4, 4):
        arr[idx] = add(section.spin[idx], mul(scale, variation[idx]))
    return Section(tetrad, spin=ExprArray(arr), spin_scale=section.spin_scale, name=section.name)


def symmetry_defect(
    section: Section,
    X: JVectorField,
    xi: float,
    grid: Sequence[np.ndarray],
    tolerance: float = TOLERANCES["critical"],
    threads: int = TF_THREADS,
) -> float:
    """
    rms de residual_B tras arrastrar la sección un paso ξ

    Raises:
        NotCritical: la sección de partida no cumple las ecuaciones de campo
    """
    baseline = residual_report(section, grid, threads)
    worst = max(baseline.norms["resA_rms"], baseline.norms["resB_rms"])
    if worst > tolerance:
        raise NotCritical(worst, tolerance)
    if xi == 0.0:
        return baseline.norms["resB_rms"]
    flowed = residual_report(flow_section(section, X, xi), grid, threads)
    return flowed.norms["resB_rms"]


def defect_exponent(
    section: Section,
    X: JVectorField,
    grid: Sequence[np.ndarray],
    steps: Tuple[float, float] = (1e-2, 1e-3),
    threads: int = TF_THREADS,
) -> Tuple[float, Tuple[float, float]]:
    """
    Pendiente log-log del defecto entre dos pasos: ≈2 para simetrías, ≈1 si no
    """
    big, small = steps
    d_big = symmetry_defect(section, X, big, grid, threads=threads)
    d_small = symmetry_defect(section, X, small, grid, threads=threads)
    if d_small <= 0.0 or d_big <= 0.0:
        return float("inf"), (d_big, d_small)
    slope = float(np.log(d_big / d_small) / np.log(big / small))
    logger.info(f"📉 Exponente del defecto: {slope:.3f} (defectos {d_big:.3e}, {d_small:.3e})")
    return slope, (d_big, d_small)
