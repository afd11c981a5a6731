"""
Forma lagrangiana Θ, acción, primera variación y residuos de las ecuaciones de campo

    ℒ      = ¼ ε^{qpij} ε_{μνλσ} e^μ_q e^ν_p P_ij^{λσ}
    P_ij   = ∂_j ω_i^{λσ} + ω_j^λ_η ω_i^{ησ}
    resA   = ε^{qpij} ε_{μνλσ} e^μ_q (∂_j e^ν_p + ω_j^ν_ρ e^ρ_p)      [i, λ, σ]
    resB   = ½ ε^{qpij} ε_{μνλσ} e^μ_q P_ij^{λσ}                     [p, ν]

Los símbolos ε son de permutación puros con ε^{0123} = ε_{0123} = +1.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

import numpy as np

from src.config import EINSTEIN_CONSTANT, QUADRATURE_ORDER, TF_THREADS, TOLERANCES
from src.exceptions import UnsupportedDeformation
from src.geometry import EPSILON, TetradField, _christoffel, _lower_lorentz, _metric, _metric_derivative, check_determinant
from src.jets import Array, base_value, from_derivatives, jeinsum, jinv
from src.models import ResidualReport, ThetaDensity
from src.sections import DeformationField, Section
from src.transforms import CoordChange, FramePoint, LorentzField, _spin_law, frame_point
from src.utils import Interval, parallel_map, relative_deviation


logger = logging.getLogger(__name__)


# ============================================================================
# DENSIDADES (arreglos o jets)
# ============================================================================

def _field_strength(omega: Array, domega: Array) -> Array:
    """P[i, j, λ, σ] = ∂_j ω_i^{λσ} + ω_j^λ_η ω_i^{ησ}"""
    return jeinsum("ilsj->ijls", domega) + jeinsum("jle,ies->ijls", _lower_lorentz(omega), omega)


def lagrangian_density(e: Array, omega: Array, domega: Array) -> Array:
    return 0.25 * jeinsum("qpij,mnls,mq,np,ijls->", EPSILON, EPSILON, e, e, _field_strength(omega, domega))


def _residual_a(e: Array, de: Array, omega: Array) -> Array:
    transport = jeinsum("npj->jnp", de) + jeinsum("jnr,rp->jnp", _lower_lorentz(omega), e)
    return jeinsum("qpij,mnls,mq,jnp->ils", EPSILON, EPSILON, e, transport)


def _residual_b(e: Array, omega: Array, domega: Array) -> Array:
    return 0.5 * jeinsum("qpij,mnls,mq,ijls->pn", EPSILON, EPSILON, e, _field_strength(omega, domega))


def _contraction(res_a: np.ndarray, res_b: np.ndarray, x_e: np.ndarray, x_omega: np.ndarray) -> float:
    """resB·X_e − Σ_{λ<σ} resA·X_ω"""
    return float(np.einsum("pn,np->", res_b, x_e, optimize=True) - 0.5 * np.einsum("ils,ils->", res_a, x_omega, optimize=True))


@dataclass(frozen=True)
class PointFields:
    e: np.ndarray
    de: np.ndarray
    omega: np.ndarray
    domega: np.ndarray


def _point_fields(section: Section, x: Sequence[float]) -> PointFields:
    fields = section.fields_at(x, depth=1)
    return PointFields(
        e=base_value(fields.e),
        de=base_value(fields.de),
        omega=base_value(fields.omega),
        domega=base_value(fields.omega.der),
    )


# ============================================================================
# Θ Y ACCIÓN
# ============================================================================

def theta_pullback(section: Section, x: Sequence[float]) -> ThetaDensity:
    """Coeficiente ℒ(x) de ds en γ*(Θ)"""
    f = _point_fields(section, x)
    return ThetaDensity(value=float(lagrangian_density(f.e, f.omega, f.domega)))


def gauss_legendre_box(box: Sequence[Interval], order: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nodos (N, d) y pesos (N,) del producto tensorial de Gauss–Legendre sobre la caja
    """
    nodes_1d, weights_1d = np.polynomial.legendre.leggauss(order)
    axes_nodes, axes_weights = [], []
    for a, b in box:
        half = 0.5 * (b - a)
        axes_nodes.append(0.5 * (a + b) + half * nodes_1d)
        axes_weights.append(half * weights_1d)
    mesh = np.meshgrid(*axes_nodes, indexing="ij")
    wmesh = np.meshgrid(*axes_weights, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=1)
    weights = np.prod(np.stack([w.ravel() for w in wmesh], axis=1), axis=1)
    return points, weights


def _integrate(integrand, box: Sequence[Interval], order: int, threads: int) -> float:
    points, weights = gauss_legendre_box(box, order)
    values = parallel_map(integrand, list(points), threads)
    return float(np.dot(weights, np.asarray(values, dtype=float)))


def action_with_error(
    section: Section,
    box: Sequence[Interval],
    quad: int = QUADRATURE_ORDER,
    threads: int = TF_THREADS,
) -> Tuple[float, float]:
    """
    Acción sobre la caja y estimación de error |A_q − A_{q+2}|

    Raises:
        DomainError: la caja toca una singularidad de la sección
    """
    def density(x):
        return theta_pullback(section, x).value

    coarse = _integrate(density, box, quad, threads)
    fine = _integrate(density, box, quad + 2, threads)
    return coarse, abs(fine - coarse)


def action_value(
    section: Section,
    box: Sequence[Interval],
    quad: int = QUADRATURE_ORDER,
    threads: int = TF_THREADS,
) -> float:
    return _integrate(lambda x: theta_pullback(section, x).value, box, quad, threads)


# ============================================================================
# PRIMERA VARIACIÓN
# ============================================================================

def dtheta_contraction(section: Section, X: DeformationField, x: Sequence[float]) -> float:
    """Coeficiente de ds en γ*(X⌟dΘ)"""
    f = _point_fields(section, x)
    x_e, x_omega = X.values(x, section.params)
    res_a = _residual_a(f.e, f.de, f.omega)
    res_b = _residual_b(f.e, f.omega, f.domega)
    return _contraction(res_a, res_b, x_e, x_omega)


def _variation_box(X: DeformationField, box: Sequence[Interval]) -> Sequence[Interval]:
    """Con bump, el integrando se anula fuera del soporte"""
    if X.bump and X.supported_in(box):
        return X.support
    return box


def first_variation(
    section: Section,
    X: DeformationField,
    box: Sequence[Interval],
    quad: int = QUADRATURE_ORDER,
    with_boundary: bool = False,
    threads: int = TF_THREADS,
) -> float:
    """
    ∫_D γ*(X⌟dΘ)

    Con with_boundary=True se admite X que no se anula en ∂D y se suma
    ∫_∂D γ*(X⌟Θ).

    Raises:
        UnsupportedDeformation: el soporte de X excede D
    """
    if not with_boundary and not X.supported_in(box):
        raise UnsupportedDeformation(f"soporte {X.support} fuera de la caja {tuple(box)}")
    interior = _integrate(lambda x: dtheta_contraction(section, X, x), _variation_box(X, box), quad, threads)
    if not with_boundary:
        return interior
    return interior + boundary_term(section, X, box, quad, threads)


def action_derivative_fd(
    section: Section,
    X: DeformationField,
    box: Sequence[Interval],
    quad: int = QUADRATURE_ORDER,
    h: float = 1e-4,
    threads: int = TF_THREADS,
) -> float:
    """
    (A(γ_{+h}) − A(γ_{−h})) / 2h con γ_ξ = (e + ξX_e, ω + ξX_ω)
    Cada punto evalúa la sección una sola vez.
    """
    params = section.params

    def difference(x):
        f = _point_fields(section, x)
        x_e = X.tetrad_derivatives(x, 0, params)[0]
        x_omega, dx_omega = X.spin_derivatives(x, 1, params)
        plus = lagrangian_density(f.e + h * x_e, f.omega + h * x_omega, f.domega + h * dx_omega)
        minus = lagrangian_density(f.e - h * x_e, f.omega - h * x_omega, f.domega - h * dx_omega)
        return float(plus - minus)

    return _integrate(difference, _variation_box(X, box), quad, threads) / (2.0 * h)


def boundary_term(
    section: Section,
    X: DeformationField,
    box: Sequence[Interval],
    quad: int = QUADRATURE_ORDER,
    threads: int = TF_THREADS,
) -> float:
    """
    ∫_∂D γ*(X⌟Θ) por el teorema de la divergencia sobre las 8 caras de la caja
    J^a = ¼ ε^{qpia} ε_{μνλσ} e^μ_q e^ν_p X_i^{λσ}
    """
    box = [tuple(iv) for iv in box]
    total = 0.0
    for axis in range(4):
        face = [iv for k, iv in enumerate(box) if k != axis]
        for sign, level in ((-1.0, box[axis][0]), (1.0, box[axis][1])):

            def flux(y, axis=axis, level=level):
                x = np.insert(np.asarray(y, dtype=float), axis, level)
                e = base_value(section.fields_at(x, depth=0).e)
                _, x_omega = X.values(x, section.params)
                current = 0.25 * np.einsum("qpia,mnls,mq,np,ils->a", EPSILON, EPSILON, e, e, x_omega, optimize=True)
                return float(current[axis])

            total += sign * _integrate(flux, face, quad, threads)
    return total


# ============================================================================
# RESIDUOS
# ============================================================================

def residual_A(section: Section, x: Sequence[float]) -> np.ndarray:
    f = _point_fields(section, x)
    return _residual_a(f.e, f.de, f.omega)


def residual_B(section: Section, x: Sequence[float]) -> np.ndarray:
    f = _point_fields(section, x)
    return _residual_b(f.e, f.omega, f.domega)


def residuals_at(section: Section, x: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    f = _point_fields(section, x)
    return _residual_a(f.e, f.de, f.omega), _residual_b(f.e, f.omega, f.domega)


def transform_residual_B(res_b: np.ndarray, point: FramePoint) -> np.ndarray:
    """
    Ley homogénea de residual_B bajo (Λ, c) en el par de puntos (x, x̄)

        resB̄[p̄, ν] = det(J)·det(Λ)·(J⁻¹)^p̄_p resB[p, ν'] (Λ⁻¹)^ν'_ν

    J = ∂x/∂x̄; un residuo nulo se transforma en nulo.
    """
    weight = float(np.linalg.det(point.J)) * float(np.linalg.det(point.lam))
    return weight * np.einsum("ap,pn,vn->av", np.linalg.inv(point.J), res_b, LorentzField.lower(point.lam), optimize=True)


def residual_report(section: Section, grid: Sequence[np.ndarray], threads: int = TF_THREADS) -> ResidualReport:
    pairs = parallel_map(lambda x: residuals_at(section, x), list(grid), threads)
    report = ResidualReport(
        grid=list(grid),
        resA=[a for a, _ in pairs],
        resB=[b for _, b in pairs],
    )
    report.compute_norms()
    return report


# ============================================================================
# ORÁCULO DE EINSTEIN
# ============================================================================

def _einstein_pattern(f: TetradField, x: Sequence[float]) -> np.ndarray:
    """det(e)·G^p_b e^b_ν por la ruta métrica (Christoffel → Riemann → Ricci → G)"""
    derivs = f.derivatives(x, 2)
    e_jet = from_derivatives(derivs, 1, 0)
    de_jet = from_derivatives(derivs, 1, 1)
    e = derivs[0]
    det = float(np.linalg.det(e))
    check_determinant(det, x)

    g = _metric(e_jet)
    gamma = _christoffel(jinv(g), _metric_derivative(e_jet, de_jet))
    gam, dgam = gamma.val, gamma.der
    riemann = (
        np.einsum("adbc->abcd", dgam, optimize=True)
        - np.einsum("acbd->abcd", dgam, optimize=True)
        + np.einsum("ace,edb->abcd", gam, gam, optimize=True)
        - np.einsum("ade,ecb->abcd", gam, gam, optimize=True)
    )
    ricci = np.einsum("abad->bd", riemann, optimize=True)
    g_val = base_value(g)
    ginv = np.linalg.inv(g_val)
    scalar = float(np.einsum("bd,bd->", ginv, ricci, optimize=True))
    einstein = ricci - 0.5 * scalar * g_val
    mixed = ginv @ einstein
    return det * mixed @ np.linalg.inv(e)


def einstein_oracle(f: TetradField, x: Sequence[float], constant: float = EINSTEIN_CONSTANT) -> np.ndarray:
    """
    c·det(e)·G^p_b e^b_ν, comparable con residual_B de la sección inducida

    Raises:
        SingularTetrad: |det e| < 1e-10
    """
    return constant * _einstein_pattern(f, x)


def calibrate_einstein_constant(samples: Iterable[Tuple[TetradField, Sequence[float]]]) -> float:
    """
    Constante c por mínimos cuadrados entre residual_B y det(e)·G sobre campos suaves
    """
    numerator = 0.0
    denominator = 0.0
    for field, x in samples:
        target = residual_B(Section(field), x)
        pattern = _einstein_pattern(field, x)
        numerator += float(np.sum(target * pattern))
        denominator += float(np.sum(pattern * pattern))
    if denominator == 0.0:
        raise ValueError("muestras de calibración sin curvatura")
    constant = numerator / denominator
    logger.info(f"📐 Constante de Einstein calibrada: {constant:.12f}")
    return constant


# ============================================================================
# INVARIANCIA DE Θ
# ============================================================================

@dataclass(frozen=True)
class InvarianceSample:
    """ℒ̄(x̄) frente a ℒ(x(x̄))·det(∂x/∂x̄)"""

    transformed: float
    expected: float
    deviation: float

    def passed(self, tol: float = TOLERANCES["prop31"]) -> bool:
        return self.deviation <= tol


def prop31_check(
    section: Section,
    lorentz: LorentzField,
    change: CoordChange,
    xbar: Sequence[float],
    inhomogeneous: bool = True,
) -> InvarianceSample:
    """
    Densidad de Θ de la sección transformada en x̄ contra la original por det(J)

    La conexión transformada se arma como jet en x̄ (regla de la cadena sobre
    ω, Λ y ∂Λ), así se admiten conexiones inducidas sin transformar
    simbólicamente. inhomogeneous=False omite el término ∂Λ de la ley.
    """
    point = frame_point(lorentz, change, xbar, lorentz_order=2)
    f = _point_fields(section, point.x)
    expected = float(lagrangian_density(f.e, f.omega, f.domega)) * float(np.linalg.det(point.J))

    J = from_derivatives([point.J, point.H], 1, 0)
    lam = from_derivatives([point.lam, np.einsum("msh,hk->msk", point.dlam, point.J, optimize=True)], 1, 0)
    dlam = from_derivatives([point.dlam, np.einsum("mshl,lk->mshk", point.ddlam, point.J, optimize=True)], 1, 0)
    omega = from_derivatives([f.omega, np.einsum("imnh,hk->imnk", f.domega, point.J, optimize=True)], 1, 0)

    dlam_bar = jeinsum("msh,hi->msi", dlam, J)
    omega_bar = _spin_law(lam, dlam_bar, J, omega, inhomogeneous)
    e_bar = np.einsum("ms,si,ij->mj", point.lam, f.e, point.J, optimize=True)
    transformed = float(lagrangian_density(e_bar, omega_bar.val, omega_bar.der))

    deviation = relative_deviation(np.array(transformed), np.array(expected))
    return InvarianceSample(transformed=transformed, expected=expected, deviation=deviation)


# ============================================================================
# IDENTIDADES ALGEBRAICAS
# ============================================================================

@dataclass(frozen=True)
class IdentitySample:
    """Desviaciones relativas de las dos identidades y de la forma cerrada"""

    frame_identity: float
    symbol_identity: float
    closed_form: float

    @property
    def deviation(self) -> float:
        return max(self.frame_identity, self.symbol_identity, self.closed_form)

    def passed(self, tol: float = TOLERANCES["prop32"]) -> bool:
        return self.deviation <= tol


def prop32_check(
    omega: np.ndarray,
    domega: np.ndarray,
    frame: np.ndarray,
    trace_shift: float = 0.0,
) -> IdentitySample:
    """
    Identidades de intercambio ωdω con símbolos ε

    Args:
        omega: ω[j, λ, σ] antisimétrico en (λ, σ)
        domega: dω[i, η, σ, k] antisimétrico en (η, σ); k es la dirección de la 1-forma
        frame: 4×4 invertible en lugar de e
        trace_shift: suma trace_shift·δ a ω_j^ρ_ν (rompe la hipótesis de traza nula)
    """
    mixed = _lower_lorentz(omega) + trace_shift * np.eye(4)[None, :, :]

    lhs_frame = np.einsum("qpij,mnls,mq,np,jle,iesk->k", EPSILON, EPSILON, frame, frame, mixed, domega, optimize=True)
    rhs_frame = -np.einsum("qpij,mrls,mq,np,jrn,ilsk->k", EPSILON, EPSILON, frame, frame, mixed, domega, optimize=True)

    lhs_symbol = np.einsum("mnab,mnls,jle,iesk->abijk", EPSILON, EPSILON, mixed, domega, optimize=True)
    rhs_symbol = -np.einsum("mnab,mrls,jrn,ilsk->abijk", EPSILON, EPSILON, mixed, domega, optimize=True)

    closed = 2.0 * (
        np.einsum("jae,iebk->abijk", mixed, domega, optimize=True)
        - np.einsum("jbe,ieak->abijk", mixed, domega, optimize=True)
    )
    return IdentitySample(
        frame_identity=relative_deviation(lhs_frame, rhs_frame),
        symbol_identity=relative_deviation(lhs_symbol, rhs_symbol),
        closed_form=max(relative_deviation(lhs_symbol, closed), relative_deviation(rhs_symbol, closed)),
    )
