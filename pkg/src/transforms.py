"""
Leyes de transformación gauge (Lorentz local) y de coordenadas
Acción de grupo, formas de contacto y J-prolongaciones de morfismos y campos vectoriales

Convenciones en un punto (FramePoint):
    lam[μ, σ]       = Λ^μ_σ(x)
    dlam[μ, σ, h]   = ∂Λ^μ_σ/∂x^h
    J[i, j]         = ∂x^i/∂x̄^j   (jacobiana de la inversa, evaluada en x̄)
    H[i, j, k]      = ∂²x^i/∂x̄^j∂x̄^k
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from src.config import TOLERANCES
from src.exceptions import InvalidCoordChange, LorentzViolation, SingularMatrix
from src.exprdsl import (
    ZERO, Constant, Coord, Expr, ExprArray, ParamEnv, add, cos, differentiate,
    exp, mul, neg, parse, sin, sub,
)
from src.geometry import ETA, TetradField, _antisym, _jet_from_spin, check_determinant
from src.jets import Array, jeinsum
from src.models import AntisymJet, ContactValue, SpinConnectionValue, TetradValue
from src.sections import Section, spin_array


logger = logging.getLogger(__name__)

_ETA_DIAG = (-1.0, 1.0, 1.0, 1.0)


# ============================================================================
# ÁLGEBRA SIMBÓLICA DE MATRICES
# ============================================================================

def _sum(terms: Iterable[Expr]) -> Expr:
    total: Expr = ZERO
    for term in terms:
        total = add(total, term)
    return total


def _matmul(a: ExprArray, b: ExprArray) -> ExprArray:
    rows, inner = a.shape
    cols = b.shape[1]
    return ExprArray([
        [_sum(mul(a[r, k], b[k, c]) for k in range(inner)) for c in range(cols)]
        for r in range(rows)
    ])


def _jacobian_exprs(maps: ExprArray) -> ExprArray:
    """jac[i, j] = ∂maps^i/∂x^j simbólico"""
    return ExprArray([[differentiate(maps[i], j) for j in range(4)] for i in range(4)])


def _substitution(maps: ExprArray) -> dict:
    return {k: maps[k] for k in range(4)}


# ============================================================================
# CAMPO DE LORENTZ
# ============================================================================

class LorentzField:
    """
    Λ^μ_ν(x) simbólico; se valida (ΛᵀηΛ = η) en lugar de proyectarse
    """

    def __init__(self, matrix, params: Optional[ParamEnv] = None, name: str = ""):
        self.matrix = matrix if isinstance(matrix, ExprArray) else ExprArray(matrix)
        if self.matrix.shape != (4, 4):
            raise ValueError(f"Λ debe ser 4×4, recibida {self.matrix.shape}")
        self.params = dict(params or {})
        self.name = name

    @classmethod
    def identity(cls) -> "LorentzField":
        return cls([[1.0 if m == n else 0.0 for n in range(4)] for m in range(4)], name="identidad")

    @classmethod
    def constant(cls, matrix: np.ndarray, tol: Optional[float] = None) -> "LorentzField":
        matrix = np.asarray(matrix, dtype=float)
        field = cls(matrix.tolist(), name="constante")
        field.validate_value(matrix, tol=tol)
        return field

    @classmethod
    def boost(cls, axis: int, rapidity, params: Optional[ParamEnv] = None) -> "LorentzField":
        """Boost en la dirección espacial `axis` (1..3); cosh/sinh escritos con exp"""
        if axis not in (1, 2, 3):
            raise ValueError(f"eje de boost inválido: {axis}")
        phi = rapidity if isinstance(rapidity, Expr) else parse(str(rapidity), params=params and list(params))
        plus, minus = exp(phi), exp(neg(phi))
        cosh = mul(Constant(0.5), add(plus, minus))
        sinh = mul(Constant(0.5), sub(plus, minus))
        rows = [[Constant(1.0) if m == n else ZERO for n in range(4)] for m in range(4)]
        rows[0][0] = rows[axis][axis] = cosh
        rows[0][axis] = rows[axis][0] = sinh
        return cls(rows, params, name=f"boost_{axis}")

    @classmethod
    def rotation(cls, plane: Tuple[int, int], angle, params: Optional[ParamEnv] = None) -> "LorentzField":
        """Rotación en el plano espacial (a, b)"""
        a, b = plane
        if a == b or a not in (1, 2, 3) or b not in (1, 2, 3):
            raise ValueError(f"plano de rotación inválido: {plane}")
        theta = angle if isinstance(angle, Expr) else parse(str(angle), params=params and list(params))
        rows = [[Constant(1.0) if m == n else ZERO for n in range(4)] for m in range(4)]
        rows[a][a] = rows[b][b] = cos(theta)
        rows[a][b] = neg(sin(theta))
        rows[b][a] = sin(theta)
        return cls(rows, params, name=f"rot_{a}{b}")

    def compose(self, other: "LorentzField") -> "LorentzField":
        """(Λ₁Λ₂)(x) = Λ₁(x)Λ₂(x)"""
        return LorentzField(
            _matmul(self.matrix, other.matrix),
            {**other.params, **self.params},
            name=f"{self.name}·{other.name}",
        )

    def derivatives(self, x: Sequence[float], order: int = 1) -> list:
        return self.matrix.derivatives(x, self.params, order)

    def at(self, x: Sequence[float]) -> np.ndarray:
        value = self.matrix.values(x, self.params)
        self.validate_value(value, x)
        return value

    @staticmethod
    def validate_value(value: np.ndarray, x=None, tol: Optional[float] = None) -> float:
        tol = TOLERANCES["lorentz"] if tol is None else tol
        deviation = float(np.max(np.abs(value.T @ ETA @ value - ETA)))
        if deviation > tol:
            raise LorentzViolation(deviation, None if x is None else tuple(float(v) for v in x))
        return deviation

    def validate(self, points: Iterable[Sequence[float]], tol: Optional[float] = None) -> float:
        """Máxima desviación de ΛᵀηΛ − η sobre los puntos; LorentzViolation si supera tol"""
        worst = 0.0
        for x in points:
            worst = max(worst, self.validate_value(self.matrix.values(x, self.params), x, tol))
        return worst

    @staticmethod
    def lower(value: np.ndarray) -> np.ndarray:
        """Λ_σ^ν = Λ^α_β η_ασ η^βν, que coincide con (Λ⁻¹)^ν_σ"""
        return ETA @ value @ ETA


# ============================================================================
# CAMBIO DE COORDENADAS
# ============================================================================

class CoordChange:
    """
    x̄ = forward(x) y x = inverse(x̄), ambas simbólicas
    La inversa la provee el usuario y se verifica numéricamente.
    """

    def __init__(self, forward, inverse, params: Optional[ParamEnv] = None, name: str = ""):
        self.forward = forward if isinstance(forward, ExprArray) else ExprArray(forward)
        self.inverse = inverse if isinstance(inverse, ExprArray) else ExprArray(inverse)
        if self.forward.shape != (4,) or self.inverse.shape != (4,):
            raise ValueError("forward e inverse deben tener 4 componentes")
        self.params = dict(params or {})
        self.name = name
        self._jac: Optional[ExprArray] = None
        self._jacinv: Optional[ExprArray] = None

    @classmethod
    def identity(cls) -> "CoordChange":
        coords = [Coord(k) for k in range(4)]
        return cls(coords, list(coords), name="identidad")

    @classmethod
    def linear(cls, matrix: np.ndarray, offset: Optional[Sequence[float]] = None) -> "CoordChange":
        """x̄ = A x + b con inversa x = A⁻¹(x̄ − b)"""
        matrix = np.asarray(matrix, dtype=float)
        offset = np.zeros(4) if offset is None else np.asarray(offset, dtype=float)
        if abs(np.linalg.det(matrix)) < 1e-12:
            raise SingularMatrix("matriz del cambio lineal no invertible")
        inv = np.linalg.inv(matrix)
        forward = [
            add(_sum(mul(Constant(matrix[i, j]), Coord(j)) for j in range(4)), Constant(offset[i]))
            for i in range(4)
        ]
        inverse = [
            _sum(mul(Constant(inv[i, j]), sub(Coord(j), Constant(offset[j]))) for j in range(4))
            for i in range(4)
        ]
        return cls(forward, inverse, name="lineal")

    @classmethod
    def shear(cls, target: int, source: int, profile: Expr) -> "CoordChange":
        """
        x̄^target = x^target + profile(x^source), resto igual
        profile debe depender solo de Coord(source)
        """
        if target == source:
            raise ValueError("shear requiere ejes distintos")
        forward = [Coord(k) for k in range(4)]
        inverse = [Coord(k) for k in range(4)]
        forward[target] = add(Coord(target), profile)
        inverse[target] = sub(Coord(target), profile)
        return cls(forward, inverse, name=f"shear_{target}{source}")

    @classmethod
    def scaling(cls, factors: Sequence[float]) -> "CoordChange":
        return cls.linear(np.diag(np.asarray(factors, dtype=float)))

    def compose(self, other: "CoordChange") -> "CoordChange":
        """self∘other: primero other, luego self"""
        forward = self.forward.substitute(_substitution(other.forward))
        inverse = other.inverse.substitute(_substitution(self.inverse))
        return CoordChange(forward, inverse, {**other.params, **self.params}, f"{self.name}∘{other.name}")

    @property
    def jac(self) -> ExprArray:
        """∂x̄^i/∂x^j"""
        if self._jac is None:
            self._jac = _jacobian_exprs(self.forward)
        return self._jac

    @property
    def jacinv(self) -> ExprArray:
        """∂x^i/∂x̄^j"""
        if self._jacinv is None:
            self._jacinv = _jacobian_exprs(self.inverse)
        return self._jacinv

    def forward_at(self, x: Sequence[float]) -> np.ndarray:
        return self.forward.values(x, self.params)

    def inverse_at(self, xbar: Sequence[float]) -> np.ndarray:
        return self.inverse.values(xbar, self.params)

    def jacobian_at(self, x: Sequence[float]) -> np.ndarray:
        return self.forward.derivatives(x, self.params, 1)[1]

    def inverse_derivatives(self, xbar: Sequence[float], order: int = 2) -> list:
        """[x, J, H, ...] en x̄"""
        return self.inverse.derivatives(xbar, self.params, order)

    def verify(self, points: Iterable[Sequence[float]], tol: Optional[float] = None) -> float:
        """
        Comprueba inverse∘forward = id y jac·jacinv = I en puntos de la carta original

        Raises:
            InvalidCoordChange: alguna desviación supera tol
        """
        tol = TOLERANCES["coordchange"] if tol is None else tol
        worst = 0.0
        for x in points:
            x = np.asarray(x, dtype=float)
            xbar = self.forward_at(x)
            back = self.inverse_at(xbar)
            product = self.jacobian_at(x) @ self.inverse_derivatives(xbar, 1)[1]
            deviation = max(
                float(np.max(np.abs(back - x))),
                float(np.max(np.abs(product - np.eye(4)))),
            )
            worst = max(worst, deviation)
            if deviation > tol:
                raise InvalidCoordChange(
                    f"la inversa no invierte '{self.name}' en x={tuple(x)} (desviación {deviation:.3e})"
                )
        return worst


# ============================================================================
# VALORES PUNTUALES
# ============================================================================

@dataclass(frozen=True)
class FramePoint:
    """Datos de una transformación (Λ, c) en un par de puntos correspondientes"""

    x: np.ndarray
    xbar: np.ndarray
    lam: np.ndarray
    dlam: np.ndarray
    J: np.ndarray
    H: np.ndarray
    ddlam: Optional[np.ndarray] = None

    @property
    def dlam_bar(self) -> np.ndarray:
        """∂Λ^μ_σ/∂x̄^i"""
        return np.einsum("msh,hi->msi", self.dlam, self.J)


def frame_point(lorentz: LorentzField, change: CoordChange, xbar: Sequence[float], lorentz_order: int = 1) -> FramePoint:
    xbar = np.asarray(xbar, dtype=float)
    x_derivs = change.inverse_derivatives(xbar, 2)
    x = x_derivs[0]
    lam_derivs = lorentz.derivatives(x, max(1, lorentz_order))
    LorentzField.validate_value(lam_derivs[0], x)
    return FramePoint(
        x=x,
        xbar=xbar,
        lam=lam_derivs[0],
        dlam=lam_derivs[1],
        J=x_derivs[1],
        H=x_derivs[2],
        ddlam=lam_derivs[2] if lorentz_order >= 2 else None,
    )


def gauge_action(lam: np.ndarray, jac: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Acción izquierda Λ·X·J⁻¹ sobre matrices 4×4"""
    if abs(np.linalg.det(jac)) < 1e-14:
        raise SingularMatrix("J no invertible en la acción de grupo")
    return lam @ X @ np.linalg.inv(jac)


def transform_jet(v: TetradValue, point: FramePoint) -> TetradValue:
    """
    ē^μ_j = Λ^μ_σ e^σ_i J^i_j
    ē^μ_jk = Λ e^σ_ih J^h_k J^i_j + ∂_hΛ e^σ_i J^h_k J^i_j + Λ e^σ_i ∂²x^i/∂x̄^k∂x̄^j
    """
    lam, dlam, J, H = point.lam, point.dlam, point.J, point.H
    e_bar = np.einsum("ms,si,ij->mj", lam, v.e, J)
    de_bar = (
        np.einsum("ms,sih,hk,ij->mjk", lam, v.de, J, J)
        + np.einsum("msh,si,hk,ij->mjk", dlam, v.e, J, J)
        + np.einsum("ms,si,ijk->mjk", lam, v.e, H)
    )
    det = float(np.linalg.det(e_bar))
    check_determinant(det, point.xbar)
    return TetradValue(e=e_bar, de=de_bar, einv=np.linalg.inv(e_bar), det=det)


def transform_E(E: AntisymJet, v: TetradValue, point: FramePoint) -> AntisymJet:
    """El término ∂²x se cancela al antisimetrizar"""
    lam, dlam, J = point.lam, point.dlam, point.J
    homogeneous = np.einsum("sih,ms,hk,ij->mjk", E.E, lam, J, J)
    cross = np.einsum("si,msh,hk,ij->mjk", v.e, dlam, J, J)
    return AntisymJet(E=homogeneous + 0.5 * (cross - np.transpose(cross, (0, 2, 1))))


def _spin_law(lam: Array, dlam_bar: Array, jinv: Array, omega: Array, inhomogeneous: bool = True) -> Array:
    homogeneous = jeinsum("ms,ng,ji,jsg->imn", lam, lam, jinv, omega)
    if not inhomogeneous:
        return homogeneous
    lam_low = jeinsum("ab,bc,cd->ad", ETA, lam, ETA)
    return homogeneous - jeinsum("se,mei,sn->imn", lam_low, dlam_bar, ETA)


def transform_spin(omega: SpinConnectionValue, point: FramePoint, inhomogeneous: bool = True) -> SpinConnectionValue:
    """
    ω̄_i^{μν} = Λ^μ_σ Λ^ν_γ J^j_i ω_j^{σγ} − Λ_σ^η ∂_hΛ^μ_η J^h_i η^{σν}
    inhomogeneous=False descarta el segundo término (variante mutada)
    """
    return SpinConnectionValue(
        omega=_spin_law(point.lam, point.dlam_bar, point.J, omega.omega, inhomogeneous)
    )


# ============================================================================
# TRANSFORMACIÓN DE CAMPOS SIMBÓLICOS
# ============================================================================

def transform_tetrad(f: TetradField, lorentz: LorentzField, change: CoordChange) -> TetradField:
    """ē^μ_j(x̄) = Λ^μ_σ(x) e^σ_i(x) ∂x^i/∂x̄^j con x = x(x̄)"""
    morphism = Morphism(lorentz.matrix, None, change, params=lorentz.params)
    return morphism.transform_field(f)


def _pulled_back(arr: ExprArray, change: CoordChange) -> ExprArray:
    return arr.substitute(_substitution(change.inverse))


def transform_section(section: Section, lorentz: LorentzField, change: CoordChange) -> Section:
    """
    Sección transformada en la carta x̄ con conexión transformada según la ley
    inhomogénea; la conexión inducida se conserva inducida
    """
    if section.deformations:
        raise ValueError("transform_section no admite secciones deformadas")
    tetrad = transform_tetrad(section.tetrad, lorentz, change)
    if section.spin is None:
        if section.spin_scale != 1.0:
            raise ValueError("una conexión inducida escalada no se transforma simbólicamente")
        return Section(tetrad, name=f"{section.name}→")

    lam = _pulled_back(lorentz.matrix, change)
    dlam = [_pulled_back(ExprArray([[differentiate(lorentz.matrix[m, s], h) for s in range(4)] for m in range(4)]), change)
            for h in range(4)]
    jinv = change.jacinv
    scale = Constant(section.spin_scale)
    omega = _pulled_back(section.spin, change)

    entries = {}
    for i in range(4):
        for mu in range(4):
            for nu in range(mu + 1, 4):
                homogeneous = _sum(
                    mul(mul(mul(lam[mu, s], lam[nu, g]), jinv[j, i]), mul(scale, omega[j, s, g]))
                    for j in range(4) for s in range(4) for g in range(4)
                    if omega[j, s, g] != ZERO
                )
                # η^{σν} diagonal fija σ = ν y Λ_ν^η = η_νν Λ^ν_η η_ηη
                inhomogeneous = _sum(
                    mul(
                        mul(Constant(_ETA_DIAG[eta]), lam[nu, eta]),
                        mul(dlam[h][mu, eta], jinv[h, i]),
                    )
                    for eta in range(4) for h in range(4)
                    if dlam[h][mu, eta] != ZERO
                )
                entry = sub(homogeneous, inhomogeneous)
                if entry != ZERO:
                    entries[(i, mu, nu)] = entry
    params = {**section.params, **lorentz.params, **change.params}
    return Section(tetrad.with_params(params), spin=spin_array(entries), name=f"{section.name}→")


# ============================================================================
# FORMAS DE CONTACTO
# ============================================================================

def contact_pullback(section: Section, x: Sequence[float]) -> ContactValue:
    """
    γ*(θ^μ) = Σ_{i<j} C[μ, i, j] dx^i∧dx^j
    C = ∂_i e^μ_j − ∂_j e^μ_i + 2E^μ_ij, nula si la sección es holónoma
    """
    fields = section.fields_at(x, depth=0)
    E = _jet_from_spin(fields.e, fields.omega)
    de = fields.de
    return ContactValue(C=2.0 * E + np.transpose(de, (0, 2, 1)) - de)


def contact_transform(C: ContactValue, point: FramePoint) -> ContactValue:
    """θ̄^μ = Λ^μ_ν θ^ν con el cambio de base de dx^i∧dx^j"""
    return ContactValue(C=np.einsum("mn,nkl,ki,lj->mij", point.lam, C.C, point.J, point.J))


# ============================================================================
# J-PROLONGACIÓN DE MORFISMOS
# ============================================================================

class Morphism:
    """
    Φ(x, e) = (χ(x), Γ(x)·e·∂x/∂y + f(x)) y su prolongación a la coordenada E

    gamma[ν, μ] = Γ^ν_μ(x), shift[ν, i] = f^ν_i(x), ambos en la carta de origen.
    """

    def __init__(
        self,
        gamma,
        shift=None,
        chi: Optional[CoordChange] = None,
        params: Optional[ParamEnv] = None,
    ):
        self.gamma = gamma if isinstance(gamma, ExprArray) else ExprArray(gamma)
        if shift is None:
            shift = [[ZERO] * 4 for _ in range(4)]
        self.shift = shift if isinstance(shift, ExprArray) else ExprArray(shift)
        self.chi = chi or CoordChange.identity()
        self.params = {**self.chi.params, **dict(params or {})}

    @classmethod
    def identity(cls) -> "Morphism":
        return cls(LorentzField.identity().matrix)

    def compose(self, other: "Morphism") -> "Morphism":
        """self∘other: Γ = Γ₁(χ₂)Γ₂, f_i = Γ₁(χ₂) ∂y^s/∂z^i f₂_s + f₁_i(χ₂)"""
        inner = _substitution(other.chi.forward)
        chi = self.chi.compose(other.chi)
        gamma_outer = self.gamma.substitute(inner)
        # ∂y^s/∂z^i expresado en la carta de origen
        dy_dz = self.chi.jacinv.substitute(_substitution(chi.forward))
        carried = _matmul(_matmul(gamma_outer, other.shift), dy_dz)
        outer_shift = self.shift.substitute(inner)
        shift = ExprArray([[add(carried[n, i], outer_shift[n, i]) for i in range(4)] for n in range(4)])
        return Morphism(_matmul(gamma_outer, other.gamma), shift, chi, {**other.params, **self.params})

    def apply(self, x: Sequence[float], e: np.ndarray, E: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Imagen de un punto (x, e, E) de J(E)

        Returns:
            (y, ê, Ê) con Ê^ν_ij según la prolongación, incluido el corchete ½[...]
        """
        x = np.asarray(x, dtype=float)
        gamma, dgamma = self.gamma.derivatives(x, self.params, 1)
        shift, dshift = self.shift.derivatives(x, self.params, 1)
        fwd = self.chi.forward.derivatives(x, self.params, 1)
        y = fwd[0]
        if abs(np.linalg.det(fwd[1])) < 1e-14:
            raise SingularMatrix(f"χ no es invertible en x={tuple(x)}")
        J = np.linalg.inv(fwd[1])

        e_hat = np.einsum("nm,mr,ri->ni", gamma, e, J) + shift
        frame = np.einsum("nmk,kj,ri,mr->nij", dgamma, J, J, e)
        translation = np.einsum("nik,kj->nij", dshift, J)
        E_hat = np.einsum("nm,mks,ki,sj->nij", gamma, E, J, J) + 0.5 * (
            frame - np.transpose(frame, (0, 2, 1))
            + translation - np.transpose(translation, (0, 2, 1))
        )
        return y, e_hat, E_hat

    def transform_field(self, f: TetradField) -> TetradField:
        """ê(y) = Γ(x(y)) e(x(y)) ∂x/∂y + f(x(y)) como campo simbólico en y"""
        back = _substitution(self.chi.inverse)
        gamma = self.gamma.substitute(back)
        shift = self.shift.substitute(back)
        e = f.components.substitute(back)
        carried = _matmul(_matmul(gamma, e), self.chi.jacinv)
        components = ExprArray([[add(carried[n, i], shift[n, i]) for i in range(4)] for n in range(4)])
        return TetradField(
            components,
            params={**f.params, **self.params},
            coords=f.coords,
            name=f"{f.name}→" if f.name else "",
        )


def prolong_morphism(gamma, shift, chi: CoordChange, params: Optional[ParamEnv] = None) -> Morphism:
    return Morphism(gamma, shift, chi, params)


# ============================================================================
# J-PROLONGACIÓN DE CAMPOS VECTORIALES
# ============================================================================

@dataclass(frozen=True)
class ProlongedVector:
    """Coeficientes de J(X) en un punto: ∂/∂x^i, ∂/∂e^μ_q y ∂/∂E^μ_ij"""

    epsilon: np.ndarray
    tetrad: np.ndarray
    h: np.ndarray


class JVectorField:
    """
    X = ε^i ∂/∂x^i + (−∂_qε^k e^μ_k + D^μ_ν e^ν_q + G^μ_q) ∂/∂e^μ_q

    epsilon[k] = ε^k(x), D[μ, ν] = D^μ_ν(x), G[μ, q] = G^μ_q(x)
    """

    def __init__(self, epsilon=None, D=None, G=None, params: Optional[ParamEnv] = None, name: str = ""):
        zero_vec = [ZERO] * 4
        zero_mat = [[ZERO] * 4 for _ in range(4)]
        self.epsilon = self._as_array(epsilon, zero_vec, (4,))
        self.D = self._as_array(D, zero_mat, (4, 4))
        self.G = self._as_array(G, zero_mat, (4, 4))
        self.params = dict(params or {})
        self.name = name

    @staticmethod
    def _as_array(value, default, shape) -> ExprArray:
        arr = value if isinstance(value, ExprArray) else ExprArray(default if value is None else value)
        if arr.shape != shape:
            raise ValueError(f"forma {arr.shape} inválida, se esperaba {shape}")
        return arr

    @classmethod
    def translation(cls, axis: int) -> "JVectorField":
        return cls(epsilon=[1.0 if k == axis else 0.0 for k in range(4)], name=f"traslación_{axis}")

    @classmethod
    def lorentz_generator(cls, generator: np.ndarray) -> "JVectorField":
        """D constante en so(1,3): ηD antisimétrica"""
        generator = np.asarray(generator, dtype=float)
        return cls(D=generator.tolist(), name="lorentz")

    def is_vertical(self) -> bool:
        return all(self.epsilon[k] == ZERO for k in range(4))

    def scaled(self, factor: float) -> "JVectorField":
        scale = Constant(float(factor))
        return JVectorField(
            self.epsilon.map(lambda e: mul(scale, e)),
            self.D.map(lambda e: mul(scale, e)),
            self.G.map(lambda e: mul(scale, e)),
            self.params,
            self.name,
        )

    def __add__(self, other: "JVectorField") -> "JVectorField":
        def plus(a: ExprArray, b: ExprArray) -> ExprArray:
            out = np.empty(a.shape, dtype=object)
            for idx in np.ndindex(a.shape):
                out[idx] = add(a[idx], b[idx])
            return ExprArray(out)

        return JVectorField(
            plus(self.epsilon, other.epsilon),
            plus(self.D, other.D),
            plus(self.G, other.G),
            {**self.params, **other.params},
        )

    def derivatives(self, x: Sequence[float], order: int = 1, params: Optional[ParamEnv] = None):
        """Listas de derivadas de (ε, D, G) hasta `order`"""
        env = {**(params or {}), **self.params}
        return (
            self.epsilon.derivatives(x, env, order),
            self.D.derivatives(x, env, order),
            self.G.derivatives(x, env, order),
        )

    def tetrad_variation(self, f: TetradField) -> ExprArray:
        """
        V^μ_q = Z^μ_q − ε^k ∂_k e^μ_q: variación arrastrada de la tétrada
        """
        e = f.components
        rows = []
        for mu in range(4):
            row = []
            for q in range(4):
                terms = [neg(mul(differentiate(self.epsilon[k], q), e[mu, k])) for k in range(4)]
                terms += [mul(self.D[mu, nu], e[nu, q]) for nu in range(4)]
                terms.append(self.G[mu, q])
                terms += [neg(mul(self.epsilon[k], differentiate(e[mu, q], k))) for k in range(4)]
                row.append(_sum(terms))
            rows.append(row)
        return ExprArray(rows)

    def euler_flow(self, f: TetradField, xi: float) -> TetradField:
        """Paso de Euler de primer orden del flujo: e + ξ V"""
        variation = self.tetrad_variation(f)
        scale = Constant(float(xi))
        components = ExprArray([
            [add(f.components[mu, q], mul(scale, variation[mu, q])) for q in range(4)]
            for mu in range(4)
        ])
        return TetradField(components, {**f.params, **self.params}, f.domain, f.coords, f.name)


def prolong_vector(
    X: JVectorField,
    x: Sequence[float],
    v: TetradValue,
    E: Optional[np.ndarray] = None,
) -> ProlongedVector:
    """
    Coeficientes de J(X) en el punto (x, e, E)

    h^μ_ij = ½(∂_jD^μ_ν e^ν_i − ∂_iD^μ_ν e^ν_j + ∂_jG^μ_i − ∂_iG^μ_j)
             + D^μ_ν E^ν_ij + (E^μ_ki ∂_jε^k − E^μ_kj ∂_iε^k)
    """
    if E is None:
        E = _antisym(v.de)
    eps, D, G = X.derivatives(x, 1, {})
    epsilon, deps = eps
    D_val, dD = D
    G_val, dG = G

    tetrad = (
        -np.einsum("kq,mk->mq", deps, v.e)
        + np.einsum("mn,nq->mq", D_val, v.e)
        + G_val
    )
    frame = np.einsum("mnj,ni->mij", dD, v.e) + dG
    transport = np.einsum("mki,kj->mij", E, deps)
    h = (
        0.5 * (frame - np.transpose(frame, (0, 2, 1)))
        + np.einsum("mn,nij->mij", D_val, E)
        + transport - np.transpose(transport, (0, 2, 1))
    )
    return ProlongedVector(epsilon=epsilon, tetrad=tetrad, h=h)
