"""
Secciones de J(E) y deformaciones verticales

Una sección es una tétrada simbólica más una conexión de espín que puede ser
inducida (Levi-Civita de la tétrada) o explícita (24 componentes μ<ν).
Las deformaciones se suman después de inducir la conexión, de modo que
γ_ξ = (e + ξX_e, ω + ξX_ω) con ω la conexión de la sección sin deformar.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from src.exprdsl import ZERO, Constant, Coord, Expr, ExprArray, ParamEnv, mul, neg, power, sub
from src.geometry import TetradField, _jet_from_spin, check_determinant, induced_spin
from src.jets import Array, base_value, from_derivatives
from src.utils import Interval


logger = logging.getLogger(__name__)


def spin_array(entries: Dict[Tuple[int, int, int], Expr]) -> ExprArray:
    """
    Completa ω_i^{μν} antisimétrico a partir de entradas (i, μ, ν) con μ<ν
    """
    arr = np.empty((4, 4, 4), dtype=object)
    arr[...] = ZERO
    for (i, mu, nu), expr in entries.items():
        if mu == nu:
            raise ValueError(f"componente diagonal ω_{i}^{{{mu}{nu}}} no permitida")
        if mu > nu:
            mu, nu, expr = nu, mu, neg(expr)
        arr[i, mu, nu] = expr
        arr[i, nu, mu] = neg(expr)
    return ExprArray(arr)


def spin_entries(spin: ExprArray) -> Dict[Tuple[int, int, int], Expr]:
    """Entradas independientes (μ<ν) no nulas"""
    out = {}
    for i in range(4):
        for mu in range(4):
            for nu in range(mu + 1, 4):
                expr = spin[i, mu, nu]
                if expr != ZERO:
                    out[(i, mu, nu)] = expr
    return out


# ============================================================================
# DEFORMACIONES
# ============================================================================

def bump_expr(support: Sequence[Interval]) -> Expr:
    """Π_k (1 − u_k²)³ con u_k ∈ [−1, 1] sobre la caja"""
    factor: Expr = Constant(1.0)
    for k, (a, b) in enumerate(support):
        center = 0.5 * (a + b)
        half = 0.5 * (b - a)
        u = mul(sub(Coord(k), Constant(center)), Constant(1.0 / half))
        factor = mul(factor, power(sub(Constant(1.0), power(u, 2)), 3))
    return factor


class DeformationField:
    """
    Campo vertical X = X^μ_i ∂/∂e^μ_i + ½ X_i^{μν} ∂/∂ω_i^{μν}
    Con bump=True las componentes se multiplican por el bump de la caja y se
    anulan fuera de ella.
    """

    def __init__(
        self,
        tetrad_part=None,
        spin_part: Optional[Dict[Tuple[int, int, int], Expr]] = None,
        support: Optional[Sequence[Interval]] = None,
        bump: bool = True,
        params: Optional[ParamEnv] = None,
    ):
        if bump and support is None:
            raise ValueError("una deformación con bump requiere caja de soporte")
        self.support = tuple(tuple(float(v) for v in iv) for iv in support) if support else None
        self.bump = bump
        self.params = dict(params or {})
        factor = bump_expr(self.support) if bump else Constant(1.0)

        raw_e = ExprArray(tetrad_part) if tetrad_part is not None else ExprArray([[ZERO] * 4 for _ in range(4)])
        raw_w = spin_array(spin_part or {})
        self.raw_tetrad = raw_e
        self.raw_spin = raw_w
        self.tetrad_part = raw_e.map(lambda expr: mul(expr, factor))
        self.spin_part = raw_w.map(lambda expr: mul(expr, factor))

    def inside(self, x: Sequence[float]) -> bool:
        if self.support is None:
            return True
        return all(a < xi < b for xi, (a, b) in zip(x, self.support))

    def supported_in(self, box: Sequence[Interval]) -> bool:
        if self.support is None:
            return False
        return all(a <= sa and sb <= b for (sa, sb), (a, b) in zip(self.support, box))

    def tetrad_derivatives(self, x: Sequence[float], order: int, params: ParamEnv) -> list:
        if not self.inside(x) and self.bump:
            return [np.zeros((4, 4) + (4,) * k) for k in range(order + 1)]
        return self.tetrad_part.derivatives(x, {**params, **self.params}, order)

    def spin_derivatives(self, x: Sequence[float], order: int, params: ParamEnv) -> list:
        if not self.inside(x) and self.bump:
            return [np.zeros((4, 4, 4) + (4,) * k) for k in range(order + 1)]
        return self.spin_part.derivatives(x, {**params, **self.params}, order)

    def values(self, x: Sequence[float], params: Optional[ParamEnv] = None) -> Tuple[np.ndarray, np.ndarray]:
        params = params or {}
        return (
            self.tetrad_derivatives(x, 0, params)[0],
            self.spin_derivatives(x, 0, params)[0],
        )


# ============================================================================
# SECCIONES
# ============================================================================

@dataclass
class SectionFields:
    """Campos de una sección en un punto, como jets de la profundidad pedida"""

    e: Array
    de: Array
    omega: Array
    depth: int

    @property
    def E(self) -> Array:
        """Coordenada de fibra E obtenida de (e, ω)"""
        return _jet_from_spin(self.e, self.omega)


class Section:
    """
    γ: x ↦ (e^μ_i(x), ω_i^{μν}(x))

    spin=None usa la conexión inducida; spin_scale multiplica la conexión
    (útil para construir secciones no críticas).
    """

    def __init__(
        self,
        tetrad: TetradField,
        spin: Optional[ExprArray] = None,
        spin_scale: float = 1.0,
        deformations: Tuple[Tuple[float, DeformationField], ...] = (),
        name: str = "",
    ):
        if spin is not None and spin.shape != (4, 4, 4):
            raise ValueError(f"la conexión explícita debe ser 4×4×4, recibida {spin.shape}")
        self.tetrad = tetrad
        self.spin = spin
        self.spin_scale = float(spin_scale)
        self.deformations = tuple(deformations)
        self.name = name or tetrad.name

    @property
    def is_induced(self) -> bool:
        return self.spin is None

    @property
    def params(self) -> dict:
        return self.tetrad.params

    def with_deformation(self, X: DeformationField, xi: float) -> "Section":
        return Section(self.tetrad, self.spin, self.spin_scale, self.deformations + ((float(xi), X),), self.name)

    def with_spin_scale(self, scale: float) -> "Section":
        return Section(self.tetrad, self.spin, scale, self.deformations, self.name)

    def with_tetrad(self, tetrad: TetradField) -> "Section":
        return Section(tetrad, self.spin, self.spin_scale, self.deformations, self.name)

    def fields_at(self, x: Sequence[float], depth: int = 1) -> SectionFields:
        """
        e, ∂e y ω en x como jets de profundidad `depth`
        (la tétrada se evalúa hasta derivadas de orden depth+1)
        """
        derivs = self.tetrad.derivatives(x, depth + 1)
        e = from_derivatives(derivs, depth, 0)
        de = from_derivatives(derivs, depth, 1)

        if self.spin is None:
            check_determinant(float(np.linalg.det(derivs[0])), x)
            omega = induced_spin(e, de)
        else:
            omega = from_derivatives(self.spin.derivatives(x, self.params, depth), depth, 0)
        if self.spin_scale != 1.0:
            omega = omega * self.spin_scale

        for xi, X in self.deformations:
            x_derivs = X.tetrad_derivatives(x, depth + 1, self.params)
            e = e + xi * from_derivatives(x_derivs, depth, 0)
            de = de + xi * from_derivatives(x_derivs, depth, 1)
            omega = omega + xi * from_derivatives(X.spin_derivatives(x, depth, self.params), depth, 0)

        check_determinant(float(np.linalg.det(base_value(e))), x)
        return SectionFields(e=e, de=de, omega=omega, depth=depth)
