"""
Catálogo de campos conocidos y generadores aleatorios sembrados

Los campos analíticos sirven de oráculo (Minkowski, Schwarzschild, FLRW,
Rindler); los generadores alimentan las suites de fuzzing y las pruebas.
"""

import logging
import math
from typing import Sequence, Tuple

import numpy as np

from src.exprdsl import (
    Add, Constant, Coord, Div, Expr, ExprArray, Func, Mul, Neg, Pow, Sub, add, cos, mul, parse, sin,
)
from src.geometry import ETA, TetradField
from src.sections import DeformationField, Section, spin_array
from src.transforms import CoordChange, LorentzField
from src.utils import Interval


logger = logging.getLogger(__name__)

SPHERICAL_COORDS = ("t", "r", "theta", "phi")
CARTESIAN_COORDS = ("t", "x", "y", "z")

SCHWARZSCHILD_DOMAIN: Tuple[Interval, ...] = ((0.0, 1.0), (3.0, 8.0), (0.3, math.pi - 0.3), (0.0, 1.0))
FLRW_DOMAIN: Tuple[Interval, ...] = ((0.5, 2.0), (0.0, 1.0), (0.0, 1.0), (0.0, 1.0))
RINDLER_DOMAIN: Tuple[Interval, ...] = ((0.0, 1.0), (1.0, 3.0), (0.0, 1.0), (0.0, 1.0))
UNIT_DOMAIN: Tuple[Interval, ...] = ((0.1, 0.9),) * 4


def _diagonal(entries: Sequence[str]) -> list:
    return [[entries[m] if m == i else "0" for i in range(4)] for m in range(4)]


# ============================================================================
# CAMPOS ANALÍTICOS
# ============================================================================

def minkowski(domain: Sequence[Interval] = UNIT_DOMAIN) -> TetradField:
    return TetradField.from_strings(_diagonal(["1"] * 4), coords=CARTESIAN_COORDS, domain=domain, name="minkowski")


def schwarzschild(M: float = 1.0, domain: Sequence[Interval] = SCHWARZSCHILD_DOMAIN) -> TetradField:
    """Tétrada diagonal estática en coordenadas (t, r, θ, φ)"""
    return TetradField.from_strings(
        _diagonal(["sqrt(1 - 2*M/r)", "1/sqrt(1 - 2*M/r)", "r", "r*sin(theta)"]),
        params={"M": M},
        coords=SPHERICAL_COORDS,
        domain=domain,
        name="schwarzschild",
    )


def schwarzschild_spin() -> ExprArray:
    """
    Conexión de espín explícita de la tétrada de Schwarzschild

    Coincide con la inducida; con f = 1 − 2M/r las componentes no nulas son
    ω_t^{01} = M/r², ω_θ^{12} = −√f, ω_φ^{13} = −√f sinθ, ω_φ^{23} = −cosθ.
    """
    text = {
        (0, 0, 1): "M/r^2",
        (2, 1, 2): "-sqrt(1 - 2*M/r)",
        (3, 1, 3): "-sqrt(1 - 2*M/r)*sin(theta)",
        (3, 2, 3): "-cos(theta)",
    }
    return spin_array({key: parse(value, SPHERICAL_COORDS, ["M"]) for key, value in text.items()})


def flrw(p: float = 2.0 / 3.0, domain: Sequence[Interval] = FLRW_DOMAIN) -> TetradField:
    """Universo plano con a(t) = t^p (p = 2/3 es polvo)"""
    a = "exp(p*ln(t))"
    return TetradField.from_strings(
        _diagonal(["1", a, a, a]),
        params={"p": p},
        coords=CARTESIAN_COORDS,
        domain=domain,
        name="flrw",
    )


def flrw_linear(domain: Sequence[Interval] = FLRW_DOMAIN) -> TetradField:
    return TetradField.from_strings(_diagonal(["1", "t", "t", "t"]), coords=CARTESIAN_COORDS, domain=domain, name="flrw_lineal")


def rindler(domain: Sequence[Interval] = RINDLER_DOMAIN) -> TetradField:
    return TetradField.from_strings(_diagonal(["x", "1", "1", "1"]), coords=CARTESIAN_COORDS, domain=domain, name="rindler")


def nonholonomic_witness(strength: float = 0.1) -> Section:
    """Minkowski con ω_t^{01} constante: E ≠ 0 con ∂e = 0"""
    spin = spin_array({(0, 0, 1): Constant(float(strength))})
    return Section(minkowski(), spin=spin, name="testigo_no_holonomo")


# ============================================================================
# GENERADORES ALEATORIOS
# ============================================================================

def _linear_form(coeffs: Sequence[float], offset: float = 0.0) -> Expr:
    expr: Expr = Constant(float(offset))
    for k, c in enumerate(coeffs):
        expr = add(expr, mul(Constant(float(c)), Coord(k)))
    return expr


def random_tetrad(
    rng: np.random.Generator,
    amplitude: float = 0.15,
    domain: Sequence[Interval] = UNIT_DOMAIN,
) -> TetradField:
    """
    e^μ_i = δ^μ_i + a_μi sin(k_μi·x + φ_μi) con |a| ≤ amplitude

    El determinante se mantiene lejos de cero para amplitude ≤ 0.2.
    """
    rows = []
    for mu in range(4):
        row = []
        for i in range(4):
            wave = sin(_linear_form(rng.uniform(-1.5, 1.5, 4), rng.uniform(0.0, 2.0 * math.pi)))
            term = mul(Constant(float(rng.uniform(-amplitude, amplitude))), wave)
            row.append(add(Constant(1.0 if mu == i else 0.0), term))
        rows.append(row)
    return TetradField(rows, domain=domain, name="aleatoria")


def random_lorentz_field(rng: np.random.Generator, scale: float = 0.3) -> LorentzField:
    """Boost ∘ rotación con rapidez y ángulo lineales en las coordenadas"""
    axis = int(rng.integers(1, 4))
    plane = tuple(int(v) for v in rng.choice([1, 2, 3], size=2, replace=False))
    rapidity = _linear_form(rng.uniform(-scale, scale, 4), rng.uniform(-scale, scale))
    angle = _linear_form(rng.uniform(-scale, scale, 4), rng.uniform(-math.pi, math.pi))
    return LorentzField.boost(axis, rapidity).compose(LorentzField.rotation(plane, angle))


def random_coord_change(rng: np.random.Generator, scale: float = 0.2) -> CoordChange:
    """Lineal invertible compuesto con un shear sinusoidal suave"""
    while True:
        matrix = np.eye(4) + rng.uniform(-scale, scale, (4, 4))
        if abs(np.linalg.det(matrix)) > 0.3:
            break
    offset = rng.uniform(-1.0, 1.0, 4)
    target, source = (int(v) for v in rng.choice(4, size=2, replace=False))
    profile = mul(Constant(float(rng.uniform(-scale, scale))), sin(mul(Constant(float(rng.uniform(0.5, 2.0))), Coord(source))))
    return CoordChange.linear(matrix, offset).compose(CoordChange.shear(target, source, profile))


def random_deformation(
    rng: np.random.Generator,
    support: Sequence[Interval],
    amplitude: float = 0.05,
    spin: bool = True,
) -> DeformationField:
    """Deformación con coeficientes trigonométricos por el bump de la caja"""
    tetrad_part = [
        [mul(Constant(float(rng.uniform(-amplitude, amplitude))), cos(_linear_form(rng.uniform(-1.0, 1.0, 4))))
         for _ in range(4)]
        for _ in range(4)
    ]
    spin_part = {}
    if spin:
        for i in range(4):
            for mu in range(4):
                for nu in range(mu + 1, 4):
                    spin_part[(i, mu, nu)] = Constant(float(rng.uniform(-amplitude, amplitude)))
    return DeformationField(tetrad_part, spin_part, support=support)


def random_point(rng: np.random.Generator, domain: Sequence[Interval], margin: float = 0.1) -> np.ndarray:
    """Punto uniforme dentro del dominio, alejado `margin` (fracción) de los bordes"""
    point = []
    for a, b in domain:
        pad = margin * (b - a)
        point.append(rng.uniform(a + pad, b - pad))
    return np.array(point)


def random_spin_data(rng: np.random.Generator, scale: float = 1.0) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    (ω[j,λ,σ], dω[i,η,σ,k], marco) aleatorios con la antisimetría requerida
    """
    omega = rng.normal(0.0, scale, (4, 4, 4))
    omega = omega - np.transpose(omega, (0, 2, 1))
    domega = rng.normal(0.0, scale, (4, 4, 4, 4))
    domega = domega - np.transpose(domega, (0, 2, 1, 3))
    while True:
        frame = np.eye(4) + rng.normal(0.0, 0.5, (4, 4))
        if abs(np.linalg.det(frame)) > 0.1:
            return omega, domega, frame


def lorentz_generator(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """D^μ_ν en so(1,3): D = η A con A antisimétrica"""
    a = rng.normal(0.0, scale, (4, 4))
    a = a - a.T
    return ETA @ a


def random_expr(rng: np.random.Generator, depth: int = 3) -> Expr:
    """
    Árbol aleatorio con la forma que produce el parser (nodos sin plegar)

    Los denominadores y los argumentos de ln/sqrt son 1 + u², exp y tan
    reciben argumentos acotados; así el árbol es suave en todo R⁴.
    """
    if depth <= 0 or rng.random() < 0.2:
        if rng.random() < 0.5:
            return Coord(int(rng.integers(0, 4)))
        return Constant(float(np.round(rng.uniform(0.1, 3.0), 3)))

    child = lambda: random_expr(rng, depth - 1)  # noqa: E731
    positive = lambda: Add(Constant(1.0), Pow(child(), 2))  # noqa: E731
    kind = int(rng.integers(0, 9))
    if kind == 0:
        return Add(child(), child())
    if kind == 1:
        return Sub(child(), child())
    if kind == 2:
        return Mul(child(), child())
    if kind == 3:
        return Div(child(), positive())
    if kind == 4:
        return Pow(child(), 2)
    if kind == 5:
        return Neg(child())
    if kind == 6:
        return Func(str(rng.choice(["sin", "cos"])), child())
    if kind == 7:
        return Func(str(rng.choice(["ln", "sqrt"])), positive())
    inner = Func("sin", child())
    if rng.random() < 0.5:
        return Func("exp", inner)
    return Func("tan", Mul(Constant(0.5), inner))
