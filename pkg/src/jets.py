"""
Aritmética de jets hacia adelante sobre arreglos numpy

Un Jet(val, der) guarda un arreglo y su derivada respecto a las 4
coordenadas, con el eje de derivada siempre al final. val y der pueden ser
a su vez Jets: un jet de profundidad 2 es Jet(Jet(f, ∂f), Jet(∂f, ∂∂f)).
Las contracciones (jeinsum), la inversa y el determinante propagan la regla
del producto, así las fórmulas de geometry funcionan igual con arreglos
planos que con jets.

Todos los Jets que intervienen en una misma operación deben tener la misma
profundidad; los ndarray se tratan como constantes.
"""

import string
from typing import List, Sequence, Union

import numpy as np


class Jet:
    """Valor más derivada (eje de derivada al final)"""

    __slots__ = ("val", "der")

    # numpy delega las operaciones binarias en los métodos reflejados
    __array_ufunc__ = None

    def __init__(self, val, der):
        self.val = val
        self.der = der

    @property
    def shape(self):
        return self.val.shape

    @property
    def depth(self) -> int:
        return 1 + (self.val.depth if isinstance(self.val, Jet) else 0)

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.val + other.val, self.der + other.der)
        return Jet(self.val + other, self.der)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet):
            return Jet(self.val - other.val, self.der - other.der)
        return Jet(self.val - other, self.der)

    def __rsub__(self, other):
        return Jet(other - self.val, -self.der)

    def __neg__(self):
        return Jet(-self.val, -self.der)

    def __mul__(self, scalar):
        if isinstance(scalar, (Jet, np.ndarray)):
            raise TypeError("producto de Jet solo por escalar; use jeinsum")
        return Jet(self.val * scalar, self.der * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def __repr__(self):
        return f"Jet(depth={self.depth}, shape={self.shape})"


Array = Union[np.ndarray, Jet]

_FRESH = string.ascii_uppercase


def value(a: Array):
    """Nivel inmediato de valor (un ndarray se devuelve igual)"""
    return a.val if isinstance(a, Jet) else a


def base_value(a: Array) -> np.ndarray:
    """Arreglo numérico más interno"""
    while isinstance(a, Jet):
        a = a.val
    return a


def derivative(a: Array) -> Array:
    if not isinstance(a, Jet):
        raise TypeError("se pidió la derivada de una constante")
    return a.der


def _fresh_letter(spec: str) -> str:
    for letter in _FRESH:
        if letter not in spec:
            return letter
    raise ValueError(f"sin letras libres para {spec}")


def jeinsum(spec: str, *operands: Array) -> Array:
    """
    np.einsum con regla del producto; spec debe llevar '->' explícito
    La derivada agrega un índice al final de la salida
    """
    if not any(isinstance(op, Jet) for op in operands):
        return np.einsum(spec, *operands, optimize=len(operands) > 2)

    inputs, output = spec.split("->")
    terms = inputs.split(",")
    letter = _fresh_letter(spec)
    values = [value(op) for op in operands]

    val = jeinsum(spec, *values)
    der = None
    for k, op in enumerate(operands):
        if not isinstance(op, Jet):
            continue
        new_terms = list(terms)
        new_terms[k] = terms[k] + letter
        args = list(values)
        args[k] = op.der
        term = jeinsum(",".join(new_terms) + "->" + output + letter, *args)
        der = term if der is None else der + term
    return Jet(val, der)


def jinv(a: Array) -> Array:
    """Inversa de matriz 4×4: ∂(A⁻¹) = −A⁻¹ (∂A) A⁻¹"""
    if not isinstance(a, Jet):
        return np.linalg.inv(a)
    inv = jinv(a.val)
    return Jet(inv, -jeinsum("ab,bck,cd->adk", inv, a.der, inv))


def jdet(a: Array) -> Array:
    """Determinante: ∂det = det · tr(A⁻¹ ∂A)"""
    if not isinstance(a, Jet):
        return np.asarray(np.linalg.det(a))
    det = jdet(a.val)
    trace = jeinsum("ba,abk->k", jinv(a.val), a.der)
    return Jet(det, jeinsum(",k->k", det, trace))


def from_derivatives(derivs: Sequence[np.ndarray], depth: int, start: int = 0) -> Array:
    """
    Arma un jet de profundidad `depth` a partir de derivadas sucesivas
    derivs[k] tiene forma S + (4,)*k
    """
    if depth == 0:
        return derivs[start]
    if start + depth >= len(derivs):
        raise ValueError(f"faltan derivadas: se requieren {start + depth + 1}, hay {len(derivs)}")
    return Jet(
        from_derivatives(derivs, depth - 1, start),
        from_derivatives(derivs, depth - 1, start + 1),
    )


def truncate(a: Array, depth: int) -> Array:
    """Descarta niveles de derivada por encima de `depth`"""
    if depth == 0:
        return base_value(a)
    if not isinstance(a, Jet):
        raise ValueError("el arreglo no tiene derivadas")
    return Jet(truncate(a.val, depth - 1), truncate(a.der, depth - 1))


def chain(inner: Array, jac: Array) -> Array:
    """
    Cambia la variable de derivación de un jet de profundidad 1
    der_k = Σ_h der_h · jac[h, k]; jac puede ser a su vez un jet
    """
    if not isinstance(inner, Jet):
        return inner
    return Jet(inner.val, jeinsum("...h,hk->...k", inner.der, jac))


def stack_depths(a: Array) -> List[np.ndarray]:
    """[f, ∂f, ∂∂f, ...] a lo largo de la rama val.der de un jet"""
    out = [base_value(a)]
    current = a
    while isinstance(current, Jet):
        current = current.der
        out.append(base_value(current))
    return out
