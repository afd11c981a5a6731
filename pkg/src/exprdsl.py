"""
Lenguaje de expresiones del carta 4-dimensional
Parser, impresor, evaluador y derivación simbólica exacta

Todas las funciones de coordenadas del proyecto (componentes de la tétrada,
campos de Lorentz, cambios de coordenadas, campos vectoriales) viven aquí.
Los nodos son dataclasses inmutables con igualdad estructural.
"""

import logging
import math
import re
import threading
from dataclasses import dataclass
from functools import singledispatch
from itertools import combinations_with_replacement, permutations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from src.exceptions import DomainError, ExprSyntaxError, UnboundParam, UnknownFunction


logger = logging.getLogger(__name__)

ParamEnv = Mapping[str, float]
Number = Union[int, float]

DEFAULT_COORDS: Tuple[str, ...] = ("x0", "x1", "x2", "x3")

FUNCTION_NAMES = ("sin", "cos", "tan", "exp", "ln", "sqrt")

NAMED_CONSTANTS = {"pi": math.pi}


# ============================================================================
# NODOS
# ============================================================================

class Expr:
    """Raíz de la jerarquía de nodos"""

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)

    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return sub(self, _coerce(other))

    def __rsub__(self, other):
        return sub(_coerce(other), self)

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __truediv__(self, other):
        return div(self, _coerce(other))

    def __rtruediv__(self, other):
        return div(_coerce(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, exponent: int):
        return power(self, exponent)


@dataclass(frozen=True)
class Constant(Expr):
    value: float


@dataclass(frozen=True)
class Coord(Expr):
    index: int

    def __post_init__(self):
        if self.index not in (0, 1, 2, 3):
            raise ValueError(f"índice de coordenada fuera de 0..3: {self.index}")


@dataclass(frozen=True)
class Param(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int

    def __post_init__(self):
        if not isinstance(self.exponent, int) or isinstance(self.exponent, bool):
            raise ValueError(f"exponente no entero: {self.exponent!r}")


@dataclass(frozen=True)
class Func(Expr):
    name: str
    arg: Expr

    def __post_init__(self):
        if self.name not in FUNCTION_NAMES:
            raise ValueError(f"función no soportada: {self.name}")


ZERO = Constant(0.0)
ONE = Constant(1.0)


def _coerce(value) -> Expr:
    if isinstance(value, Expr):
        return value
    return Constant(float(value))


def const(value: Number) -> Constant:
    return Constant(float(value))


# ============================================================================
# CONSTRUCTORES CON PLEGADO DE CONSTANTES
# ============================================================================

def _is_const(e: Expr, value: Optional[float] = None) -> bool:
    return isinstance(e, Constant) and (value is None or e.value == value)


def neg(a: Expr) -> Expr:
    if isinstance(a, Constant):
        return Constant(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def add(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Constant(a.value + b.value)
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Constant(a.value - b.value)
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return neg(b)
    return Sub(a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Constant(a.value * b.value)
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return ZERO
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if _is_const(a, -1.0):
        return neg(b)
    if _is_const(b, -1.0):
        return neg(a)
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 0.0):
        # no se pliega: la evaluación reporta DomainError
        return Div(a, b)
    if _is_const(a) and _is_const(b):
        return Constant(a.value / b.value)
    if _is_const(a, 0.0):
        return ZERO
    if _is_const(b, 1.0):
        return a
    return Div(a, b)


def power(base: Expr, exponent: int) -> Expr:
    exponent = int(exponent)
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if isinstance(base, Constant) and (base.value != 0.0 or exponent > 0):
        try:
            return Constant(float(base.value ** exponent))
        except OverflowError:
            return Pow(base, exponent)
    return Pow(base, exponent)


def func(name: str, arg: Expr) -> Expr:
    if isinstance(arg, Constant):
        try:
            return Constant(_apply_function(name, arg.value, arg))
        except DomainError:
            pass
    return Func(name, arg)


def sin(a: Expr) -> Expr:
    return func("sin", _coerce(a))


def cos(a: Expr) -> Expr:
    return func("cos", _coerce(a))


def tan(a: Expr) -> Expr:
    return func("tan", _coerce(a))


def exp(a: Expr) -> Expr:
    return func("exp", _coerce(a))


def ln(a: Expr) -> Expr:
    return func("ln", _coerce(a))


def sqrt(a: Expr) -> Expr:
    return func("sqrt", _coerce(a))


# ============================================================================
# EVALUACIÓN
# ============================================================================

def _finite(value: float, node: Expr) -> float:
    if not math.isfinite(value):
        raise DomainError("resultado no finito", subexpr=node)
    return value


def _apply_function(name: str, value: float, node: Expr) -> float:
    try:
        if name == "sin":
            return math.sin(value)
        if name == "cos":
            return math.cos(value)
        if name == "tan":
            return _finite(math.tan(value), node)
        if name == "exp":
            return _finite(math.exp(value), node)
        if name == "ln":
            if value <= 0.0:
                raise DomainError("logaritmo de no positivo", subexpr=node)
            return math.log(value)
        if name == "sqrt":
            if value < 0.0:
                raise DomainError("raíz de negativo", subexpr=node)
            return math.sqrt(value)
    except OverflowError:
        raise DomainError("desbordamiento", subexpr=node)
    raise ValueError(f"función no soportada: {name}")


@singledispatch
def evaluate(e: Expr, x: Sequence[float], params: Optional[ParamEnv] = None) -> float:
    """
    Evalúa la expresión en el punto x con el entorno de parámetros

    Raises:
        DomainError: sqrt/ln fuera de dominio, división por cero, desbordamiento
        UnboundParam: parámetro sin valor
    """
    raise TypeError(f"nodo desconocido: {type(e).__name__}")


@evaluate.register
def _(e: Constant, x, params=None) -> float:
    return e.value


@evaluate.register
def _(e: Coord, x, params=None) -> float:
    return float(x[e.index])


@evaluate.register
def _(e: Param, x, params=None) -> float:
    if params is None or e.name not in params:
        raise UnboundParam(e.name)
    return float(params[e.name])


@evaluate.register
def _(e: Neg, x, params=None) -> float:
    return -evaluate(e.arg, x, params)


@evaluate.register
def _(e: Add, x, params=None) -> float:
    return _finite(evaluate(e.left, x, params) + evaluate(e.right, x, params), e)


@evaluate.register
def _(e: Sub, x, params=None) -> float:
    return _finite(evaluate(e.left, x, params) - evaluate(e.right, x, params), e)


@evaluate.register
def _(e: Mul, x, params=None) -> float:
    return _finite(evaluate(e.left, x, params) * evaluate(e.right, x, params), e)


@evaluate.register
def _(e: Div, x, params=None) -> float:
    denominator = evaluate(e.right, x, params)
    if denominator == 0.0:
        raise DomainError("división por cero", subexpr=e)
    return _finite(evaluate(e.left, x, params) / denominator, e)


@evaluate.register
def _(e: Pow, x, params=None) -> float:
    base = evaluate(e.base, x, params)
    if base == 0.0 and e.exponent < 0:
        raise DomainError("división por cero", subexpr=e)
    try:
        return _finite(base ** e.exponent, e)
    except OverflowError:
        raise DomainError("desbordamiento", subexpr=e)


@evaluate.register
def _(e: Func, x, params=None) -> float:
    return _apply_function(e.name, evaluate(e.arg, x, params), e)


# ============================================================================
# DERIVACIÓN SIMBÓLICA
# ============================================================================

@singledispatch
def differentiate(e: Expr, i: int) -> Expr:
    """
    Derivada parcial exacta ∂e/∂x^i
    El árbol resultante no se simplifica más allá del plegado de constantes
    """
    raise TypeError(f"nodo desconocido: {type(e).__name__}")


@differentiate.register
def _(e: Constant, i: int) -> Expr:
    return ZERO


@differentiate.register
def _(e: Param, i: int) -> Expr:
    return ZERO


@differentiate.register
def _(e: Coord, i: int) -> Expr:
    return ONE if e.index == i else ZERO


@differentiate.register
def _(e: Neg, i: int) -> Expr:
    return neg(differentiate(e.arg, i))


@differentiate.register
def _(e: Add, i: int) -> Expr:
    return add(differentiate(e.left, i), differentiate(e.right, i))


@differentiate.register
def _(e: Sub, i: int) -> Expr:
    return sub(differentiate(e.left, i), differentiate(e.right, i))


@differentiate.register
def _(e: Mul, i: int) -> Expr:
    return add(
        mul(differentiate(e.left, i), e.right),
        mul(e.left, differentiate(e.right, i)),
    )


@differentiate.register
def _(e: Div, i: int) -> Expr:
    # (a/b)' = a'/b − a·b'/b²
    da = differentiate(e.left, i)
    db = differentiate(e.right, i)
    return sub(div(da, e.right), div(mul(e.left, db), power(e.right, 2)))


@differentiate.register
def _(e: Pow, i: int) -> Expr:
    n = e.exponent
    if n == 0:
        return ZERO
    return mul(mul(Constant(float(n)), power(e.base, n - 1)), differentiate(e.base, i))


@differentiate.register
def _(e: Func, i: int) -> Expr:
    da = differentiate(e.arg, i)
    if _is_const(da, 0.0):
        return ZERO
    a = e.arg
    if e.name == "sin":
        outer = func("cos", a)
    elif e.name == "cos":
        outer = neg(func("sin", a))
    elif e.name == "tan":
        outer = div(ONE, power(func("cos", a), 2))
    elif e.name == "exp":
        outer = e
    elif e.name == "ln":
        return div(da, a)
    else:  # sqrt
        return div(da, mul(Constant(2.0), e))
    return mul(outer, da)


# ============================================================================
# SUSTITUCIÓN Y RECORRIDOS
# ============================================================================

@singledispatch
def substitute(e: Expr, mapping: Mapping[int, Expr]) -> Expr:
    """Reemplaza Coord(k) por mapping[k] (coordenadas ausentes quedan igual)"""
    raise TypeError(f"nodo desconocido: {type(e).__name__}")


@substitute.register(Constant)
@substitute.register(Param)
def _(e, mapping):
    return e


@substitute.register
def _(e: Coord, mapping):
    return mapping.get(e.index, e)


@substitute.register
def _(e: Neg, mapping):
    return neg(substitute(e.arg, mapping))


@substitute.register
def _(e: Add, mapping):
    return add(substitute(e.left, mapping), substitute(e.right, mapping))


@substitute.register
def _(e: Sub, mapping):
    return sub(substitute(e.left, mapping), substitute(e.right, mapping))


@substitute.register
def _(e: Mul, mapping):
    return mul(substitute(e.left, mapping), substitute(e.right, mapping))


@substitute.register
def _(e: Div, mapping):
    return div(substitute(e.left, mapping), substitute(e.right, mapping))


@substitute.register
def _(e: Pow, mapping):
    return power(substitute(e.base, mapping), e.exponent)


@substitute.register
def _(e: Func, mapping):
    return func(e.name, substitute(e.arg, mapping))


def children(e: Expr) -> Tuple[Expr, ...]:
    if isinstance(e, (Neg,)):
        return (e.arg,)
    if isinstance(e, Func):
        return (e.arg,)
    if isinstance(e, Pow):
        return (e.base,)
    if isinstance(e, (Add, Sub, Mul, Div)):
        return (e.left, e.right)
    return ()


def free_params(e: Expr) -> frozenset:
    """Nombres de parámetros referenciados"""
    found = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Param):
            found.add(node.name)
        stack.extend(children(node))
    return frozenset(found)


def node_count(e: Expr) -> int:
    count = 0
    stack = [e]
    while stack:
        node = stack.pop()
        count += 1
        stack.extend(children(node))
    return count


class DerivativeTable:
    """
    Derivadas parciales de una expresión memorizadas por multi-índice ordenado
    (las parciales conmutan, así que (1,0) y (0,1) comparten entrada)
    """

    def __init__(self, root: Expr):
        self.root = root
        self._table: Dict[Tuple[int, ...], Expr] = {(): root}
        self._lock = threading.Lock()

    def get(self, indices: Iterable[int] = ()) -> Expr:
        key = tuple(sorted(indices))
        found = self._table.get(key)
        if found is not None:
            return found
        parent = self.get(key[:-1])
        derived = differentiate(parent, key[-1])
        with self._lock:
            self._table.setdefault(key, derived)
        return self._table[key]

    def is_zero(self, indices: Iterable[int] = ()) -> bool:
        return _is_const(self.get(indices), 0.0)


# ============================================================================
# IMPRESIÓN
# ============================================================================

_PREC_ADD = 1
_PREC_MUL = 2
_PREC_NEG = 3
_PREC_POW = 4
_PREC_ATOM = 5


def _precedence(e: Expr) -> int:
    if isinstance(e, (Add, Sub)):
        return _PREC_ADD
    if isinstance(e, (Mul, Div)):
        return _PREC_MUL
    if isinstance(e, Neg):
        return _PREC_NEG
    if isinstance(e, Pow):
        return _PREC_POW
    if isinstance(e, Constant) and (e.value < 0 or math.copysign(1.0, e.value) < 0):
        return _PREC_NEG
    return _PREC_ATOM


def _wrap(text: str, needed: bool) -> str:
    return f"({text})" if needed else text


def to_text(e: Expr, coords: Sequence[str] = DEFAULT_COORDS) -> str:
    """
    Imprime la expresión en la gramática del parser
    parse(to_text(e)) reproduce e para todo árbol producido por parse
    """
    if isinstance(e, Constant):
        if not math.isfinite(e.value):
            raise ValueError(f"constante no finita: {e.value}")
        if math.copysign(1.0, e.value) < 0:
            return f"(-{repr(-e.value)})"
        return repr(e.value)
    if isinstance(e, Coord):
        return coords[e.index]
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Func):
        return f"{e.name}({to_text(e.arg, coords)})"
    if isinstance(e, Neg):
        inner = to_text(e.arg, coords)
        return "-" + _wrap(inner, _precedence(e.arg) < _PREC_POW)
    if isinstance(e, Pow):
        base = to_text(e.base, coords)
        return f"{_wrap(base, _precedence(e.base) < _PREC_ATOM)}^{e.exponent}"

    prec = _precedence(e)
    symbol = {Add: " + ", Sub: " - ", Mul: "*", Div: "/"}[type(e)]
    left = _wrap(to_text(e.left, coords), _precedence(e.left) < prec)
    right = _wrap(to_text(e.right, coords), _precedence(e.right) <= prec)
    return f"{left}{symbol}{right}"


# ============================================================================
# PARSER
# ============================================================================

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()]))"
)
_TRAILING_SPACE = re.compile(r"\s*$")

_EXPECT_ATOM = frozenset({"número", "identificador", "("})
_EXPECT_OPERATOR = frozenset({"+", "-", "*", "/", ")", "fin"})


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> List[_Token]:
    tokens: List[_Token] = []
    pos = 0
    while True:
        if _TRAILING_SPACE.fullmatch(text, pos):
            break
        match = _TOKEN_RE.match(text, pos)
        if match is None or match.lastgroup is None:
            stripped = len(text) - len(text[pos:].lstrip())
            offset = len(text[:stripped].encode("utf-8"))
            raise ExprSyntaxError(f"carácter ilegal {text[stripped]!r}", offset, _EXPECT_ATOM)
        kind = match.lastgroup
        start = match.start(kind)
        tokens.append(_Token(kind, match.group(kind), len(text[:start].encode("utf-8"))))
        pos = match.end()
    tokens.append(_Token("end", "", len(text.encode("utf-8"))))
    return tokens


class _Parser:
    """Descenso recursivo sobre la gramática expr/term/factor/power/atom"""

    def __init__(self, text: str, coords: Sequence[str], params: Optional[Iterable[str]]):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.coord_index = {name: k for k, name in enumerate(DEFAULT_COORDS)}
        self.coord_index.update({name: k for k, name in enumerate(coords)})
        self.params = None if params is None else frozenset(params)

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def _advance(self) -> _Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def _is_op(self, symbol: str) -> bool:
        return self.current.kind == "op" and self.current.text == symbol

    def _fail(self, message: str, expected) -> None:
        raise ExprSyntaxError(message, self.current.offset, expected)

    def parse(self) -> Expr:
        tree = self.expr()
        if self.current.kind != "end":
            self._fail(f"token inesperado {self.current.text!r}", _EXPECT_OPERATOR)
        return tree

    def expr(self) -> Expr:
        left = self.term()
        while self._is_op("+") or self._is_op("-"):
            symbol = self._advance().text
            right = self.term()
            left = Add(left, right) if symbol == "+" else Sub(left, right)
        return left

    def term(self) -> Expr:
        left = self.factor()
        while self._is_op("*") or self._is_op("/"):
            symbol = self._advance().text
            right = self.factor()
            left = Mul(left, right) if symbol == "*" else Div(left, right)
        return left

    def factor(self) -> Expr:
        if self._is_op("-"):
            self._advance()
            return Neg(self.power())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self._is_op("^"):
            self._advance()
            sign = 1
            if self._is_op("-"):
                self._advance()
                sign = -1
            token = self.current
            if token.kind != "number" or not token.text.isdigit():
                self._fail("se esperaba un exponente entero", {"entero"})
            self._advance()
            return Pow(base, sign * int(token.text))
        return base

    def atom(self) -> Expr:
        token = self.current
        if token.kind == "number":
            self._advance()
            return Constant(float(token.text))
        if token.kind == "ident":
            self._advance()
            if self._is_op("("):
                if token.text not in FUNCTION_NAMES:
                    raise UnknownFunction(token.text, token.offset)
                self._advance()
                arg = self.expr()
                self._expect_close()
                return Func(token.text, arg)
            return self._resolve(token)
        if self._is_op("("):
            self._advance()
            inner = self.expr()
            self._expect_close()
            return inner
        self._fail(
            "fin inesperado" if token.kind == "end" else f"token inesperado {token.text!r}",
            _EXPECT_ATOM,
        )

    def _expect_close(self) -> None:
        if not self._is_op(")"):
            self._fail("se esperaba ')'", {")", "+", "-", "*", "/"})
        self._advance()

    def _resolve(self, token: _Token) -> Expr:
        name = token.text
        if name in FUNCTION_NAMES:
            raise ExprSyntaxError(f"función '{name}' sin argumento", token.offset + len(name), {"("})
        if name in self.coord_index:
            return Coord(self.coord_index[name])
        if self.params is None or name in self.params:
            if name in NAMED_CONSTANTS and (self.params is None or name not in self.params):
                return Constant(NAMED_CONSTANTS[name])
            return Param(name)
        if name in NAMED_CONSTANTS:
            return Constant(NAMED_CONSTANTS[name])
        raise ExprSyntaxError(f"identificador no declarado '{name}'", token.offset, {"coordenada", "parámetro"})


def parse(
    text: str,
    coords: Sequence[str] = DEFAULT_COORDS,
    params: Optional[Iterable[str]] = None,
) -> Expr:
    """
    Convierte texto en árbol de expresión

    Args:
        text: una expresión de la gramática
        coords: nombres de las 4 coordenadas en orden (x0..x3 siempre son alias válidos)
        params: nombres de parámetros declarados; None acepta cualquier identificador libre

    Raises:
        ExprSyntaxError: con offset en bytes y conjunto de tokens esperados
        UnknownFunction: identificador desconocido aplicado como función
    """
    if len(coords) != 4:
        raise ValueError(f"se requieren 4 coordenadas, recibidas {len(coords)}")
    return _Parser(text, coords, params).parse()


# ============================================================================
# ARREGLOS DE EXPRESIONES
# ============================================================================

def _object_array(nested, shape: Optional[Tuple[int, ...]] = None):
    if isinstance(nested, np.ndarray) and nested.dtype == object:
        return nested
    if shape is None:
        shape = []
        level = nested
        while isinstance(level, (list, tuple)):
            shape.append(len(level))
            level = level[0] if level else None
        shape = tuple(shape)
    arr = np.empty(shape, dtype=object)
    for idx in np.ndindex(shape):
        item = nested
        for k in idx:
            item = item[k]
        arr[idx] = _coerce(item)
    return arr


class ExprArray:
    """
    Arreglo n-dimensional de expresiones con tablas de derivadas propias
    Base de tétradas, campos de Lorentz, conexiones explícitas y deformaciones
    """

    def __init__(self, exprs, shape: Optional[Tuple[int, ...]] = None):
        self.exprs = _object_array(exprs, shape)
        self.shape = self.exprs.shape
        self._tables = np.empty(self.shape, dtype=object)
        for idx in np.ndindex(self.shape):
            self._tables[idx] = DerivativeTable(self.exprs[idx])

    def __getitem__(self, idx) -> Expr:
        return self.exprs[idx]

    def table(self, idx) -> DerivativeTable:
        return self._tables[idx]

    def derivative_expr(self, idx, indices: Iterable[int]) -> Expr:
        return self._tables[idx].get(indices)

    def params(self) -> frozenset:
        found = set()
        for idx in self._indices():
            found |= free_params(self.exprs[idx])
        return frozenset(found)

    def _indices(self):
        return np.ndindex(self.shape)

    def values(self, x: Sequence[float], params: Optional[ParamEnv] = None):
        return self.derivatives(x, params, 0)[0]

    def derivatives(self, x: Sequence[float], params: Optional[ParamEnv] = None, order: int = 1) -> list:
        """
        Lista [f, ∂f, ∂∂f, ...] hasta `order`; la k-ésima tiene forma shape + (4,)*k
        """

        out = []
        for k in range(order + 1):
            arr = np.zeros(self.shape + (4,) * k)
            for multi in combinations_with_replacement(range(4), k):
                slots = set(permutations(multi))
                for idx in self._indices():
                    table = self._tables[idx]
                    if table.is_zero(multi):
                        continue
                    val = evaluate(table.get(multi), x, params)
                    for slot in slots:
                        arr[idx + slot] = val
            out.append(arr)
        return out

    def map(self, fn) -> "ExprArray":
        mapped = np.empty(self.shape, dtype=object)
        for idx in self._indices():
            mapped[idx] = fn(self.exprs[idx])
        return ExprArray(mapped)

    def substitute(self, mapping: Mapping[int, Expr]) -> "ExprArray":
        return self.map(lambda e: substitute(e, mapping))

    def to_text(self, coords: Sequence[str] = DEFAULT_COORDS):
        texts = np.empty(self.shape, dtype=object)
        for idx in self._indices():
            texts[idx] = to_text(self.exprs[idx], coords)
        return texts

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExprArray) or other.shape != self.shape:
            return False
        return all(self.exprs[idx] == other.exprs[idx] for idx in self._indices())

    __hash__ = None
