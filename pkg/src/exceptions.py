"""
Jerarquía de excepciones del proyecto
Toda falla de la librería hereda de TetradJetError para que la CLI
pueda distinguir errores de dominio de fallas inesperadas
"""

from typing import Any, Iterable, Optional


class TetradJetError(Exception):
    """Error base de tetradjet"""


# ============================================================================
# EXPRESIONES
# ============================================================================

class ExprSyntaxError(TetradJetError):
    """Texto que no cumple la gramática de expresiones"""

    def __init__(self, message: str, offset: int, expected: Iterable[str] = ()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f" (esperado: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{message} en byte {offset}{detail}")


class UnknownFunction(TetradJetError):
    """Identificador aplicado como función que no es conocido"""

    def __init__(self, name: str, offset: int):
        self.name = name
        self.offset = offset
        super().__init__(f"función desconocida '{name}' en byte {offset}")


class DomainError(TetradJetError):
    """Evaluación fuera del dominio real (sqrt/ln de negativo, división por cero)"""

    def __init__(self, message: str, subexpr: Any = None):
        self.subexpr = subexpr
        super().__init__(f"{message}: {subexpr}" if subexpr is not None else message)


class UnboundParam(TetradJetError):
    """Parámetro referenciado sin valor en el entorno"""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"parámetro sin valor: '{name}'")


# ============================================================================
# GEOMETRÍA Y TRANSFORMACIONES
# ============================================================================

class SingularTetrad(TetradJetError):
    """det(e) por debajo de la tolerancia"""

    def __init__(self, det: float, point: Optional[Any] = None):
        self.det = det
        self.point = point
        super().__init__(f"tétrada singular (det={det:.3e}) en x={point}")


class SingularMatrix(TetradJetError):
    """Matriz no invertible en la acción de grupo"""


class MissingDerivatives(TetradJetError):
    """Se pidió curvatura a una conexión sin derivadas"""


class LorentzViolation(TetradJetError):
    """Λ no preserva η dentro de la tolerancia"""

    def __init__(self, deviation: float, point: Optional[Any] = None):
        self.deviation = deviation
        self.point = point
        super().__init__(f"ΛᵀηΛ ≠ η (desviación {deviation:.3e}) en x={point}")


class InvalidCoordChange(TetradJetError):
    """La inversa declarada no invierte el cambio de coordenadas"""


# ============================================================================
# VARIACIONAL Y NOETHER
# ============================================================================

class UnsupportedDeformation(TetradJetError):
    """Deformación con soporte fuera de la caja de integración"""


class NonConvergence(TetradJetError):
    """El solver agotó iteraciones; conserva el mejor iterado"""

    def __init__(self, message: str, best: Any = None, trace: Optional[list] = None):
        self.best = best
        self.trace = trace or []
        super().__init__(message)


class NotCritical(TetradJetError):
    """La sección no satisface las ecuaciones de campo"""

    def __init__(self, rms: float, tolerance: float):
        self.rms = rms
        self.tolerance = tolerance
        super().__init__(f"sección no crítica: rms={rms:.3e} > {tolerance:.1e}")


class UnsupportedNoetherField(TetradJetError):
    """Campo de Noether fuera de la familia soportada"""


# ============================================================================
# ARCHIVOS DE ESPECIFICACIÓN
# ============================================================================

class SpecFileError(TetradJetError):
    """Archivo .spec inválido; line es 1-based"""

    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"línea {line}: {message}" if line else message)
