"""
Utilidades y funciones auxiliares
Incluye logging, digests, mallas de muestreo, normas y el pool de evaluación
"""

import hashlib
import logging
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, TypeVar

import colorlog
import numpy as np

T = TypeVar("T")
R = TypeVar("R")

Interval = Tuple[float, float]


# ============================================================================
# LOGGING
# ============================================================================

def setup_logger(name: str, log_file: Optional[str] = None, level=logging.INFO) -> logging.Logger:
    """
    Configura un logger con formato personalizado
    Consola con colores (colorlog) y archivo plano
    """
    # Crear logger
    logger = logging.getLogger(name)
    logger.setLevel(level)

    # Evitar duplicar handlers
    if logger.handlers:
        return logger

    datefmt = '%Y-%m-%d %H:%M:%S'

    if log_file:
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setFormatter(logging.Formatter(
            '[%(asctime)s] %(levelname)s - %(name)s - %(message)s',
            datefmt=datefmt
        ))
        logger.addHandler(file_handler)

    console_handler = colorlog.StreamHandler()
    console_handler.setFormatter(colorlog.ColoredFormatter(
        '%(log_color)s[%(asctime)s] %(levelname)s%(reset)s - %(name)s - %(message)s',
        datefmt=datefmt,
        log_colors={
            'DEBUG': 'cyan',
            'INFO': 'green',
            'WARNING': 'yellow',
            'ERROR': 'red',
            'CRITICAL': 'red,bg_white',
        }
    ))
    logger.addHandler(console_handler)

    return logger


# ============================================================================
# DIGESTS Y TIEMPO
# ============================================================================

def compute_digest(content: str) -> str:
    """
    Calcula hash SHA-256 del contenido de entrada
    Identifica el archivo .spec en los reportes
    """
    if not content:
        return ""

    return hashlib.sha256(content.encode('utf-8')).hexdigest()


def format_timestamp(dt: datetime = None) -> str:
    """
    Formatea un datetime para nombres de archivo
    """
    if dt is None:
        dt = datetime.now()
    return dt.strftime("%Y%m%d_%H%M%S")


# ============================================================================
# MALLAS
# ============================================================================

def axis_points(interval: Interval, count: int, inset: float) -> np.ndarray:
    """
    Puntos uniformes en un intervalo recortado por `inset` de su ancho en cada extremo
    """
    a, b = interval
    width = b - a
    lo, hi = a + inset * width, b - inset * width
    if count == 1:
        return np.array([0.5 * (lo + hi)])
    return np.linspace(lo, hi, count)


def build_grid(domain: Sequence[Interval], counts: Sequence[int], inset: float) -> List[np.ndarray]:
    """
    Producto cartesiano de los ejes, en orden lexicográfico (x0 más lento)
    """
    axes = [axis_points(interval, n, inset) for interval, n in zip(domain, counts)]
    mesh = np.meshgrid(*axes, indexing="ij")
    stacked = np.stack([m.reshape(-1) for m in mesh], axis=-1)
    return [row.copy() for row in stacked]


def parse_grid_flag(text: Optional[str], default: int) -> Tuple[int, int, int, int]:
    """
    Convierte '--grid 5,5,3,3' en una tupla de 4 enteros
    """
    if not text:
        return (default,) * 4
    parts = [int(p) for p in text.split(",")]
    if len(parts) == 1:
        parts = parts * 4
    if len(parts) != 4 or any(p < 1 for p in parts):
        raise ValueError(f"malla inválida: {text}")
    return tuple(parts)


# ============================================================================
# NORMAS
# ============================================================================

def max_abs(values: Iterable[np.ndarray]) -> float:
    """Máximo valor absoluto sobre una colección de arreglos"""
    best = 0.0
    for v in values:
        arr = np.asarray(v, dtype=float)
        if arr.size:
            best = max(best, float(np.max(np.abs(arr))))
    return best


def rms(values: Iterable[np.ndarray]) -> float:
    """Raíz cuadrática media de todas las componentes"""
    flat = [np.ravel(np.asarray(v, dtype=float)) for v in values]
    if not flat:
        return 0.0
    joined = np.concatenate(flat)
    if joined.size == 0:
        return 0.0
    return float(np.sqrt(np.mean(joined ** 2)))


def relative_deviation(a: np.ndarray, b: np.ndarray) -> float:
    """max|a−b| / max(1, max|b|)"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = max(1.0, float(np.max(np.abs(b))) if b.size else 0.0)
    return float(np.max(np.abs(a - b))) / scale if a.size else 0.0


# ============================================================================
# POOL DE TRABAJO
# ============================================================================

def parallel_map(fn: Callable[[T], R], items: Sequence[T], threads: int = 1) -> List[R]:
    """
    Aplica fn a cada elemento preservando el orden de entrada
    Con threads=1 se evalúa en línea
    """
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
