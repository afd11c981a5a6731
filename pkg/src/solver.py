"""
Ajuste de familias de tétradas por mínimos cuadrados sobre residual_B
Gauss–Newton con amortiguamiento de Levenberg y jacobiana por diferencias centrales

Los puntos de anclaje fijan valores de componentes de la tétrada en puntos
dados (datos de frontera); sin ellos una familia de vacío puede dejar libre
la masa.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from src.config import SOLVER_DAMPING, SOLVER_MAX_ITER, SOLVER_RMS_TOL, SOLVER_STEP_TOL, TF_THREADS
from src.exceptions import DomainError, NonConvergence, SingularTetrad
from src.geometry import TetradField
from src.sections import Section
from src.utils import parallel_map
from src.variational import residual_B


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Anchor:
    """e^μ_i(point) = value"""

    mu: int
    index: int
    point: tuple
    value: float


@dataclass
class SolveOptions:
    max_iter: int = SOLVER_MAX_ITER
    damping: float = SOLVER_DAMPING
    rms_tol: float = SOLVER_RMS_TOL
    step_tol: float = SOLVER_STEP_TOL
    threads: int = TF_THREADS
    max_damping_trials: int = 12


@dataclass
class SolveResult:
    """
    status: 'converged' (rms < rms_tol) o 'stalled' (paso < step_tol con residuo grande)
    """

    params: Dict[str, float]
    status: str
    iterations: int
    rms: float
    trace: List[dict] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status == "converged"


class AnsatzProblem:
    """Vector de residuos apilado para una familia con incógnitas nombradas"""

    def __init__(
        self,
        family: TetradField,
        unknowns: Sequence[str],
        collocation: Sequence[Sequence[float]],
        anchors: Sequence[Anchor] = (),
    ):
        if not unknowns:
            raise ValueError("la familia no declara incógnitas")
        self.family = family
        self.unknowns = list(unknowns)
        self.collocation = [np.asarray(x, dtype=float) for x in collocation]
        self.anchors = list(anchors)

    def field_for(self, theta: np.ndarray) -> TetradField:
        return self.family.with_params(dict(zip(self.unknowns, (float(v) for v in theta))))

    def residual(self, theta: np.ndarray) -> np.ndarray:
        tetrad = self.field_for(theta)
        section = Section(tetrad)
        blocks = [residual_B(section, x).ravel() for x in self.collocation]
        for anchor in self.anchors:
            value = tetrad.components.values(anchor.point, tetrad.params)[anchor.mu, anchor.index]
            blocks.append(np.array([value - anchor.value]))
        return np.concatenate(blocks)

    def jacobian(self, theta: np.ndarray, threads: int = 1) -> np.ndarray:
        """Diferencias centrales con h = 1e-6(1 + |θ|)"""
        def column(k: int) -> np.ndarray:
            h = 1e-6 * (1.0 + abs(theta[k]))
            plus, minus = theta.copy(), theta.copy()
            plus[k] += h
            minus[k] -= h
            return (self.residual(plus) - self.residual(minus)) / (2.0 * h)

        return np.stack(parallel_map(column, list(range(len(theta))), threads), axis=1)


def _rms(r: np.ndarray) -> float:
    return float(np.sqrt(np.mean(r * r)))


def solve_ansatz(
    family: TetradField,
    unknowns: Sequence[str],
    initial: Dict[str, float],
    collocation: Sequence[Sequence[float]],
    anchors: Sequence[Anchor] = (),
    options: Optional[SolveOptions] = None,
) -> SolveResult:
    """
    Minimiza el residuo apilado de la familia sobre los puntos de colocación

    Raises:
        NonConvergence: max_iter agotado; `best` guarda el mejor iterado
        SingularTetrad: en el punto inicial
    """
    options = options or SolveOptions()
    problem = AnsatzProblem(family, unknowns, collocation, anchors)
    theta = np.array([float(initial[name]) for name in problem.unknowns])
    r = problem.residual(theta)
    rms = _rms(r)
    damping = options.damping
    trace = [{"iteration": 0, "rms": rms, "damping": damping, "params": theta.tolist()}]
    logger.info(f"🔧 Ajuste iniciado: rms={rms:.3e} con {len(problem.collocation)} puntos")

    def result(status: str, iterations: int) -> SolveResult:
        return SolveResult(
            params=dict(zip(problem.unknowns, theta.tolist())),
            status=status,
            iterations=iterations,
            rms=rms,
            trace=trace,
        )

    for iteration in range(1, options.max_iter + 1):
        if rms < options.rms_tol:
            return result("converged", iteration - 1)

        A = problem.jacobian(theta, options.threads)
        normal = A.T @ A
        gradient = A.T @ r
        accepted = False
        delta = np.zeros_like(theta)
        for _ in range(options.max_damping_trials):
            D = normal + damping * np.eye(len(theta))
            delta, *_ = np.linalg.lstsq(D, -gradient, rcond=None)
            trial = theta + delta
            try:
                r_trial = problem.residual(trial)
            except (DomainError, SingularTetrad) as e:
                logger.debug(f"Paso rechazado fuera del dominio: {e}")
                damping *= 10.0
                continue
            rms_trial = _rms(r_trial)
            if rms_trial < rms:
                theta, r, rms = trial, r_trial, rms_trial
                damping = max(damping / 10.0, 1e-15)
                accepted = True
                break
            damping *= 10.0

        trace.append({"iteration": iteration, "rms": rms, "damping": damping, "params": theta.tolist()})
        logger.debug(f"Iteración {iteration}: rms={rms:.3e}, amortiguamiento={damping:.1e}")

        if rms < options.rms_tol:
            logger.info(f"✅ Convergencia en {iteration} iteraciones (rms={rms:.3e})")
            return result("converged", iteration)
        if not accepted or float(np.linalg.norm(delta)) < options.step_tol:
            logger.warning(f"⚠️ Ajuste estancado con rms={rms:.3e}")
            return result("stalled", iteration)

    best = result("max_iter", options.max_iter)
    raise NonConvergence(
        f"sin convergencia tras {options.max_iter} iteraciones (rms={rms:.3e})",
        best=best,
        trace=trace,
    )
