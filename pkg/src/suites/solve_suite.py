"""
Suite `solve`: ajuste de una familia de tétradas con incógnitas
"""

from typing import Optional, Sequence

from src.config import GRID_INSET, SOLVER_MAX_ITER, SOLVER_RMS_TOL, TF_THREADS, TOLERANCES
from src.exceptions import NonConvergence, SpecFileError
from src.models import SuiteResult
from src.sections import Section
from src.solver import SolveOptions, SolveResult, solve_ansatz
from src.specfile import SpecFile
from src.suites.base_suite import BaseSuite
from src.utils import build_grid, max_abs
from src.variational import residual_B


class SolveSuite(BaseSuite):
    """
    Ejecuta solve_ansatz sobre los puntos de colocación del dominio

    Checks: converged (rms del residuo apilado) y vacuum (residual_B en el óptimo).
    """

    name = "solve"

    def __init__(
        self,
        spec: SpecFile,
        collocation: Sequence[int] = (1, 20, 1, 1),
        max_iter: int = SOLVER_MAX_ITER,
        threads: int = TF_THREADS,
    ):
        super().__init__(spec.name, threads)
        self.spec = spec
        self.counts = tuple(int(c) for c in collocation)
        self.max_iter = int(max_iter)
        self.solution: Optional[SolveResult] = None

    def execute(self, result: SuiteResult) -> None:
        spec = self.spec
        if not spec.unknowns:
            raise SpecFileError(f"{spec.name}: el spec no declara [unknowns]")
        result.input_digest = spec.digest
        result.grid = {"collocation": list(self.counts), "inset": GRID_INSET}
        points = build_grid(spec.domain, self.counts, GRID_INSET)
        options = SolveOptions(max_iter=self.max_iter, threads=self.threads)

        try:
            self.solution = solve_ansatz(
                spec.tetrad_field(),
                list(spec.unknowns),
                dict(spec.unknowns),
                points,
                anchors=spec.anchors,
                options=options,
            )
        except NonConvergence as e:
            self.solution = e.best
            self.logger.error(f"❌ Sin convergencia; mejor iterado {e.best.params} (rms={e.best.rms:.3e})")

        solution = self.solution
        result.extra.update({
            "params": solution.params,
            "status": solution.status,
            "iterations": solution.iterations,
            "trace": [{"iteration": t["iteration"], "rms": t["rms"]} for t in solution.trace],
        })
        self._log_table(solution)

        self.measure(
            "converged",
            lambda: (solution.rms, {
                "status": solution.status, "iterations": solution.iterations, "rms": solution.rms,
            }),
            SOLVER_RMS_TOL,
            spec.expects_failure("converged"),
        )

        section = Section(spec.tetrad_field(solution.params))
        self.measure(
            "vacuum",
            lambda: (max_abs(residual_B(section, x) for x in points), {"points": len(points)}),
            TOLERANCES["vacuum"],
            spec.expects_failure("vacuum"),
        )

    def _log_table(self, solution: SolveResult) -> None:
        self.logger.info("📋 Parámetros ajustados:")
        for name, value in solution.params.items():
            start = self.spec.unknowns[name]
            self.logger.info(f"  {name:>8} = {value: .10f}   (inicio {start: .4f})")
        self.logger.info(f"  estado: {solution.status}, iteraciones: {solution.iterations}, rms: {solution.rms:.3e}")
