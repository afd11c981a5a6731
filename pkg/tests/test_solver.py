"""
Pruebas del ajuste de familias: recuperación de Schwarzschild y corte infactible
"""

import pytest

from src.config import GRID_INSET
from src.exceptions import NonConvergence
from src.solver import AnsatzProblem, SolveOptions, solve_ansatz
from src.specfile import load_spec
from src.utils import build_grid


def _solve(spec, max_iter=50):
    points = build_grid(spec.domain, (1, 20, 1, 1), GRID_INSET)
    return solve_ansatz(
        spec.tetrad_field(),
        list(spec.unknowns),
        dict(spec.unknowns),
        points,
        anchors=spec.anchors,
        options=SolveOptions(max_iter=max_iter),
    )


class TestSolveAnsatz:
    def test_recovers_schwarzschild(self, specs_dir):
        result = _solve(load_spec(specs_dir / "schwarzschild_family.spec"))
        assert result.converged
        assert result.params["c0"] == pytest.approx(1.0, abs=1e-6)
        assert result.params["c1"] == pytest.approx(-2.0, abs=1e-6)
        assert result.trace[0]["rms"] > result.rms
        assert [t["iteration"] for t in result.trace] == list(range(len(result.trace)))

    def test_anchor_is_part_of_the_residual(self, specs_dir):
        spec = load_spec(specs_dir / "schwarzschild_family.spec")
        problem = AnsatzProblem(spec.tetrad_field(), ["c0", "c1"], [(0.5, 5.0, 1.2, 0.5)], spec.anchors)
        # 16 componentes de residual_B más un anclaje
        assert problem.residual([1.0, -2.0]).shape == (17,)
        assert abs(problem.residual([1.0, -2.0])[-1]) <= 1e-12
        assert abs(problem.residual([1.0, -1.0])[-1]) > 1e-2

    def test_infeasible_slice_does_not_converge(self, specs_dir):
        spec = load_spec(specs_dir / "schwarzschild_wrong_c0.spec")
        try:
            result = _solve(spec, max_iter=15)
        except NonConvergence as e:
            result = e.best
            assert result.status == "max_iter"
        assert not result.converged
        assert result.rms > 1e-6

    def test_requires_unknowns(self, specs_dir):
        spec = load_spec(specs_dir / "schwarzschild.spec")
        with pytest.raises(ValueError):
            AnsatzProblem(spec.tetrad_field(), [], [(0.5, 5.0, 1.2, 0.5)])
