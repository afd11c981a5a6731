"""
Pruebas de corrientes de Noether y del exponente del defecto de simetría
"""

import numpy as np
import pytest

from src.config import GRID_INSET
from src.exceptions import NotCritical, UnsupportedNoetherField
from src.exprdsl import parse
from src.jets import base_value
from src.noether import (
    NoetherField, current, defect_exponent, divergence_identity_gap, flow_section, induced_spin_variation,
    spin_variation, symmetry_defect,
)
from src.samples import SCHWARZSCHILD_DOMAIN, flrw_linear, lorentz_generator, schwarzschild_spin
from src.sections import Section
from src.specfile import load_spec
from src.transforms import JVectorField
from src.utils import build_grid
from src.variational import theta_pullback

from tests.conftest import FLRW_POINT, SCHWARZSCHILD_POINT

SMALL_GRID = build_grid(SCHWARZSCHILD_DOMAIN, (1, 3, 3, 1), GRID_INSET)


class TestCurrent:
    @pytest.mark.parametrize("axis", [0, 3])
    def test_translations_are_conserved(self, schwarzschild_section, axis):
        value = current(schwarzschild_section, NoetherField(JVectorField.translation(axis)), SCHWARZSCHILD_POINT)
        assert value.J.shape == (4,)
        assert abs(value.div) <= 1e-7 * (1.0 + np.max(np.abs(value.J)))

    def test_lorentz_generator_is_conserved(self, rng, schwarzschild_section):
        Z = NoetherField(JVectorField.lorentz_generator(lorentz_generator(rng)))
        value = current(schwarzschild_section, Z, SCHWARZSCHILD_POINT)
        assert abs(value.div) <= 1e-7 * (1.0 + np.max(np.abs(value.J)))

    def test_alpha_shifts_current(self, schwarzschild_section):
        X = JVectorField.translation(0)
        alpha = JVectorField(epsilon=[parse("x1"), 0.0, 0.0, 0.0]).epsilon
        plain = current(schwarzschild_section, NoetherField(X), SCHWARZSCHILD_POINT)
        shifted = current(schwarzschild_section, NoetherField(X, alpha), SCHWARZSCHILD_POINT)
        assert shifted.J[0] == pytest.approx(plain.J[0] - SCHWARZSCHILD_POINT[1])
        assert shifted.div == pytest.approx(plain.div)


class TestDivergenceIdentity:
    def test_holds_off_shell(self, rng):
        section = Section(flrw_linear())
        fields = [
            JVectorField.translation(1),
            JVectorField.lorentz_generator(lorentz_generator(rng)),
            JVectorField(epsilon=[parse("0.1*x1"), 0.0, parse("0.2*x0"), 0.0]),
        ]
        for X in fields:
            Z = NoetherField(X)
            scale = 1.0 + np.max(np.abs(current(section, Z, FLRW_POINT).J))
            assert abs(divergence_identity_gap(section, Z, FLRW_POINT)) <= 1e-8 * scale

    def test_off_shell_current_is_not_conserved(self):
        section = Section(flrw_linear())
        value = current(section, NoetherField(JVectorField.translation(0)), FLRW_POINT)
        assert abs(value.div) > 1e-3


class TestNoetherField:
    def test_translational_part_needs_induced_connection(self, schwarzschild_explicit):
        G = np.zeros((4, 4))
        G[0, 1] = 1.0
        Z = NoetherField(JVectorField(G=G.tolist()))
        with pytest.raises(UnsupportedNoetherField):
            current(schwarzschild_explicit, Z, SCHWARZSCHILD_POINT)

    def test_rejects_non_lorentz_generator(self, schwarzschild_explicit):
        Z = NoetherField(JVectorField(D=np.diag([1.0, 0.0, 0.0, 0.0]).tolist()))
        with pytest.raises(UnsupportedNoetherField):
            current(schwarzschild_explicit, Z, SCHWARZSCHILD_POINT)

    def test_alpha_shape(self):
        with pytest.raises(ValueError):
            NoetherField(JVectorField.translation(0), JVectorField().D)


class TestInducedVariation:
    def _lorentz_field(self, rng):
        return JVectorField(
            epsilon=[parse("0.1*x1"), 0.0, 0.0, parse("0.2*x0")],
            D=lorentz_generator(rng).tolist(),
        )

    def test_matches_closed_form(self, rng, schwarzschild_section):
        X = self._lorentz_field(rng)
        chain = base_value(induced_spin_variation(schwarzschild_section, NoetherField(X), SCHWARZSCHILD_POINT))
        closed = spin_variation(X, schwarzschild_spin()).values(SCHWARZSCHILD_POINT, {"M": 1.0})
        assert np.max(np.abs(chain - closed)) <= 1e-9 * (1.0 + np.max(np.abs(closed)))

    def test_induced_and_explicit_currents_agree(self, rng, schwarzschild_section, schwarzschild_explicit):
        Z = NoetherField(self._lorentz_field(rng))
        induced = current(schwarzschild_section, Z, SCHWARZSCHILD_POINT)
        explicit = current(schwarzschild_explicit, Z, SCHWARZSCHILD_POINT)
        assert np.allclose(induced.J, explicit.J, rtol=1e-9, atol=1e-10)
        assert induced.div == pytest.approx(explicit.div, abs=1e-8)

    def test_translational_part_divergence_is_lagrangian_variation(self, rng, schwarzschild_section):
        # Sobre una sección crítica y con ε = 0: ∂_a J^a = dℒ/dξ a lo largo del flujo
        X = JVectorField(G=rng.uniform(-0.3, 0.3, (4, 4)).tolist())
        value = current(schwarzschild_section, NoetherField(X), SCHWARZSCHILD_POINT)
        h = 1e-4
        plus = theta_pullback(flow_section(schwarzschild_section, X, h), SCHWARZSCHILD_POINT).value
        minus = theta_pullback(flow_section(schwarzschild_section, X, -h), SCHWARZSCHILD_POINT).value
        expected = (plus - minus) / (2.0 * h)
        assert value.div == pytest.approx(expected, abs=1e-6 * (1.0 + abs(expected)))

    def test_rejects_explicit_connection(self, schwarzschild_explicit):
        with pytest.raises(UnsupportedNoetherField):
            induced_spin_variation(schwarzschild_explicit, NoetherField(JVectorField.translation(0)), SCHWARZSCHILD_POINT)


class TestSymmetryDefect:
    def test_lorentz_generator_has_quadratic_defect(self, rng, schwarzschild_section):
        X = JVectorField.lorentz_generator(lorentz_generator(rng, scale=0.5))
        slope, (big, small) = defect_exponent(schwarzschild_section, X, SMALL_GRID)
        assert big > small > 0.0
        assert slope == pytest.approx(2.0, abs=0.25)

    def test_non_symmetry_has_linear_defect(self, schwarzschild_section):
        # e^0 → (1 + ξr) e^0 no es un cambio de escala de t
        D = np.zeros((4, 4)).tolist()
        D[0][0] = parse("x1")
        X = JVectorField(D=D)
        slope, _ = defect_exponent(schwarzschild_section, X, SMALL_GRID)
        assert slope == pytest.approx(1.0, abs=0.25)

    def test_random_translational_part_has_linear_defect(self, rng, schwarzschild_section):
        X = JVectorField(G=rng.uniform(-0.3, 0.3, (4, 4)).tolist())
        slope, (big, small) = defect_exponent(schwarzschild_section, X, SMALL_GRID)
        assert big > small > 0.0
        assert slope == pytest.approx(1.0, abs=0.25)

    def test_static_translation_is_exact(self, schwarzschild_section):
        assert symmetry_defect(schwarzschild_section, JVectorField.translation(0), 1e-2, SMALL_GRID) <= 1e-8

    def test_explicit_connection_flows(self, rng, schwarzschild_explicit):
        X = JVectorField.lorentz_generator(lorentz_generator(rng, scale=0.5))
        flowed = flow_section(schwarzschild_explicit, X, 1e-3)
        assert flowed.spin is not None
        assert symmetry_defect(schwarzschild_explicit, X, 1e-3, SMALL_GRID) <= 1e-4

    def test_requires_critical_section(self, specs_dir):
        section = load_spec(specs_dir / "perturbed.spec").section()
        with pytest.raises(NotCritical) as info:
            symmetry_defect(section, JVectorField.translation(0), 1e-2, SMALL_GRID)
        assert info.value.rms > info.value.tolerance
