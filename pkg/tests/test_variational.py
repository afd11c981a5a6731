"""
Pruebas de la forma lagrangiana: residuos de soluciones conocidas, oráculo de
Einstein, primera variación contra diferencias finitas e invariancia de Θ
"""

import numpy as np
import pytest

from src.exceptions import UnsupportedDeformation
from src.exprdsl import Constant
from src.samples import (
    FLRW_DOMAIN, SCHWARZSCHILD_DOMAIN, flrw, random_coord_change, random_deformation,
    random_lorentz_field, random_point, random_spin_data,
)
from src.sections import DeformationField, Section, spin_array
from src.transforms import frame_point, transform_section
from src.utils import relative_deviation
from src.variational import (
    action_derivative_fd, action_value, action_with_error, boundary_term, calibrate_einstein_constant,
    einstein_oracle, first_variation, gauss_legendre_box, prop31_check, prop32_check,
    residual_A, residual_B, residual_report, residuals_at, theta_pullback, transform_residual_B,
)

from tests.conftest import FLRW_POINT, SCHWARZSCHILD_POINT, UNIT_POINT

# Caja interior al dominio de Schwarzschild
BOX = ((0.2, 0.6), (4.0, 5.0), (1.0, 1.4), (0.2, 0.6))


class TestResiduals:
    def test_minkowski_is_exactly_critical(self, minkowski_field):
        res_a, res_b = residuals_at(Section(minkowski_field), UNIT_POINT)
        assert np.all(res_a == 0.0) and np.all(res_b == 0.0)
        assert theta_pullback(Section(minkowski_field), UNIT_POINT).value == 0.0

    @pytest.mark.parametrize("fixture", ["schwarzschild_section", "schwarzschild_explicit"])
    def test_schwarzschild_vacuum(self, request, fixture, rng):
        section = request.getfixturevalue(fixture)
        for _ in range(5):
            x = random_point(rng, SCHWARZSCHILD_DOMAIN)
            assert np.max(np.abs(residual_A(section, x))) <= 1e-9
            assert np.max(np.abs(residual_B(section, x))) <= 1e-8

    def test_scaled_connection_is_not_critical(self, schwarzschild_field):
        res_a, res_b = residuals_at(Section(schwarzschild_field, spin_scale=1.1), SCHWARZSCHILD_POINT)
        assert np.max(np.abs(res_a)) > 1e-3
        assert np.max(np.abs(res_b)) > 1e-3

    def test_report_norms(self, schwarzschild_section):
        grid = [SCHWARZSCHILD_POINT, SCHWARZSCHILD_POINT + 0.1]
        report = residual_report(schwarzschild_section, grid)
        assert set(report.norms) == {"resA_max_abs", "resA_rms", "resB_max_abs", "resB_rms"}
        assert report.norms["resB_max_abs"] <= 1e-8
        assert len(report.resA) == 2 and report.resA[0].shape == (4, 4, 4)


class TestEinsteinOracle:
    def test_flrw_matches_residual(self, flrw_field, rng):
        section = Section(flrw_field)
        for _ in range(5):
            x = random_point(rng, FLRW_DOMAIN)
            expected = einstein_oracle(flrw_field, x)
            assert np.max(np.abs(expected)) > 1e-2
            assert relative_deviation(residual_B(section, x), expected) <= 1e-7

    def test_vanishes_on_schwarzschild(self, schwarzschild_field):
        assert np.max(np.abs(einstein_oracle(schwarzschild_field, SCHWARZSCHILD_POINT))) <= 1e-9

    def test_calibration_recovers_unit_constant(self, flrw_field):
        samples = [(flrw_field, FLRW_POINT), (flrw(p=0.5), FLRW_POINT + 0.2)]
        assert calibrate_einstein_constant(samples) == pytest.approx(1.0, abs=1e-8)

    def test_calibration_needs_curvature(self, minkowski_field):
        with pytest.raises(ValueError):
            calibrate_einstein_constant([(minkowski_field, UNIT_POINT)])


class TestQuadrature:
    def test_weights_sum_to_volume(self):
        _, weights = gauss_legendre_box(BOX, 3)
        assert weights.sum() == pytest.approx(0.4 * 1.0 * 0.4 * 0.4)

    @pytest.mark.parametrize("quad", [4, 6])
    def test_constant_density_integrates_to_volume(self, minkowski_field, quad):
        # Tétrada plana y conexión constante: ℒ es la misma en todo punto
        spin = spin_array({(0, 0, 2): Constant(0.3), (1, 1, 2): Constant(0.7)})
        section = Section(minkowski_field, spin=spin)
        density = theta_pullback(section, UNIT_POINT).value
        assert abs(density) > 1e-3
        assert theta_pullback(section, np.array([0.3, 4.5, 1.2, 0.5])).value == pytest.approx(density, rel=1e-12)
        volume = 0.4 * 1.0 * 0.4 * 0.4
        assert action_value(section, BOX, quad=quad) == pytest.approx(density * volume, rel=1e-12)

    def test_action_error_estimate(self, schwarzschild_field):
        value, error = action_with_error(Section(schwarzschild_field, spin_scale=1.1), BOX, quad=2)
        assert np.isfinite(value) and np.isfinite(error)
        assert error >= 0.0


@pytest.mark.slow
class TestFirstVariation:
    def test_matches_finite_difference(self, rng, schwarzschild_field):
        section = Section(schwarzschild_field, spin_scale=1.1)
        X = random_deformation(rng, BOX)
        exact = first_variation(section, X, BOX, quad=6)
        approx = action_derivative_fd(section, X, BOX, quad=6)
        assert abs(exact) > 1e-8
        assert exact == pytest.approx(approx, rel=1e-4, abs=1e-9)

    def test_boundary_term_without_bump(self, rng, schwarzschild_field):
        section = Section(schwarzschild_field, spin_scale=1.1)
        raw = random_deformation(rng, BOX)
        X = DeformationField(raw.raw_tetrad.exprs, {k: raw.raw_spin[k] for k in [(0, 0, 1), (2, 1, 2), (3, 2, 3)]}, BOX, bump=False)
        assert abs(boundary_term(section, X, BOX, quad=5)) > 1e-8
        exact = first_variation(section, X, BOX, quad=5, with_boundary=True)
        approx = action_derivative_fd(section, X, BOX, quad=5)
        assert exact == pytest.approx(approx, rel=1e-4, abs=1e-9)

    def test_support_must_fit_box(self, rng, schwarzschild_section):
        X = random_deformation(rng, BOX)
        smaller = ((0.3, 0.5),) + BOX[1:]
        with pytest.raises(UnsupportedDeformation):
            first_variation(schwarzschild_section, X, smaller, quad=2)

    def test_vanishes_on_critical_section(self, rng, schwarzschild_section):
        X = random_deformation(rng, BOX)
        assert abs(first_variation(schwarzschild_section, X, BOX, quad=3)) <= 1e-9


class TestCovariance:
    def test_residual_B_transforms_homogeneously(self, rng, flrw_field):
        section = Section(flrw_field)
        for _ in range(3):
            lorentz = random_lorentz_field(rng)
            change = random_coord_change(rng)
            x = random_point(rng, FLRW_DOMAIN)
            point = frame_point(lorentz, change, change.forward_at(x))
            moved = transform_section(section, lorentz, change)
            expected = transform_residual_B(residual_B(section, point.x), point)
            assert relative_deviation(residual_B(moved, point.xbar), expected) <= 1e-8

    @pytest.mark.slow
    @pytest.mark.parametrize("fixture", ["schwarzschild_section", "schwarzschild_explicit"])
    def test_theta_is_invariant(self, request, fixture, rng):
        section = request.getfixturevalue(fixture)
        for _ in range(200):
            lorentz = random_lorentz_field(rng)
            change = random_coord_change(rng)
            x = random_point(rng, SCHWARZSCHILD_DOMAIN)
            assert prop31_check(section, lorentz, change, change.forward_at(x)).passed()

    def test_homogeneous_law_breaks_invariance(self, rng, schwarzschild_section):
        lorentz = random_lorentz_field(rng)
        change = random_coord_change(rng)
        x = random_point(rng, SCHWARZSCHILD_DOMAIN)
        sample = prop31_check(schwarzschild_section, lorentz, change, change.forward_at(x), inhomogeneous=False)
        assert sample.deviation > 1e-6


class TestExchangeIdentities:
    def test_hold_for_random_data(self, rng):
        for _ in range(1000):
            assert prop32_check(*random_spin_data(rng)).passed()

    def test_trace_shift_breaks_them(self, rng):
        assert prop32_check(*random_spin_data(rng), trace_shift=0.5).deviation > 1e-6

