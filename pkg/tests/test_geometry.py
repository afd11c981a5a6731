"""
Pruebas de geometría puntual: conexión por dos rutas, ida y vuelta E ↔ ω,
torsión nula y curvatura de soluciones conocidas
"""

import numpy as np
import pytest

from src.exceptions import MissingDerivatives, SingularTetrad
from src.geometry import (
    EPSILON, TetradField, antisym_jet, christoffel, covariant_ext_diff, curvature, induced_spin_at,
    jet_from_spin, levi_civita_symbol, metric_from_tetrad, ricci_mixed, sigma, spin_from_christoffel,
    spin_from_tetrad, tetrad_at,
)
from src.models import SpinConnectionValue
from src.samples import UNIT_DOMAIN, random_point, random_tetrad, schwarzschild_spin

from tests.conftest import FLRW_POINT, SCHWARZSCHILD_POINT, UNIT_POINT


def _two_routes(field, x):
    v = tetrad_at(field, x)
    g = metric_from_tetrad(v)
    return v, spin_from_tetrad(v, g).omega, spin_from_christoffel(v, christoffel(g)).omega


class TestLeviCivitaSymbol:
    def test_values(self):
        assert EPSILON[0, 1, 2, 3] == 1.0
        assert EPSILON[1, 0, 2, 3] == -1.0
        assert EPSILON[0, 0, 2, 3] == 0.0
        assert np.sum(EPSILON ** 2) == 24

    def test_other_dimensions(self):
        eps3 = levi_civita_symbol(3)
        assert eps3[2, 1, 0] == -1.0


class TestMetric:
    def test_signature(self, minkowski_field):
        g = metric_from_tetrad(tetrad_at(minkowski_field, UNIT_POINT))
        assert g.signature() == (-1, 1, 1, 1)
        assert np.allclose(g.dg, 0.0)

    def test_schwarzschild_components(self, schwarzschild_field):
        g = metric_from_tetrad(tetrad_at(schwarzschild_field, SCHWARZSCHILD_POINT)).g
        r, theta = SCHWARZSCHILD_POINT[1], SCHWARZSCHILD_POINT[2]
        assert g[0, 0] == pytest.approx(-(1 - 2 / r))
        assert g[1, 1] == pytest.approx(1 / (1 - 2 / r))
        assert g[3, 3] == pytest.approx((r * np.sin(theta)) ** 2)

    def test_singular_tetrad(self):
        field = TetradField.from_strings([["1", "0", "0", "0"], ["0", "x1", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]])
        with pytest.raises(SingularTetrad) as info:
            tetrad_at(field, [0.0, 0.0, 0.0, 0.0])
        assert info.value.point == (0.0, 0.0, 0.0, 0.0)


class TestSpinFromTetrad:
    def test_minkowski_is_flat(self, minkowski_field):
        _, omega, _ = _two_routes(minkowski_field, UNIT_POINT)
        assert np.all(omega == 0.0)

    @pytest.mark.parametrize("fixture, point", [
        ("schwarzschild_field", SCHWARZSCHILD_POINT),
        ("flrw_field", FLRW_POINT),
        ("rindler_field", np.array([0.5, 2.0, 0.5, 0.5])),
    ])
    def test_two_routes_agree_on_known_fields(self, request, fixture, point):
        _, direct, via_christoffel = _two_routes(request.getfixturevalue(fixture), point)
        assert np.max(np.abs(direct - via_christoffel)) <= 1e-9

    @pytest.mark.slow
    def test_two_routes_agree_on_random_tetrads(self, rng):
        for _ in range(1000):
            field = random_tetrad(rng)
            _, direct, via_christoffel = _two_routes(field, random_point(rng, UNIT_DOMAIN))
            assert np.max(np.abs(direct - via_christoffel)) <= 1e-9

    def test_antisymmetric_in_lorentz_indices(self, rng):
        _, omega, _ = _two_routes(random_tetrad(rng), UNIT_POINT)
        assert np.allclose(omega, -np.transpose(omega, (0, 2, 1)))

    def test_matches_explicit_schwarzschild_connection(self, schwarzschild_field):
        _, omega, _ = _two_routes(schwarzschild_field, SCHWARZSCHILD_POINT)
        explicit = schwarzschild_spin().values(SCHWARZSCHILD_POINT, {"M": 1.0})
        assert np.max(np.abs(omega - explicit)) <= 1e-12

    def test_rindler_boost_connection(self, rindler_field):
        # e^0 = x dt: |ω_t^{01}| = 1
        _, omega, _ = _two_routes(rindler_field, np.array([0.5, 2.0, 0.5, 0.5]))
        assert abs(omega[0, 0, 1]) == pytest.approx(1.0)
        assert np.count_nonzero(np.abs(omega) > 1e-12) == 2


class TestRoundTrip:
    def test_recovers_antisymmetrized_jet(self, rng):
        for _ in range(50):
            v = tetrad_at(random_tetrad(rng), random_point(rng, UNIT_DOMAIN))
            omega = spin_from_tetrad(v)
            assert np.max(np.abs(jet_from_spin(v, omega).E - antisym_jet(v).E)) <= 1e-9

    def test_sigma_is_antisymmetric(self, rng):
        v = tetrad_at(random_tetrad(rng), UNIT_POINT)
        s = sigma(v, antisym_jet(v))
        assert np.allclose(s, -np.transpose(s, (0, 2, 1)))

    def test_sigma_depends_only_on_tetrad_and_jet(self, rng):
        v = tetrad_at(random_tetrad(rng), UNIT_POINT)
        E = antisym_jet(v)
        expected = np.einsum("pl,lij->pji", v.einv, E.E)
        assert np.allclose(sigma(v, E), expected)
        with pytest.raises(TypeError):
            sigma(v, E, g=metric_from_tetrad(v))


class TestTorsion:
    @pytest.mark.parametrize("fixture, point", [
        ("schwarzschild_field", SCHWARZSCHILD_POINT),
        ("flrw_field", FLRW_POINT),
    ])
    def test_covariant_exterior_differential_vanishes(self, request, fixture, point):
        v = tetrad_at(request.getfixturevalue(fixture), point)
        g = metric_from_tetrad(v)
        D = covariant_ext_diff(v, spin_from_tetrad(v, g), christoffel(g))
        assert np.max(np.abs(D)) <= 1e-9

    def test_wrong_connection_has_torsion(self, schwarzschild_field):
        v = tetrad_at(schwarzschild_field, SCHWARZSCHILD_POINT)
        g = metric_from_tetrad(v)
        scaled = SpinConnectionValue(omega=1.1 * spin_from_tetrad(v, g).omega)
        assert np.max(np.abs(covariant_ext_diff(v, scaled, christoffel(g)))) > 1e-3


class TestCurvature:
    def test_schwarzschild_is_ricci_flat(self, schwarzschild_field):
        v, omega = induced_spin_at(schwarzschild_field, SCHWARZSCHILD_POINT)
        R = curvature(omega)
        assert np.max(np.abs(R.R)) > 1e-3
        assert np.max(np.abs(ricci_mixed(R, v))) <= 1e-9

    def test_flrw_is_not_ricci_flat(self, flrw_field):
        v, omega = induced_spin_at(flrw_field, FLRW_POINT)
        assert np.max(np.abs(ricci_mixed(curvature(omega), v))) > 1e-2

    def test_requires_derivatives(self):
        with pytest.raises(MissingDerivatives):
            curvature(SpinConnectionValue(omega=np.zeros((4, 4, 4))))
