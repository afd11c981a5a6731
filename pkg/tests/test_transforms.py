"""
Pruebas de leyes de transformación: acción de grupo sobre el jet, conexión,
formas de contacto y prolongaciones de morfismos y campos vectoriales
"""

import numpy as np
import pytest

from src.exceptions import InvalidCoordChange, LorentzViolation, SingularMatrix
from src.exprdsl import Coord, parse
from src.geometry import ETA, antisym_jet, induced_spin_at, spin_from_tetrad, tetrad_at
from src.samples import (
    UNIT_DOMAIN, lorentz_generator, nonholonomic_witness, random_coord_change, random_lorentz_field,
    random_point, random_tetrad,
)
from src.sections import Section
from src.transforms import (
    CoordChange, JVectorField, LorentzField, Morphism, contact_pullback, contact_transform,
    frame_point, gauge_action, prolong_vector, transform_E, transform_jet, transform_section,
    transform_spin, transform_tetrad,
)
from src.utils import relative_deviation

from tests.conftest import SCHWARZSCHILD_POINT, UNIT_POINT


def _random_setup(rng):
    field = random_tetrad(rng)
    lorentz = random_lorentz_field(rng)
    change = random_coord_change(rng)
    x = random_point(rng, UNIT_DOMAIN)
    return field, lorentz, change, frame_point(lorentz, change, change.forward_at(x))


class TestLorentzField:
    def test_boost_and_rotation_preserve_eta(self):
        field = LorentzField.boost(1, "0.3*x0 + 0.2").compose(LorentzField.rotation((2, 3), "x1"))
        lam = field.at(UNIT_POINT)
        assert np.allclose(lam.T @ ETA @ lam, ETA)

    def test_lower_is_inverse_transpose(self):
        lam = LorentzField.boost(2, "0.7").at(UNIT_POINT)
        assert np.allclose(LorentzField.lower(lam), np.linalg.inv(lam).T)

    def test_constant_rejects_non_lorentz(self):
        with pytest.raises(LorentzViolation) as info:
            LorentzField.constant(np.diag([2.0, 1.0, 1.0, 1.0]))
        assert info.value.deviation == pytest.approx(3.0)

    def test_validate_over_points(self):
        rows = np.eye(4).tolist()
        rows[0][1] = parse("x1")
        field = LorentzField(rows)
        assert field.validate([np.zeros(4)]) == 0.0
        with pytest.raises(LorentzViolation):
            field.validate([UNIT_POINT])

    @pytest.mark.parametrize("axis", [0, 4])
    def test_invalid_boost_axis(self, axis):
        with pytest.raises(ValueError):
            LorentzField.boost(axis, "1")


class TestCoordChange:
    def test_random_changes_verify(self, rng):
        for _ in range(10):
            assert random_coord_change(rng).verify([random_point(rng, UNIT_DOMAIN) for _ in range(3)]) <= 1e-9

    def test_wrong_inverse(self):
        forward = [parse("x0 + x1"), Coord(1), Coord(2), Coord(3)]
        change = CoordChange(forward, [Coord(k) for k in range(4)], name="roto")
        with pytest.raises(InvalidCoordChange):
            change.verify([UNIT_POINT])

    def test_compose_order(self):
        shift = CoordChange.linear(np.eye(4), [1.0, 0.0, 0.0, 0.0])
        double = CoordChange.scaling([2.0, 1.0, 1.0, 1.0])
        composed = double.compose(shift)
        assert composed.forward_at([1.0, 0.0, 0.0, 0.0])[0] == pytest.approx(4.0)
        assert composed.inverse_at([4.0, 0.0, 0.0, 0.0])[0] == pytest.approx(1.0)

    def test_singular_linear(self):
        with pytest.raises(SingularMatrix):
            CoordChange.linear(np.zeros((4, 4)))


class TestGaugeAction:
    def test_identity(self):
        X = np.arange(16.0).reshape(4, 4)
        assert np.allclose(gauge_action(np.eye(4), np.eye(4), X), X)

    def test_singular_jacobian(self):
        with pytest.raises(SingularMatrix):
            gauge_action(np.eye(4), np.zeros((4, 4)), np.eye(4))


class TestJetTransform:
    def test_matches_symbolic_transform(self, rng):
        for _ in range(10):
            field, lorentz, change, point = _random_setup(rng)
            expected = tetrad_at(transform_tetrad(field, lorentz, change), point.xbar)
            actual = transform_jet(tetrad_at(field, point.x), point)
            assert np.max(np.abs(actual.e - expected.e)) <= 1e-10
            assert np.max(np.abs(actual.de - expected.de)) <= 1e-9

    def test_E_law_matches_antisymmetrized_jet(self, rng):
        for _ in range(10):
            field, _, _, point = _random_setup(rng)
            v = tetrad_at(field, point.x)
            expected = antisym_jet(transform_jet(v, point)).E
            assert np.max(np.abs(transform_E(antisym_jet(v), v, point).E - expected)) <= 1e-10

    def test_induced_connection_is_covariant(self, rng):
        for _ in range(10):
            field, _, _, point = _random_setup(rng)
            v = tetrad_at(field, point.x)
            expected = spin_from_tetrad(transform_jet(v, point)).omega
            actual = transform_spin(spin_from_tetrad(v), point).omega
            assert np.max(np.abs(actual - expected)) <= 1e-9

    def test_homogeneous_law_alone_fails(self, rng):
        field, _, _, point = _random_setup(rng)
        v = tetrad_at(field, point.x)
        expected = spin_from_tetrad(transform_jet(v, point)).omega
        actual = transform_spin(spin_from_tetrad(v), point, inhomogeneous=False).omega
        assert np.max(np.abs(actual - expected)) > 1e-4


class TestContact:
    def test_vanishes_on_holonomic_sections(self, rng, schwarzschild_section):
        assert np.max(np.abs(contact_pullback(schwarzschild_section, SCHWARZSCHILD_POINT).C)) <= 1e-12
        section = Section(random_tetrad(rng))
        assert np.max(np.abs(contact_pullback(section, UNIT_POINT).C)) <= 1e-12

    def test_nonholonomic_witness(self):
        C = contact_pullback(nonholonomic_witness(0.1), UNIT_POINT).C
        assert C[0, 0, 1] == pytest.approx(0.1)
        assert np.allclose(C, -np.transpose(C, (0, 2, 1)))
        assert np.count_nonzero(np.abs(C) > 1e-14) == 2

    def test_covariance(self, rng):
        witness = nonholonomic_witness(0.3)
        for _ in range(5):
            lorentz = random_lorentz_field(rng)
            change = random_coord_change(rng)
            point = frame_point(lorentz, change, change.forward_at(random_point(rng, UNIT_DOMAIN)))
            expected = contact_transform(contact_pullback(witness, point.x), point)
            actual = contact_pullback(transform_section(witness, lorentz, change), point.xbar)
            assert relative_deviation(actual.C, expected.C) <= 1e-10

    def test_transform_section_keeps_induced(self, schwarzschild_section):
        moved = transform_section(schwarzschild_section, LorentzField.identity(), CoordChange.identity())
        assert moved.is_induced


class TestMorphism:
    def test_apply_matches_jet_transform(self, rng):
        field, lorentz, change, point = _random_setup(rng)
        v = tetrad_at(field, point.x)
        E = antisym_jet(v).E
        y, e_hat, E_hat = Morphism(lorentz.matrix, None, change, lorentz.params).apply(point.x, v.e, E)

        assert np.allclose(y, point.xbar)
        assert np.max(np.abs(e_hat - transform_jet(v, point).e)) <= 1e-10
        assert np.max(np.abs(E_hat - transform_E(antisym_jet(v), v, point).E)) <= 1e-10

    def test_shift_moves_e_only(self):
        shift = [["0.5", "0", "0", "0"], ["0", "0", "0", "0"], ["0", "0", "0", "0"], ["0", "0", "0", "0"]]
        morphism = Morphism(LorentzField.identity().matrix, shift)
        y, e_hat, E_hat = morphism.apply(UNIT_POINT, np.eye(4), np.zeros((4, 4, 4)))
        assert np.allclose(y, UNIT_POINT)
        assert e_hat[0, 0] == pytest.approx(1.5)
        assert np.all(E_hat == 0.0)

    def test_compose_matches_sequential_application(self, rng):
        field = random_tetrad(rng)
        first = Morphism(random_lorentz_field(rng).matrix, None, random_coord_change(rng))
        second = Morphism(random_lorentz_field(rng).matrix, None, random_coord_change(rng))
        x = random_point(rng, UNIT_DOMAIN)
        v = tetrad_at(field, x)
        E = antisym_jet(v).E

        y, e_mid, E_mid = first.apply(x, v.e, E)
        z, e_seq, E_seq = second.apply(y, e_mid, E_mid)
        z2, e_comp, E_comp = second.compose(first).apply(x, v.e, E)

        assert np.allclose(z, z2)
        assert np.max(np.abs(e_seq - e_comp)) <= 1e-10
        assert np.max(np.abs(E_seq - E_comp)) <= 1e-9

    def test_identity_is_neutral(self, rng):
        v = tetrad_at(random_tetrad(rng), UNIT_POINT)
        y, e_hat, E_hat = Morphism.identity().apply(UNIT_POINT, v.e, antisym_jet(v).E)
        assert np.allclose(y, UNIT_POINT) and np.allclose(e_hat, v.e)
        assert np.allclose(E_hat, antisym_jet(v).E)


class TestJVectorField:
    def test_translation_prolongation(self, schwarzschild_field):
        v = tetrad_at(schwarzschild_field, SCHWARZSCHILD_POINT)
        prolonged = prolong_vector(JVectorField.translation(1), SCHWARZSCHILD_POINT, v)
        assert np.allclose(prolonged.epsilon, [0.0, 1.0, 0.0, 0.0])
        assert np.all(prolonged.tetrad == 0.0) and np.all(prolonged.h == 0.0)

    def test_lorentz_generator_rotates_frame(self, rng, schwarzschild_field):
        D = lorentz_generator(rng)
        X = JVectorField.lorentz_generator(D)
        assert X.is_vertical()
        v = tetrad_at(schwarzschild_field, SCHWARZSCHILD_POINT)
        prolonged = prolong_vector(X, SCHWARZSCHILD_POINT, v)
        assert np.allclose(prolonged.tetrad, D @ v.e)
        assert np.allclose(prolonged.h, np.einsum("mn,nij->mij", D, antisym_jet(v).E))

    def test_h_matches_flow_of_E(self, schwarzschild_field):
        # D depende de x: h incluye ½(∂_jD e_i − ∂_iD e_j)
        rows = np.zeros((4, 4)).tolist()
        rows[0][1] = rows[1][0] = parse("0.1*x1")
        X = JVectorField(D=rows, name="boost_radial")
        xi = 0.5
        v = tetrad_at(schwarzschild_field, SCHWARZSCHILD_POINT)
        flowed = tetrad_at(X.euler_flow(schwarzschild_field, xi), SCHWARZSCHILD_POINT)
        expected = (antisym_jet(flowed).E - antisym_jet(v).E) / xi
        assert np.max(np.abs(prolong_vector(X, SCHWARZSCHILD_POINT, v).h - expected)) <= 1e-9

    def test_scaled_and_sum(self):
        a = JVectorField.translation(0)
        total = a + a.scaled(2.0)
        assert total.epsilon.values(UNIT_POINT)[0] == pytest.approx(3.0)
