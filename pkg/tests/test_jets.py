"""
Pruebas de la aritmética de jets contra derivadas por diferencias centrales
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.jets import Jet, base_value, chain, from_derivatives, jdet, jeinsum, jinv, stack_depths, truncate


def _matrix_field(x):
    """A(x) 4×4 suave e invertible cerca del origen"""
    a = np.eye(4) * 2.0
    for k in range(4):
        a = a + 0.3 * np.sin(x[k] + k) * np.roll(np.eye(4), k, axis=1)
    return a


def _jet_of(fn, x, h=1e-6):
    value = fn(x)
    der = np.stack([(fn(x + h * np.eye(4)[k]) - fn(x - h * np.eye(4)[k])) / (2 * h) for k in range(4)], axis=-1)
    return Jet(value, der)


@pytest.fixture
def point():
    return np.array([0.2, -0.4, 0.7, 0.1])


class TestJetAlgebra:
    def test_inverse_derivative(self, point):
        A = _jet_of(_matrix_field, point)
        expected = _jet_of(lambda x: np.linalg.inv(_matrix_field(x)), point)
        result = jinv(A)
        assert np.allclose(result.val, expected.val)
        assert np.allclose(result.der, expected.der, atol=1e-7)

    def test_determinant_derivative(self, point):
        A = _jet_of(_matrix_field, point)
        expected = _jet_of(lambda x: np.linalg.det(_matrix_field(x)), point)
        assert np.allclose(jdet(A).der, expected.der, atol=1e-7)

    def test_product_rule(self, point):
        A = _jet_of(_matrix_field, point)
        expected = _jet_of(lambda x: _matrix_field(x) @ _matrix_field(x).T, point)
        product = jeinsum("ab,cb->ac", A, A)
        assert np.allclose(product.der, expected.der, atol=1e-7)

    def test_constants_pass_through(self):
        a = np.arange(16.0).reshape(4, 4)
        assert isinstance(jeinsum("ab,bc->ac", a, a), np.ndarray)

    def test_jet_times_array_is_rejected(self, point):
        A = _jet_of(_matrix_field, point)
        with pytest.raises(TypeError):
            A * np.ones((4, 4))


class TestDepths:
    def test_from_derivatives_and_stack(self):
        derivs = [np.ones(3), 2 * np.ones((3, 4)), 3 * np.ones((3, 4, 4))]
        jet = from_derivatives(derivs, 2)
        assert jet.depth == 2
        assert [d.shape for d in stack_depths(jet)] == [(3,), (3, 4), (3, 4, 4)]
        assert np.all(base_value(truncate(jet, 1).der) == 2.0)

    def test_missing_derivatives(self):
        with pytest.raises(ValueError):
            from_derivatives([np.ones(3), np.ones((3, 4))], 2)

    def test_chain_rule(self):
        jet = Jet(np.ones(2), np.arange(8.0).reshape(2, 4))
        jac = 2.0 * np.eye(4)
        assert np.allclose(chain(jet, jac).der, 2.0 * jet.der)


class TestJetProperties:
    @settings(max_examples=60, deadline=None)
    @given(coords=st.lists(st.floats(min_value=-3.0, max_value=3.0), min_size=4, max_size=4))
    def test_inverse_derivative_anywhere(self, coords):
        x = np.array(coords)
        A = _jet_of(_matrix_field, x)
        expected = _jet_of(lambda y: np.linalg.inv(_matrix_field(y)), x)
        assert np.allclose(jinv(A).der, expected.der, atol=1e-6)
