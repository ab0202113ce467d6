import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catkey.entropy import (NumericalError, binary_entropy, eigh, shannon_entropy,
                            von_neumann_entropy)
from catkey.states import rho_pq


def test_binary_entropy_endpoints():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == pytest.approx(1.0, abs=1e-15)


def test_binary_entropy_reference_value():
    assert binary_entropy(0.11) == pytest.approx(0.49992, abs=1e-5)


def test_binary_entropy_symmetric_on_grid():
    x = np.linspace(0, 1, 10_000)
    np.testing.assert_allclose(binary_entropy(x), binary_entropy(1 - x), atol=1e-12)


def test_binary_entropy_small_argument_relative_accuracy():
    x = 1e-30
    expected = -x * math.log2(x) + x / math.log(2)
    assert binary_entropy(x) == pytest.approx(expected, rel=1e-12)


def test_binary_entropy_rejects_out_of_range():
    with pytest.raises(ValueError):
        binary_entropy(1.5)


def test_shannon_entropy_examples():
    assert shannon_entropy([1, 0, 0, 0]) == 0.0
    assert shannon_entropy([0.25] * 4) == pytest.approx(2.0)
    # subnormalized input is summed as is
    assert shannon_entropy([0.5, 0.25]) == pytest.approx(1.0)


def test_eigh_descending_and_examples():
    vals, _ = eigh(np.eye(2))
    np.testing.assert_allclose(vals, [1, 1])
    vals, _ = eigh(np.diag([0.3, 0.7]))
    np.testing.assert_allclose(vals, [0.7, 0.3])
    vals, _ = eigh(rho_pq(0.1, 0.1))
    r = math.sqrt(1 - 16 * 0.1 * 0.9 * 0.1 * 0.9)
    np.testing.assert_allclose(vals, [0.5 * (1 + r), 0.5 * (1 - r)], atol=1e-14)


def test_eigh_round_trip(rng):
    for dim in (2, 17, 128, 512):
        a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        a = a + a.conj().T
        vals, vecs = eigh(a)
        assert np.all(np.diff(vals) <= 0)
        err = np.max(np.abs(vecs @ np.diag(vals) @ vecs.conj().T - a))
        assert err <= 1e-10 * dim


def test_eigh_rejects_non_hermitian():
    with pytest.raises(ValueError):
        eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_von_neumann_examples():
    psi = np.array([0.6, 0.8])
    assert von_neumann_entropy(np.outer(psi, psi)) == pytest.approx(0.0, abs=1e-12)
    assert von_neumann_entropy(np.eye(2) / 2) == pytest.approx(1.0)
    r = math.sqrt(1 - 16 * 0.1 * 0.9 * 0.1 * 0.9)
    expected = binary_entropy(0.5 * (1 + r))
    assert von_neumann_entropy(rho_pq(0.1, 0.1)) == pytest.approx(expected, abs=1e-12)


def test_negative_eigenvalue_is_an_error():
    with pytest.raises(NumericalError):
        von_neumann_entropy(np.diag([1.0, -1e-6]))
    # tiny negatives inside the clipping window are accepted
    assert von_neumann_entropy(np.diag([1.0, -1e-12])) == pytest.approx(0.0, abs=1e-10)


def _random_density(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    a = g @ g.conj().T
    return a / np.trace(a).real


def _random_unitary(rng, dim):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(2, 12))
def test_entropy_unitary_invariance(seed, dim):
    rng = np.random.default_rng(seed)
    a = _random_density(rng, dim)
    u = _random_unitary(rng, dim)
    assert von_neumann_entropy(u @ a @ u.conj().T) == pytest.approx(von_neumann_entropy(a), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d1=st.integers(1, 5), d2=st.integers(1, 5))
def test_entropy_additive_on_products(seed, d1, d2):
    rng = np.random.default_rng(seed)
    a, b = _random_density(rng, d1), _random_density(rng, d2)
    assert von_neumann_entropy(np.kron(a, b)) == pytest.approx(
        von_neumann_entropy(a) + von_neumann_entropy(b), abs=1e-9)


@given(st.floats(0, 1))
def test_binary_entropy_bounded(x):
    h = binary_entropy(x)
    assert 0.0 <= h <= 1.0 + 1e-15
