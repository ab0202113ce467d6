import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from catkey.entropy import binary_entropy, eigh, von_neumann_entropy
from catkey.oracle import dense_mixture_entropy
from catkey.schur import (MAX_BLOCKLENGTH, ReflectedPowers, block_structure, diagonal_block,
                          hook_multiplicity, ladder_generator, mixture_entropy, rotation_angle,
                          wigner_block)
from catkey.states import rho_pq, z_conj

from conftest import random_real_state


def _blocks(m):
    return [(b.two_j, b.multiplicity, b.dim) for b in block_structure(m).blocks]


def test_block_structure_small():
    assert _blocks(1) == [(1, 1, 2)]
    assert sorted(_blocks(4)) == [(0, 2, 1), (2, 3, 3), (4, 1, 5)]


def test_block_structure_completeness_all_m():
    for m in range(1, MAX_BLOCKLENGTH + 1):
        assert block_structure(m).total_dimension() == 2 ** m


def test_block_structure_rejects_bad_m():
    for bad in (0, MAX_BLOCKLENGTH + 1, 2.5):
        with pytest.raises(ValueError):
            block_structure(bad)
    with pytest.raises(ValueError):
        hook_multiplicity(4, 3)


def test_rotation_angle_diagonal_and_reflection():
    assert rotation_angle(np.diag([0.7, 0.3])) == 0.0
    assert rotation_angle(np.eye(2) / 2) == 0.0
    rho = rho_pq(0.1, 0.05)
    assert rotation_angle(z_conj(rho)) == pytest.approx(-rotation_angle(rho), abs=1e-14)


def test_rotation_angle_matches_eigenvectors():
    rho = rho_pq(0.1, 0.05)
    theta = rotation_angle(rho)
    r = wigner_block(1, theta)
    vals, _ = eigh(rho)
    np.testing.assert_allclose(r.T @ rho @ r, np.diag(vals), atol=1e-10)


def test_rotation_angle_rejects_complex():
    with pytest.raises(ValueError):
        rotation_angle(np.array([[0.5, 0.1j], [-0.1j, 0.5]]))


def test_wigner_block_identity_and_spin_half():
    np.testing.assert_allclose(wigner_block(6, 0.0), np.eye(7), atol=1e-14)
    th = 0.37
    c, s = math.cos(th / 2), math.sin(th / 2)
    np.testing.assert_allclose(wigner_block(1, th), [[c, s], [-s, c]], atol=1e-14)


def test_wigner_block_matches_generator_exponential():
    for two_j in (1, 2, 5, 10):
        np.testing.assert_allclose(wigner_block(two_j, 0.8),
                                   expm(-0.8 * ladder_generator(two_j)), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(two_j=st.integers(0, 60), t1=st.floats(-3, 3), t2=st.floats(-3, 3))
def test_wigner_group_property(two_j, t1, t2):
    lhs = wigner_block(two_j, t1) @ wigner_block(two_j, t2)
    np.testing.assert_allclose(lhs, wigner_block(two_j, t1 + t2), atol=1e-9)


@pytest.mark.parametrize("two_j", [1, 50, 301, 800])
def test_wigner_orthogonality(two_j):
    d = wigner_block(two_j, 1.1)
    assert np.max(np.abs(d.T @ d - np.eye(two_j + 1))) <= 1e-10


def test_diagonal_block_examples():
    np.testing.assert_allclose(diagonal_block(1, 0.7, 0.3, 1), np.diag([0.7, 0.3]))
    a, b = 0.8, 0.2
    np.testing.assert_allclose(diagonal_block(2, a, b, 2), np.diag([a * a, a * b, b * b]))
    np.testing.assert_allclose(diagonal_block(0, a, b, 2), [[a * b]])


@pytest.mark.parametrize("m", [1, 4, 9, 30])
def test_block_traces_reassemble(m):
    lam1, lam2 = 0.65, 0.3
    total = sum(b.multiplicity * np.trace(diagonal_block(b.two_j, lam1, lam2, m))
                for b in block_structure(m).blocks)
    assert total == pytest.approx((lam1 + lam2) ** m, rel=1e-10)


@settings(max_examples=25, deadline=None)
@given(two_j=st.integers(0, 40), theta=st.floats(-3, 3), lam=st.floats(0.5, 1.0))
def test_z_conjugation_consistency(two_j, theta, lam):
    core = diagonal_block(two_j, lam, 1 - lam, two_j)
    d = wigner_block(two_j, theta)
    block = d @ core @ d.T
    sign = np.diag((-1.0) ** np.arange(two_j + 1))
    dm = wigner_block(two_j, -theta)
    np.testing.assert_allclose(sign @ block @ sign, dm @ core @ dm.T, atol=1e-10)


def test_mixture_entropy_single_term():
    rho = rho_pq(0.1, 0.2)
    for m in (1, 5, 40):
        assert mixture_entropy([(1.0, rho)], m) == pytest.approx(m * von_neumann_entropy(rho),
                                                                 abs=1e-9)


def test_mixture_entropy_identical_terms():
    rho = rho_pq(0.2, 0.5)
    for m in (3, 20):
        val = mixture_entropy([(0.5, rho), (0.5, z_conj(rho))], m)
        assert val == pytest.approx(m * binary_entropy(0.2), abs=1e-9)


def test_mixture_entropy_matches_dense(rng):
    worst = 0.0
    for m in range(1, 9):
        for _ in range(3):
            w = rng.uniform()
            fam = [(w, random_real_state(rng)), (1 - w, random_real_state(rng))]
            worst = max(worst, abs(mixture_entropy(fam, m) - dense_mixture_entropy(fam, m)))
    assert worst <= 1e-9


def test_mixture_entropy_methods_agree(rng):
    fam = [(0.3, random_real_state(rng)), (0.7, random_real_state(rng))]
    for m in (2, 7, 25):
        a = mixture_entropy(fam, m, method="dense")
        b = mixture_entropy(fam, m, method="lowrank")
        assert a == pytest.approx(b, abs=1e-9)


def test_mixture_entropy_rejects_complex():
    with pytest.raises(ValueError):
        mixture_entropy([(1.0, np.array([[0.5, 0.1j], [-0.1j, 0.5]]))], 2)


@pytest.mark.parametrize("n", [1, 2, 5, 8])
def test_reflected_powers_against_dense(n):
    rho = rho_pq(0.13, 0.21)
    rp = ReflectedPowers(rho)
    for t in (0.5, 0.8, 1.0):
        dense = dense_mixture_entropy([(t, rho), (1 - t, z_conj(rho))], n) - n * von_neumann_entropy(rho)
        assert rp.excess(n, t) == pytest.approx(dense, abs=1e-10)
        assert rp.deficit(n, t) == pytest.approx(binary_entropy(t) - dense, abs=1e-10)


def test_reflected_powers_deficit_nonnegative():
    rp = ReflectedPowers(rho_pq(0.12, 0.3))
    vals = rp.deficit(200, np.linspace(0, 1, 11))
    assert np.all(vals >= 0)
    assert vals[0] == 0.0 and vals[-1] == 0.0
