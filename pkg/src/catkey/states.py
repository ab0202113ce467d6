"""Real single-qubit states that appear in the Eve marginals."""

import math

import numpy as np

from catkey.entropy import binary_entropy

Z = np.diag([1.0, -1.0])


def projector(vec):
    v = np.asarray(vec, dtype=float)
    return np.outer(v, v)


def z_conj(rho):
    """Return Z rho Z."""
    return Z @ rho @ Z


def phase_mixture(a0, a1, q):
    """(1-q)|phi+><phi+| + q|phi-><phi-| with |phi+-> = a0|0> +- a1|1>."""
    return np.array([[a0 * a0, (1 - 2 * q) * a0 * a1],
                     [(1 - 2 * q) * a0 * a1, a1 * a1]])


def rho_pq(p, q):
    """Eve's per-signal phase register in BB84 after noisy preprocessing."""
    return phase_mixture(math.sqrt(1 - p), math.sqrt(p), q)


def sigma_state(q):
    """(1-q)[+] + q[-]."""
    return phase_mixture(math.sqrt(0.5), math.sqrt(0.5), q)


def gamma_state(p_prime, q):
    """(1-q)[phi'+] + q[phi'-] with |phi'+-> = sqrt(p')|0> +- sqrt(1-p')|1>."""
    return phase_mixture(math.sqrt(p_prime), math.sqrt(1 - p_prime), q)


def qubit_eigenvalues(rho):
    """Eigenvalues (larger, smaller) of a real symmetric 2x2 state.

    The smaller one is formed as det/larger to avoid cancellation.
    """
    a, b, d = float(rho[0, 0]), float(rho[0, 1]), float(rho[1, 1])
    mean = 0.5 * (a + d)
    rad = math.hypot(0.5 * (a - d), b)
    lam1 = mean + rad
    if lam1 <= 0:
        return 0.0, 0.0
    lam2 = max((a * d - b * b) / lam1, 0.0)
    return lam1, lam2


def rho_pq_entropy(p, q):
    """Closed form S(rho_pq) = h((1 + sqrt(1 - 16 p(1-p) q(1-q))) / 2)."""
    disc = max(0.0, 1 - 16 * p * (1 - p) * q * (1 - q))
    return binary_entropy(0.5 * (1 + math.sqrt(disc)))
