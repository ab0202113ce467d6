"""Twofold iterated preprocessing for BB84.

Alice adds noise q to m2 blocks of m1 bits, keeps the first bit of each
block after the inner cat-code syndrome is announced, adds noise Q to those
m2 bits and runs the cat code once more on them.
"""

import itertools
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy.special import gammaln

from catkey.bb84 import check_blocklength, check_error_rate, check_noise, effective_error, syndrome_table
from catkey.entropy import binary_entropy, spectrum_entropy
from catkey.schur import mixture_entropy
from catkey.states import rho_pq, z_conj

MAX_QUBITS = 13
CLASS_BUDGET = 2_000_000


@dataclass(frozen=True)
class IteratedParams:
    m1: int
    m2: int
    q: float
    Q: float

    def __post_init__(self):
        check_blocklength(self.m1)
        check_blocklength(self.m2)
        check_noise(self.q)
        check_noise(self.Q)

    @property
    def q_tot(self):
        """Total flip probability of a key bit, q(1-Q) + (1-q)Q."""
        return self.q * (1 - self.Q) + (1 - self.q) * self.Q

    @property
    def size(self):
        return self.m1 * self.m2


@dataclass(frozen=True)
class IteratedSyndromeDistribution:
    """Syndrome classes keyed by (S, weight counts of agreeing blocks, of flipped blocks).

    ``same[c, w]`` counts blocks whose outer bit agrees with block 1 and
    whose inner syndrome has weight w; ``diff`` does the same for the S
    disagreeing blocks. ``log_mult`` is the log number of full syndrome
    vectors in a class and ``log_p`` the log-probability of one of them,
    per logical error L_x in {0, 1}.
    """

    m1: int
    m2: int
    S: np.ndarray
    same: np.ndarray
    diff: np.ndarray
    log_mult: np.ndarray
    log_p: np.ndarray

    def mass(self):
        """Class masses, shape (2, classes)."""
        return np.exp(self.log_p + self.log_mult[None, :])

    def total(self):
        return float(self.mass().sum())


def _log_multinomial(counts):
    counts = np.asarray(counts)
    return gammaln(counts.sum() + 1) - np.sum(gammaln(counts + 1))


def _multisets(n, k):
    """All count vectors of length k summing to n."""
    for combo in itertools.combinations_with_replacement(range(k), n):
        yield np.bincount(np.array(combo, dtype=int), minlength=k)


def class_count(m1, m2):
    """Number of compressed syndrome classes."""
    def multisets(n):
        return math.comb(n + m1 - 1, m1 - 1)
    return sum(multisets(m2 - s) * multisets(s) for s in range(m2))


def _block_masses(m1, p_tilde, Q):
    """Per-vector g[c, s]: outer bit c after the Q flip, inner syndrome weight s."""
    tab = syndrome_table(m1, p_tilde).prob()
    return np.vstack([(1 - Q) * tab[0] + Q * tab[1], (1 - Q) * tab[1] + Q * tab[0]])


def iterated_syndrome_distribution(params, p, budget=CLASS_BUDGET):
    """Compose inner syndrome tables, second-level flips and the outer code."""
    check_error_rate(p, 0.5)
    m1, m2 = params.m1, params.m2
    n_classes = class_count(m1, m2)
    if n_classes > budget:
        raise ValueError(f"{n_classes} syndrome classes exceed the budget of {budget}")
    g = _block_masses(m1, effective_error(p, params.q), params.Q)
    with np.errstate(divide="ignore"):
        lg = np.log(g)
    s_idx = np.arange(m1)
    log_binom_inner = gammaln(m1) - gammaln(s_idx + 1) - gammaln(m1 - s_idx)
    rows = []
    for S in range(m2):
        lc_outer = gammaln(m2) - gammaln(S + 1) - gammaln(m2 - S)
        for same in _multisets(m2 - S, m1):
            for diff in _multisets(S, m1):
                counts = same + diff
                lm = (lc_outer + _log_multinomial(same) + _log_multinomial(diff)
                      + float(counts @ log_binom_inner))
                with np.errstate(invalid="ignore"):
                    l0 = float(np.sum(np.where(same > 0, same * lg[0], 0.0))
                               + np.sum(np.where(diff > 0, diff * lg[1], 0.0)))
                    l1 = float(np.sum(np.where(same > 0, same * lg[1], 0.0))
                               + np.sum(np.where(diff > 0, diff * lg[0], 0.0)))
                rows.append((S, same, diff, lm, l0, l1))
    return IteratedSyndromeDistribution(
        m1, m2,
        np.array([r[0] for r in rows]),
        np.array([r[1] for r in rows]),
        np.array([r[2] for r in rows]),
        np.array([r[3] for r in rows]),
        np.array([[r[4] for r in rows], [r[5] for r in rows]]),
    )


def product_form_probability(m1, p_tilde, Q, weights, S, lx=0):
    """Probability of one syndrome vector written directly as a product over blocks.

    ``weights`` lists the inner syndrome weights with the m2 - S agreeing
    blocks first. For L_x = 1 the roles of the two groups are exchanged.
    """
    a, b = 1 - p_tilde, p_tilde
    m2 = len(weights)
    out = 1.0
    for i, s in enumerate(weights):
        agree = (i < m2 - S) != bool(lx)
        if agree:
            out *= a ** (m1 - s) * b ** s * (1 - Q) + a ** s * b ** (m1 - s) * Q
        else:
            out *= a ** s * b ** (m1 - s) * (1 - Q) + a ** (m1 - s) * b ** s * Q
    return out


def verify_product_form(dist, p_tilde, Q):
    """Largest deviation between stored class probabilities and the product form."""
    worst = 0.0
    for i in range(len(dist.S)):
        weights = (np.repeat(np.arange(dist.m1), dist.same[i]).tolist()
                   + np.repeat(np.arange(dist.m1), dist.diff[i]).tolist())
        for lx in (0, 1):
            direct = product_form_probability(dist.m1, p_tilde, Q, weights, int(dist.S[i]), lx)
            worst = max(worst, abs(direct - math.exp(dist.log_p[lx, i])))
    return worst


def xy_deficit_iterated(params, p, budget=CLASS_BUDGET):
    """1 - I(X:Y) for the iterated code."""
    dist = iterated_syndrome_distribution(params, p, budget)
    l0, l1 = dist.log_p
    both = np.logaddexp(l0, l1)
    with np.errstate(invalid="ignore"):
        minority = np.exp(np.minimum(l0, l1) - both)
    minority = np.where(np.isnan(minority), 0.0, minority)
    return float(np.sum(np.exp(both + dist.log_mult) * binary_entropy(minority)))


def mutual_info_xy_iterated(params, p, budget=CLASS_BUDGET):
    return 1.0 - xy_deficit_iterated(params, p, budget)


def _kron_power(a, n):
    return reduce(np.kron, [a] * n)


def _parity(nbits):
    idx = np.arange(2 ** nbits)
    par = np.zeros(idx.size, dtype=int)
    for b in range(nbits):
        par ^= (idx >> b) & 1
    return par


def inner_state(m1, p, q, Q):
    """A = (1-Q) rho^(x)m1 + Q (Z rho Z)^(x)m1 as a dense matrix."""
    rho = rho_pq(p, q)
    return (1 - Q) * _kron_power(rho, m1) + Q * _kron_power(z_conj(rho), m1)


def mutual_info_xe_iterated(params, p):
    """S(A^m2 / 2 + B^m2 / 2) - m2 S(A), with B the Z-conjugate of A.

    Z on every qubit is diagonal with the parity as sign, so the even mixture
    only keeps the equal-parity entries of A^m2; its spectrum is the union of
    the even-even and odd-odd submatrix spectra.
    """
    check_error_rate(p, 0.5)
    m1, m2 = params.m1, params.m2
    if params.size > MAX_QUBITS:
        raise ValueError(f"{params.size} qubits exceed the dense cap of {MAX_QUBITS}")
    rho = rho_pq(p, params.q)
    s_inner = mixture_entropy([(1 - params.Q, rho), (params.Q, z_conj(rho))], m1)
    x = _kron_power(inner_state(m1, p, params.q, params.Q), m2)
    par = _parity(params.size)
    spectra = []
    for bit in (0, 1):
        sel = np.flatnonzero(par == bit)
        sub = x[np.ix_(sel, sel)]
        spectra.append(np.linalg.eigvalsh(0.5 * (sub + sub.T)))
    return spectrum_entropy(np.concatenate(spectra)) - m2 * s_inner


def rate_parts_iterated(params, p):
    from catkey.bb84 import RateParts

    d_xy = xy_deficit_iterated(params, p)
    i_xe = mutual_info_xe_iterated(params, p)
    i_xy = 1.0 - d_xy
    return RateParts((i_xy - i_xe) / params.size, i_xy, i_xe, params.size)


def rate_iterated(params, p):
    """Key rate in bits per signal; unclamped."""
    return rate_parts_iterated(params, p).rate


def rate_iterated_opt(m1, m2, p, **kwargs):
    """Maximize over (q, Q) in [0, 1/2]^2; the result's argmax is (q*, Q*)."""
    from catkey.optimize import maximize_2d

    IteratedParams(m1, m2, 0.0, 0.0)
    if m1 * m2 > MAX_QUBITS:
        raise ValueError(f"{m1 * m2} qubits exceed the dense cap of {MAX_QUBITS}")
    return maximize_2d(lambda q, Q: rate_iterated(IteratedParams(m1, m2, q, Q), p), **kwargs)
