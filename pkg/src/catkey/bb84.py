"""BB84 with local randomization followed by a size-m cat code.

Rates are assembled from two deficits, ``1 - I(X:Y)`` and ``1 - I(X:E)``,
rather than from the mutual informations themselves. Near the threshold of
a long code both informations sit within ~1e-9 of one bit, and subtracting
them directly would lose most of the significant digits.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, gammaln, xlogy

from catkey.entropy import binary_entropy
from catkey.schur import MAX_BLOCKLENGTH, ReflectedPowers
from catkey.states import rho_pq, rho_pq_entropy

_SUM_TOL = 1e-12


@dataclass(frozen=True)
class BitPhaseDistribution:
    """Joint probabilities p_uv of a bit flip u and a phase flip v on one signal."""

    p00: float
    p10: float
    p11: float
    p01: float

    def __post_init__(self):
        vals = (self.p00, self.p10, self.p11, self.p01)
        if min(vals) < 0:
            raise ValueError(f"negative probability in {vals}")
        if abs(sum(vals) - 1.0) > _SUM_TOL:
            raise ValueError(f"probabilities sum to {sum(vals)!r}")

    @classmethod
    def bb84(cls, p, t=None):
        """The family {1-2p+t, p-t, t, p-t}; t defaults to p^2 (independent errors)."""
        check_error_rate(p, 0.5)
        t = p * p if t is None else t
        if not 0 <= t <= p:
            raise ValueError(f"t must lie in [0, p], got {t!r}")
        return cls(1 - 2 * p + t, p - t, t, p - t)

    def joint(self):
        """2x2 array indexed [u, v]."""
        return np.array([[self.p00, self.p01], [self.p10, self.p11]])

    @property
    def bit_error(self):
        return self.p10 + self.p11

    def phase_given_bit(self, u):
        """Conditional distribution (p_{v=0|u}, p_{v=1|u}); uniform if p_u = 0."""
        row = self.joint()[u]
        tot = row.sum()
        if tot == 0:
            return np.array([0.5, 0.5])
        return row / tot


@dataclass(frozen=True)
class NoiseParams:
    """Blocklength m, bit-error rate p and added-noise rate q."""

    m: int
    p: float
    q: float

    def __post_init__(self):
        check_blocklength(self.m)
        check_error_rate(self.p, 0.5)
        check_noise(self.q)

    @property
    def p_tilde(self):
        return effective_error(self.p, self.q)


def check_blocklength(m):
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 1:
        raise ValueError(f"blocklength must be a positive integer, got {m!r}")
    if m > MAX_BLOCKLENGTH:
        raise ValueError(f"blocklength above {MAX_BLOCKLENGTH}")


def check_error_rate(p, upper):
    if not 0.0 <= p <= upper:
        raise ValueError(f"bit-error rate {p!r} outside [0, {upper}]")


def check_noise(q):
    if not 0.0 <= q <= 0.5:
        raise ValueError(f"noise rate {q!r} outside [0, 0.5]")


def effective_error(p, q):
    """Bit error seen after Alice flips each bit with probability q."""
    return p * (1 - q) + (1 - p) * q


@dataclass(frozen=True)
class SyndromeWeightTable:
    """Per-vector masses P~(l_x, s) of the cat-code syndrome, in log space.

    ``log_prob[l, s]`` is the log-probability of one particular syndrome
    vector of weight ``s`` together with logical error ``l``; ``log_mult[s]``
    is ln C(m-1, s).
    """

    m: int
    p_tilde: float
    log_prob: np.ndarray
    log_mult: np.ndarray

    def prob(self):
        return np.exp(self.log_prob)

    def mass(self):
        """Total mass C(m-1, s) P~(l, s) of every (l, s) class."""
        return np.exp(self.log_prob + self.log_mult[None, :])

    def total(self):
        return float(self.mass().sum())

    def conditional(self):
        """P~(l_x = 1 | s) per syndrome weight."""
        return expit(self.log_prob[1] - self.log_prob[0])


def syndrome_table(m, p_tilde):
    check_blocklength(m)
    if not 0.0 <= p_tilde <= 0.5:
        raise ValueError(f"effective error {p_tilde!r} outside [0, 0.5]")
    s = np.arange(m)
    log_mult = gammaln(m) - gammaln(s + 1) - gammaln(m - s)
    l0 = xlogy(s, p_tilde) + xlogy(m - s, 1 - p_tilde)
    l1 = xlogy(m - s, p_tilde) + xlogy(s, 1 - p_tilde)
    return SyndromeWeightTable(m, float(p_tilde), np.vstack([l0, l1]), log_mult)


def xy_deficit(m, p_tilde):
    """1 - I(X:Y) = sum_s C(m-1, s) P~(s) h(P~(l_x | s))."""
    tab = syndrome_table(m, p_tilde)
    l0, l1 = tab.log_prob
    with np.errstate(invalid="ignore"):
        gap = np.abs(l0 - l1)
    gap = np.where(np.isnan(gap), np.inf, gap)
    log_s = np.logaddexp(l0, l1) + tab.log_mult
    minority = expit(-gap)
    return float(np.sum(np.exp(log_s) * binary_entropy(minority)))


def mutual_info_xy(m, p_tilde):
    """I(X:Y) in bits per block after syndrome exchange."""
    return 1.0 - xy_deficit(m, p_tilde)


def xe_deficit_bb84(m, p, q):
    """1 - I(X:E) for independent bit and phase errors."""
    check_blocklength(m)
    check_error_rate(p, 0.5)
    check_noise(q)
    return ReflectedPowers(rho_pq(p, q)).deficit(m, 0.5)


def mutual_info_xe_bb84(m, p, q):
    """S(rho^m / 2 + (Z rho Z)^m / 2) - m S(rho) with rho = rho_pq."""
    return 1.0 - xe_deficit_bb84(m, p, q)


@dataclass(frozen=True)
class RateParts:
    """A rate with the two mutual informations it was built from (per block)."""

    rate: float
    i_xy: float
    i_xe: float
    blocksize: int


def rate_parts_bb84(m, p, q):
    check_error_rate(p, 0.5)
    check_noise(q)
    d_xy = xy_deficit(m, effective_error(p, q))
    d_xe = xe_deficit_bb84(m, p, q)
    return RateParts((d_xe - d_xy) / m, 1.0 - d_xy, 1.0 - d_xe, m)


def rate_bb84(m, p, q):
    """Key rate in bits per signal; unclamped so its sign is meaningful."""
    return rate_parts_bb84(m, p, q).rate


def rate_bb84_closed_form(p, q=0.0):
    """Single-signal rate 1 - h(p~) - h(p) + S(rho_pq)."""
    return 1 - binary_entropy(effective_error(p, q)) - binary_entropy(p) + rho_pq_entropy(p, q)


def rate_bb84_opt(m, p, **kwargs):
    """Maximize rate_bb84 over q in [0, 1/2]; returns an OptimizationResult."""
    from catkey.optimize import maximize_over_noise

    check_blocklength(m)
    check_error_rate(p, 0.5)
    return maximize_over_noise(lambda q: rate_bb84(m, p, q), 0.0, 0.5, **kwargs)
