"""6-state protocol with local randomization and a size-m cat code.

Bit and phase errors are correlated here: a signal without a bit error has a
phase error with probability p' = p / (2(1-p)), while a bit error leaves the
phase uniformly random. Conditioned on the number u of bit errors, Eve's
block is sigma^u (x) gamma^(m-u) and the X-label enters as a global Z.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, gammaln, xlogy

from catkey.bb84 import (RateParts, check_blocklength, check_noise, effective_error,
                         xy_deficit)
from catkey.entropy import binary_entropy
from catkey.schur import ReflectedPowers
from catkey.states import gamma_state, sigma_state

P_LIMIT = 2.0 / 3.0
# u-terms with binomial weight below this are dropped when m > TRUNCATE_ABOVE.
TRUNCATE_WEIGHT = 1e-15
TRUNCATE_ABOVE = 200
# k-terms whose weighted contribution is bounded by this are dropped.
TERM_TOL = 1e-20


def check_sixstate_error(p):
    if not 0.0 <= p < P_LIMIT:
        raise ValueError(f"bit-error rate {p!r} outside [0, 2/3)")


@dataclass(frozen=True)
class SixStateChannel:
    """The single 6-state channel {1 - 3p/2, p/2, p/2, p/2}."""

    p: float

    def __post_init__(self):
        check_sixstate_error(self.p)

    @property
    def p_prime(self):
        return self.p / (2 * (1 - self.p))

    def distribution(self):
        from catkey.bb84 import BitPhaseDistribution

        p = self.p
        return BitPhaseDistribution(1 - 1.5 * p, 0.5 * p, 0.5 * p, 0.5 * p)

    def phase_given_bit(self, u):
        if u:
            return np.array([0.5, 0.5])
        pp = self.p_prime
        return np.array([1 - pp, pp])


@dataclass(frozen=True)
class SixStateEveStates:
    """sigma = (1-q)[+] + q[-] and gamma = (1-q)[phi'+] + q[phi'-]."""

    p: float
    q: float

    @property
    def sigma(self):
        return sigma_state(self.q)

    @property
    def gamma(self):
        return gamma_state(SixStateChannel(self.p).p_prime, self.q)


@dataclass(frozen=True)
class EveDeficit:
    """1 - I(X:E) together with a bound on the mass dropped by truncation."""

    value: float
    truncation_error: float


def _u_weights(m, p):
    u = np.arange(m + 1)
    logw = gammaln(m + 1) - gammaln(u + 1) - gammaln(m - u + 1) + xlogy(u, p) + xlogy(m - u, 1 - p)
    return u, np.exp(logw)


def _label_weights(u, q):
    """Weights C(u,k)(a_k + b_k) and posteriors t_k = a_k / (a_k + b_k), k = 0..u.

    a_k = (1-q)^k q^(u-k) / 2 and b_k = q^k (1-q)^(u-k) / 2.
    """
    k = np.arange(u + 1)
    la = xlogy(k, 1 - q) + xlogy(u - k, q)
    lb = xlogy(k, q) + xlogy(u - k, 1 - q)
    lc = gammaln(u + 1) - gammaln(k + 1) - gammaln(u - k + 1)
    both = np.logaddexp(la, lb)
    weight = np.exp(lc + both - math.log(2.0))
    with np.errstate(invalid="ignore"):
        t = expit(la - lb)
    # both exponents -inf only when the weight itself vanishes
    t = np.where(np.isnan(t), 0.5, t)
    return weight, t


def xe_deficit_sixstate(m, p, q):
    """1 - I(X:E) as a sum of per-label conditional entropies.

    For u bit errors and k agreeing sigma factors the Eve state is the
    mixture a_k gamma^n + b_k (Z gamma Z)^n with n = m - u, whose label
    uncertainty is ``ReflectedPowers.deficit(n, t_k)``.
    """
    check_blocklength(m)
    check_sixstate_error(p)
    check_noise(q)
    us, bw = _u_weights(m, p)
    dropped = 0.0
    if m > TRUNCATE_ABOVE:
        keep = bw >= TRUNCATE_WEIGHT
        dropped = float(bw[~keep].sum())
        us, bw = us[keep], bw[keep]
    gamma = ReflectedPowers(SixStateEveStates(p, q).gamma)
    total = 0.0
    for u, w_u in zip(us.tolist(), bw.tolist()):
        if w_u == 0.0:
            continue
        weight, t = _label_weights(u, q)
        # the label can be at most one bit uncertain, so h(t) bounds each term
        live = weight * binary_entropy(t) > TERM_TOL
        if not np.any(live):
            continue
        n = m - u
        if n == 0:
            inner = binary_entropy(t[live])
        else:
            inner = gamma.deficit(n, t[live])
        total += w_u * float(np.sum(weight[live] * inner))
    return EveDeficit(total, dropped)


def mutual_info_xe_sixstate(m, p, q):
    """I(X:E) in bits per block for the 6-state channel."""
    return 1.0 - xe_deficit_sixstate(m, p, q).value


def rate_parts_sixstate(m, p, q):
    d_xy = xy_deficit(m, effective_error(p, q))
    d_xe = xe_deficit_sixstate(m, p, q).value
    return RateParts((d_xe - d_xy) / m, 1.0 - d_xy, 1.0 - d_xe, m)


def rate_sixstate(m, p, q):
    """Key rate in bits per signal; unclamped."""
    return rate_parts_sixstate(m, p, q).rate


def rate_sixstate_single(p, q):
    """Closed form for m = 1.

    1 - h(p~) - sum_u p_u [h(p_{v|u}) - h((1 + sqrt(1 - 16 p_{1|u}(1-p_{1|u}) q(1-q))) / 2)].
    """
    ch = SixStateChannel(p)
    out = 1 - binary_entropy(effective_error(p, q))
    for u, pu in ((0, 1 - p), (1, p)):
        cond = ch.phase_given_bit(u)[1]
        disc = max(0.0, 1 - 16 * cond * (1 - cond) * q * (1 - q))
        out -= pu * (binary_entropy(cond) - binary_entropy(0.5 * (1 + math.sqrt(disc))))
    return out


def lo_joint_table(m, p):
    """Per-vector P(l_x, l_z, s) as an array [l_x, l_z, s], s = 0..m-1.

    Tiny negatives from the (1-2p) cancellation are checked and clipped.
    """
    check_blocklength(m)
    check_sixstate_error(p)
    s = np.arange(m)
    out = np.empty((2, 2, m))
    for lx in (0, 1):
        e1 = lx * (m - 2 * s) + s
        e0 = (1 - lx) * (m - 2 * s) + s
        base = p ** e1 * (1 - p) ** e0
        coherent = np.where(e1 == 0, (1 - 2 * p) ** e0, 0.0)
        for lz in (0, 1):
            out[lx, lz] = 0.5 * (base + (-1) ** lz * coherent)
    if out.min() < -1e-12:
        raise ArithmeticError(f"negative probability {out.min():.3e} in syndrome table")
    return np.maximum(out, 0.0)


def lo_rate(m, p):
    """Rate without added noise: (1/m)[1 - sum_s P(s) H(P(l_x, l_z | s))]."""
    tab = lo_joint_table(m, p)
    s = np.arange(m)
    mult = np.exp(gammaln(m) - gammaln(s + 1) - gammaln(m - s))
    flat = tab.reshape(4, m)
    ps = flat.sum(axis=0)
    safe_ps = np.where(ps > 0, ps, 1.0)
    cond = flat / safe_ps
    h = -np.sum(xlogy(cond, cond), axis=0) / math.log(2.0)
    return (1.0 - float(np.sum(mult * ps * h))) / m


def rate_sixstate_opt(m, p, **kwargs):
    """Maximize rate_sixstate over q in [0, 1/2]; returns an OptimizationResult."""
    from catkey.optimize import maximize_over_noise

    check_blocklength(m)
    check_sixstate_error(p)
    return maximize_over_noise(lambda q: rate_sixstate(m, p, q), 0.0, 0.5, **kwargs)
