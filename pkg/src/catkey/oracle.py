"""Brute-force reference implementations for small blocklengths.

Everything here is built from explicit bit strings and dense matrices, and
none of it calls the closed-form rate code, so agreement with the fast paths
is an independent check.
"""

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy.linalg import block_diag

from catkey.entropy import binary_entropy, von_neumann_entropy

MAX_DENSE_QUBITS = 12
MAX_XY_BITS = 6
MAX_EVE_BITS = 4
MAX_ITERATED_SIDE = 3


@dataclass(frozen=True)
class CatCodeBasis:
    """Dual bases of the size-m cat code.

    xi_i = e_1 + e_(i+1) and eta_i = e_(i+1) for i < m; xi_m = e_1 and
    eta_m is all ones. Rows are the vectors.
    """

    m: int

    @property
    def xi(self):
        out = np.zeros((self.m, self.m), dtype=np.uint8)
        out[:, 0] = 1
        idx = np.arange(self.m - 1)
        out[idx, idx + 1] = 1
        return out

    @property
    def eta(self):
        out = np.zeros((self.m, self.m), dtype=np.uint8)
        idx = np.arange(self.m - 1)
        out[idx, idx + 1] = 1
        out[self.m - 1, :] = 1
        return out

    def duality_defect(self):
        """Number of (i, j) with xi_i . eta_j != delta_ij over GF(2)."""
        gram = (self.xi.astype(int) @ self.eta.T.astype(int)) % 2
        return int(np.count_nonzero(gram != np.eye(self.m, dtype=int)))

    def decompose(self, vecs):
        """Coordinates of bit vectors (rows) in the eta basis: c_i = xi_i . v."""
        return (np.asarray(vecs, dtype=int) @ self.xi.T.astype(int)) % 2


def _bits(n):
    """All n-bit strings as rows, most significant bit first."""
    idx = np.arange(2 ** n)
    return ((idx[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1).astype(np.uint8)


def _kron_all(mats):
    return reduce(np.kron, mats)


def dense_mixture_entropy(family, m):
    """S(sum_i w_i rho_i^(x)m) from the explicit 2^m-dimensional operator."""
    if m < 1 or m > MAX_DENSE_QUBITS:
        raise ValueError(f"dense oracle limited to 1 <= m <= {MAX_DENSE_QUBITS}")
    dim = 2 ** m
    real = all(not np.iscomplexobj(rho) for _, rho in family)
    total = np.zeros((dim, dim), dtype=float if real else complex)
    for w, rho in family:
        total += w * _kron_all([np.asarray(rho)] * m)
    return von_neumann_entropy(total)


def _conditional_entropy_sum(keys, probs):
    """sum over syndromes of P(s) h(P(l | s)) from (key, l) -> mass tables."""
    return sum(binary_entropy(probs[k][1] / (probs[k][0] + probs[k][1])) * (probs[k][0] + probs[k][1])
               for k in keys if probs[k][0] + probs[k][1] > 0)


def enumerate_xy(m, p_tilde):
    """I(X:Y) by summing over every error pattern of the block."""
    if m < 1 or m > MAX_XY_BITS:
        raise ValueError(f"enumeration limited to 1 <= m <= {MAX_XY_BITS}")
    code = CatCodeBasis(m)
    errs = _bits(m)
    weight = errs.sum(axis=1)
    prob = p_tilde ** weight * (1 - p_tilde) ** (m - weight)
    coords = code.decompose(errs)
    table = {}
    for c, pr in zip(coords, prob):
        key = tuple(c[:-1])
        table.setdefault(key, [0.0, 0.0])[int(c[-1])] += pr
    return 1.0 - _conditional_entropy_sum(table.keys(), table)


def _as_joint(dist):
    if hasattr(dist, "distribution"):
        dist = dist.distribution()
    return dist.joint()


def _dephase(state, q, nbits):
    """sum_f q_f Z^f state Z^f over all flip patterns f."""
    out = np.zeros_like(state)
    v = _bits(nbits)
    for f in _bits(nbits):
        qf = q ** int(f.sum()) * (1 - q) ** int(nbits - f.sum())
        sign = (-1.0) ** ((v.astype(int) @ f.astype(int)) % 2)
        out += qf * (sign[:, None] * state * sign[None, :])
    return out


def _z_string(bits):
    v = _bits(len(bits))
    return (-1.0) ** ((v.astype(int) @ np.asarray(bits, dtype=int)) % 2)


def eve_states(m, dist, q):
    """Eve's states rho^(x)_{E1 E2} for x = 0, 1 as block-diagonal matrices.

    The classical register E1 holds the bit-error pattern u; E2 holds the
    phase register prepared in |Psi_u> = (x)_i sum_v sqrt(p_{v|u_i}) |v>,
    dephased by Alice's flips and conjugated by Z^(eta_m) when x = 1.
    """
    if m < 1 or m > MAX_EVE_BITS:
        raise ValueError(f"Eve-state oracle limited to 1 <= m <= {MAX_EVE_BITS}")
    joint = _as_joint(dist)
    marg = joint.sum(axis=1)
    key_flip = _z_string(CatCodeBasis(m).eta[-1])
    blocks = ([], [])
    for u in _bits(m):
        pu = float(np.prod(marg[u]))
        amps = []
        for ui in u:
            row = joint[ui]
            cond = row / row.sum() if row.sum() > 0 else np.array([0.5, 0.5])
            amps.append(np.sqrt(cond))
        psi = _kron_all(amps)
        rho_u = pu * _dephase(np.outer(psi, psi), q, m)
        blocks[0].append(rho_u)
        blocks[1].append(key_flip[:, None] * rho_u * key_flip[None, :])
    return block_diag(*blocks[0]), block_diag(*blocks[1])


def eve_mutual_info(m, dist, q):
    """I(X:E) = S(mean_x rho^(x)) - mean_x S(rho^(x)) for a uniform key bit."""
    r0, r1 = eve_states(m, dist, q)
    return (von_neumann_entropy(0.5 * (r0 + r1))
            - 0.5 * (von_neumann_entropy(r0) + von_neumann_entropy(r1)))


def independent_error_check(m, p, q, t_grid):
    """max over t of I(X:E)(t) - I(X:E)(p^2) for the BB84 family."""
    from catkey.bb84 import BitPhaseDistribution

    if m > 3:
        raise ValueError("independent-error check limited to m <= 3")
    ref = eve_mutual_info(m, BitPhaseDistribution.bb84(p, p * p), q)
    worst = -math.inf
    for t in t_grid:
        if not 0 <= t <= p:
            raise ValueError(f"t = {t!r} outside [0, p]")
        val = eve_mutual_info(m, BitPhaseDistribution.bb84(p, t), q) - ref
        worst = max(worst, val)
    return worst


def full_rate_check(m, p, q):
    """BB84 rate per signal from the enumerated I(X:Y) and dense I(X:E)."""
    from catkey.bb84 import BitPhaseDistribution

    p_tilde = p * (1 - q) + (1 - p) * q
    i_xy = enumerate_xy(m, p_tilde)
    i_xe = eve_mutual_info(m, BitPhaseDistribution.bb84(p, p * p), q)
    return (i_xy - i_xe) / m


def _iterated_xy(m1, m2, p, q, Q):
    n = m1 * m2
    patterns = _bits(n).astype(np.int64)
    w = patterns.sum(axis=1)
    pu = p ** w * (1 - p) ** (n - w)
    pf = q ** w * (1 - q) ** (n - w)
    # every (u, f) pair: the pattern Bob sees is u xor f
    e_idx = (np.arange(2 ** n)[:, None] ^ np.arange(2 ** n)[None, :]).ravel()
    e_prob = (pu[:, None] * pf[None, :]).ravel()
    e = patterns[e_idx].reshape(-1, m2, m1)
    inner = CatCodeBasis(m1)
    coords = (e @ inner.xi.T.astype(np.int64)) % 2
    inner_syn = coords[:, :, :-1].reshape(len(e), -1)
    key_bits = coords[:, :, -1]
    outer = CatCodeBasis(m2)
    keys, masses = [], []
    for F in _bits(m2).astype(np.int64):
        wf = int(F.sum())
        qF = Q ** wf * (1 - Q) ** (m2 - wf)
        oc = ((key_bits ^ F[None, :]) @ outer.xi.T.astype(np.int64)) % 2
        syn = np.hstack([inner_syn, oc[:, :-1]])
        code = syn @ (1 << np.arange(syn.shape[1], dtype=np.int64))
        keys.append(code * 2 + oc[:, -1])
        masses.append(e_prob * qF)
    keys = np.concatenate(keys)
    masses = np.concatenate(masses)
    table = np.bincount(keys, weights=masses).reshape(-1, 2)
    tot = table.sum(axis=1)
    live = tot > 0
    return 1.0 - float(np.sum(tot[live] * binary_entropy(table[live, 1] / tot[live])))


def _iterated_xe(m1, m2, p, q, Q):
    amp = np.array([math.sqrt(1 - p), math.sqrt(p)])
    psi = _kron_all([amp] * m1)
    inner = _dephase(np.outer(psi, psi), q, m1)
    flip = _z_string(np.ones(m1, dtype=int))
    block = (1 - Q) * inner + Q * (flip[:, None] * inner * flip[None, :])
    r0 = _kron_all([block] * m2)
    allz = _z_string(np.ones(m1 * m2, dtype=int))
    r1 = allz[:, None] * r0 * allz[None, :]
    return (von_neumann_entropy(0.5 * (r0 + r1))
            - 0.5 * (von_neumann_entropy(r0) + von_neumann_entropy(r1)))


def iterated_enumeration_check(m1, m2, p, q, Q):
    """(I(X:Y), I(X:E)) of the iterated code by exhaustive enumeration and dense states."""
    if not (1 <= m1 <= MAX_ITERATED_SIDE and 1 <= m2 <= MAX_ITERATED_SIDE):
        raise ValueError(f"iterated oracle limited to m1, m2 <= {MAX_ITERATED_SIDE}")
    return _iterated_xy(m1, m2, p, q, Q), _iterated_xe(m1, m2, p, q, Q)


@dataclass(frozen=True)
class ValidationResult:
    name: str
    deviation: float
    tolerance: float

    @property
    def passed(self):
        return self.deviation <= self.tolerance


def run_validation_suite(seed=20240517):
    """Compare every fast path with its oracle on seeded random parameters."""
    from catkey.bb84 import BitPhaseDistribution, mutual_info_xe_bb84, mutual_info_xy, rate_bb84
    from catkey.iterated import IteratedParams, mutual_info_xe_iterated, mutual_info_xy_iterated
    from catkey.schur import mixture_entropy
    from catkey.sixstate import SixStateChannel, mutual_info_xe_sixstate

    rng = np.random.default_rng(seed)
    out = []

    def random_state():
        a = rng.uniform(0.0, np.pi)
        lam = rng.uniform(0.5, 1.0)
        c, s = np.cos(a), np.sin(a)
        rot = np.array([[c, -s], [s, c]])
        return rot @ np.diag([lam, 1 - lam]) @ rot.T

    dev = 0.0
    for m in range(1, 9):
        for _ in range(3):
            w = rng.uniform()
            fam = [(w, random_state()), (1 - w, random_state())]
            dev = max(dev, abs(mixture_entropy(fam, m) - dense_mixture_entropy(fam, m)))
    out.append(ValidationResult("schur mixture entropy vs dense", dev, 1e-9))

    dev = max(abs(enumerate_xy(m, pt) - mutual_info_xy(m, pt))
              for m in range(1, MAX_XY_BITS + 1) for pt in rng.uniform(0, 0.5, 4))
    out.append(ValidationResult("I(X:Y) vs enumeration", dev, 1e-12))

    dev_b = dev_s = 0.0
    for m in range(1, MAX_EVE_BITS + 1):
        for _ in range(3):
            p, q = rng.uniform(0, 0.5), rng.uniform(0, 0.5)
            dev_b = max(dev_b, abs(eve_mutual_info(m, BitPhaseDistribution.bb84(p), q)
                                   - mutual_info_xe_bb84(m, p, q)))
            p = rng.uniform(0, 0.6)
            dev_s = max(dev_s, abs(eve_mutual_info(m, SixStateChannel(p), q)
                                   - mutual_info_xe_sixstate(m, p, q)))
    out.append(ValidationResult("BB84 I(X:E) vs dense Eve state", dev_b, 1e-9))
    out.append(ValidationResult("6-state I(X:E) vs dense Eve state", dev_s, 1e-9))

    dev = max(max(independent_error_check(m, 0.1, 0.05, np.linspace(0, 0.1, 21)), 0.0)
              for m in (1, 2, 3))
    out.append(ValidationResult("independent errors maximize I(X:E)", dev, 1e-9))

    dev = max(abs(full_rate_check(3, p, q) - rate_bb84(3, p, q))
              for p, q in ((0.10, 0.05), (0.12, 0.2)))
    out.append(ValidationResult("BB84 rate vs full oracle", dev, 1e-9))

    dev = 0.0
    for m1, m2 in ((2, 2), (3, 2), (2, 3), (3, 3)):
        p, q, Q = rng.uniform(0, 0.2), rng.uniform(0, 0.5), rng.uniform(0, 0.5)
        xy, xe = iterated_enumeration_check(m1, m2, p, q, Q)
        params = IteratedParams(m1, m2, q, Q)
        dev = max(dev, abs(xy - mutual_info_xy_iterated(params, p)),
                  abs(xe - mutual_info_xe_iterated(params, p)))
    out.append(ValidationResult("iterated I(X:Y), I(X:E) vs enumeration", dev, 1e-9))

    dev = float(max(CatCodeBasis(m).duality_defect() for m in range(1, 65)))
    out.append(ValidationResult("cat-code basis duality", dev, 0.0))
    return out
