"""Block-diagonal entropies of permutation-invariant qubit states.

A sum of tensor powers ``sum_i w_i rho_i^{(x)m}`` is block diagonal in the
Schur basis: one block per spin ``j`` repeated ``N_Y(j)`` times, each block of
dimension ``2j + 1``. For a real qubit state ``rho = R(theta) diag(l1, l2)
R(theta)^T`` the spin-``j`` block is ``D_j(theta) diag(...) D_j(theta)^T``,
where ``D_j`` is the real Wigner rotation ``exp(-theta/2 (J+ - J-))``.

Spins are stored as the integer ``two_j = 2j``. Inside a block the basis index
``a = j + k`` runs over ``0 .. two_j`` (``k = -j .. j``) and counts the ones
in the Weyl tableau, so index 0 carries the largest power of ``l1``.

Block scales underflow badly at large ``m``, so every block is handled as
``exp(L) * (normalized block)`` with ``L`` kept in log space.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from catkey.entropy import NumericalError, binary_entropy, spectrum_entropy
from catkey.states import qubit_eigenvalues

MAX_BLOCKLENGTH = 1024
# Diagonal entries below this fraction of the block maximum are dropped.
RANK_TOL = 1e-18
# Blocks whose total weight is below this are skipped.
WEIGHT_TOL = 1e-22
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class SchurBlock:
    two_j: int
    multiplicity: int

    @property
    def dim(self):
        return self.two_j + 1


@dataclass(frozen=True)
class SchurBlockStructure:
    m: int
    blocks: tuple

    def total_dimension(self):
        return sum(b.multiplicity * b.dim for b in self.blocks)


def _check_m(m):
    if not isinstance(m, (int, np.integer)) or m < 1 or m > MAX_BLOCKLENGTH:
        raise ValueError(f"blocklength must be an integer in [1, {MAX_BLOCKLENGTH}], got {m!r}")


def hook_multiplicity(m, two_j):
    """N_Y(j) = C(m, m/2 - j) (2j + 1) / (m/2 + j + 1), exactly."""
    if two_j < 0 or two_j > m or (m - two_j) % 2:
        raise ValueError(f"invalid spin 2j={two_j} for m={m}")
    k = (m - two_j) // 2
    num = math.comb(m, k) * (two_j + 1)
    den = k + two_j + 1
    n_y, rem = divmod(num, den)
    if rem:
        raise ArithmeticError(f"hook length ratio not integral for m={m}, 2j={two_j}")
    return n_y


@lru_cache(maxsize=None)
def block_structure(m):
    """Schur blocks of m qubits, from j = m/2 downward."""
    _check_m(m)
    blocks = tuple(SchurBlock(two_j, hook_multiplicity(m, two_j))
                   for two_j in range(m, -1, -2))
    return SchurBlockStructure(m, blocks)


@lru_cache(maxsize=4096)
def _log_multiplicities(m):
    """Arrays (two_j, ln N_Y) for all blocks of m qubits."""
    st = block_structure(m)
    two_js = np.array([b.two_j for b in st.blocks], dtype=int)
    ln_ny = np.array([math.log(b.multiplicity) for b in st.blocks])
    return two_js, ln_ny


def rotation_angle(rho):
    """Angle theta with R(theta)^T rho R(theta) = diag(l1, l2), l1 >= l2.

    R(theta) is the spin-1/2 Wigner block ``[[c, s], [-s, c]]`` with
    ``c, s = cos(theta/2), sin(theta/2)``. Degenerate states give 0.
    The result lies in (-pi, pi].
    """
    rho = np.asarray(rho)
    if np.iscomplexobj(rho):
        if np.max(np.abs(rho.imag)) > 1e-14:
            raise ValueError("rotation_angle needs a real symmetric state")
        rho = rho.real
    a, b, d = float(rho[0, 0]), float(rho[0, 1]), float(rho[1, 1])
    if abs(b) == 0.0 and a == d:
        return 0.0
    theta = -math.atan2(2.0 * b, a - d)
    if theta <= -math.pi:
        theta += 2.0 * math.pi
    return theta


@lru_cache(maxsize=512)
def _jx_eigensystem(two_j):
    """Eigenvectors of J_x for spin two_j/2 and the exact eigenvalues -j..j."""
    d = two_j + 1
    if d == 1:
        return np.ones((1, 1)), np.zeros(1)
    k = np.arange(d - 1) - two_j / 2.0
    j = two_j / 2.0
    off = 0.5 * np.sqrt(j * (j + 1) - k * (k + 1))
    w, u = eigh_tridiagonal(np.zeros(d), off)
    n = np.arange(d) - j
    if np.max(np.abs(w - n)) > 1e-8 * max(1.0, j):
        raise NumericalError(f"J_x spectrum inaccurate for 2j={two_j}")
    u.setflags(write=False)
    return u, n


def _phase_tables(rows, cols):
    delta = (np.arange(rows)[:, None] - np.arange(cols)[None, :]) % 4
    cos_tab = np.choose(delta, [1.0, 0.0, -1.0, 0.0])
    sin_tab = np.choose(delta, [0.0, 1.0, 0.0, -1.0])
    return cos_tab, sin_tab


def wigner_corner(two_j, theta, rows=None, cols=None):
    """Top-left ``rows x cols`` corner of the spin-j Wigner block at ``theta``.

    Uses exp(-i theta J_y) = P exp(-i theta J_x) P^dagger with P the quarter
    turn about z, so only the real eigenvectors of J_x are needed.
    """
    d = two_j + 1
    rows = d if rows is None else rows
    cols = d if cols is None else cols
    u, n = _jx_eigensystem(two_j)
    ur, uc = u[:rows], u[:cols]
    x = (ur * np.cos(theta * n)) @ uc.T
    y = (ur * np.sin(theta * n)) @ uc.T
    cos_tab, sin_tab = _phase_tables(rows, cols)
    return cos_tab * x - sin_tab * y


def wigner_block(two_j, theta):
    """Orthogonal matrix exp(-theta/2 (J+ - J-)) of dimension two_j + 1."""
    if two_j < 0:
        raise ValueError("two_j must be nonnegative")
    return wigner_corner(two_j, theta)


def ladder_generator(two_j):
    """Real antisymmetric (J+ - J-)/2 in the a = j + k ordering."""
    d = two_j + 1
    j = two_j / 2.0
    k = np.arange(d - 1) - j
    off = 0.5 * np.sqrt(j * (j + 1) - k * (k + 1))
    g = np.zeros((d, d))
    g[np.arange(1, d), np.arange(d - 1)] = off
    g[np.arange(d - 1), np.arange(1, d)] = -off
    return g


def _diag_entries(two_j, lam1, lam2, m):
    a = np.arange(two_j + 1)
    pairs = (m - two_j) // 2
    return lam1 ** (two_j - a) * lam2 ** a * (lam1 * lam2) ** pairs


def diagonal_block(two_j, lam1, lam2, m):
    """Spin-j block of diag(lam1, lam2)^{(x)m}: entries l1^(j-k) l2^(j+k) (l1 l2)^(m/2-j)."""
    if lam1 < lam2 or lam2 < 0:
        raise ValueError("need lam1 >= lam2 >= 0")
    if two_j > m or (m - two_j) % 2:
        raise ValueError(f"invalid spin 2j={two_j} for m={m}")
    return np.diag(_diag_entries(two_j, lam1, lam2, m))


def _log_scale(two_j, m, lam1, lam2):
    """ln of the leading diagonal entry l1^(2j) (l1 l2)^(m/2 - j)."""
    pairs = (m - two_j) // 2
    out = 0.0
    if two_j:
        out += two_j * math.log(lam1)
    if pairs:
        if lam2 <= 0.0:
            return -math.inf
        out += pairs * math.log(lam1 * lam2)
    return out


def _core(two_j, ratio):
    return ratio ** np.arange(two_j + 1)


def _geometric_sum(ratio, count):
    """sum_{a < count} ratio**a, elementwise in count."""
    count = np.asarray(count, dtype=float)
    if ratio >= 1.0:
        return count
    return -np.expm1(count * math.log(ratio)) / (1.0 - ratio) if ratio > 0 else np.ones_like(count)


def _rank(core, scale=1.0):
    return int(np.count_nonzero(scale * core >= RANK_TOL))


def _spectral_term(nu, log_scale, trace):
    """Entropy in bits of exp(log_scale) * nu, given trace = sum(nu)."""
    return spectrum_entropy(nu) - (log_scale / _LN2) * trace


def _prepare_family(family):
    terms = []
    for w, rho in family:
        rho = np.asarray(rho)
        if np.iscomplexobj(rho):
            if np.max(np.abs(rho.imag)) > 0:
                raise ValueError("complex-valued state: use the dense oracle")
            rho = rho.real
        if abs(rho[0, 1] - rho[1, 0]) > 1e-12:
            raise ValueError("state is not symmetric")
        if w < 0:
            raise ValueError("negative weight")
        if w == 0:
            continue
        lam1, lam2 = qubit_eigenvalues(rho)
        if lam1 <= 0:
            continue
        terms.append((float(w), lam1, lam2, rotation_angle(rho)))
    if sum(t[0] * (t[1] + t[2]) for t in terms) > 1 + 1e-12:
        raise ValueError("family weights exceed unit trace")
    return terms


def mixture_entropy(family, m, method="auto"):
    """S(sum_i w_i rho_i^{(x)m}) in bits for real qubit states rho_i.

    ``family`` is an iterable of ``(weight, 2x2 state)``. Each Schur block is
    diagonalized once and counted with its multiplicity. ``method`` selects
    the per-block strategy: ``"dense"`` rebuilds the full block, ``"lowrank"``
    diagonalizes the Gram matrix of the truncated factors and ``"auto"`` picks
    the cheaper one.
    """
    _check_m(m)
    if method not in ("auto", "dense", "lowrank"):
        raise ValueError(f"unknown method {method!r}")
    terms = _prepare_family(family)
    if not terms:
        return 0.0
    two_js, ln_ny = _log_multiplicities(m)
    total = 0.0
    for two_j, lnn in zip(two_js.tolist(), ln_ny.tolist()):
        d = two_j + 1
        logs, cores = [], []
        for w, lam1, lam2, _ in terms:
            cores.append(_core(two_j, lam2 / lam1))
            logs.append(math.log(w) + _log_scale(two_j, m, lam1, lam2))
        lmax = max(logs)
        if lmax == -math.inf:
            continue
        coeffs = [math.exp(v - lmax) for v in logs]
        trace = sum(c * float(core.sum()) for c, core in zip(coeffs, cores))
        if lnn + lmax + math.log(trace) < math.log(WEIGHT_TOL):
            continue
        ranks = [_rank(core, c) for c, core in zip(coeffs, cores)]
        use_dense = method == "dense" or (method == "auto" and sum(ranks) >= d)
        if use_dense:
            block = np.zeros((d, d))
            for c, core, (_, _, _, theta) in zip(coeffs, cores, terms):
                if c == 0.0:
                    continue
                rot = wigner_block(two_j, theta)
                block += (rot * (c * core)) @ rot.T
            nu = np.linalg.eigvalsh(0.5 * (block + block.T))
        else:
            nu = _gram_spectrum(two_j, terms, coeffs, cores, ranks)
        total += math.exp(lnn + lmax) * _spectral_term(nu, lmax, trace)
    return total


def _gram_spectrum(two_j, terms, coeffs, cores, ranks):
    """Nonzero spectrum of sum_i c_i D_i diag(core_i) D_i^T via its Gram matrix."""
    keep = [i for i, r in enumerate(ranks) if r > 0]
    factors = [np.sqrt(coeffs[i] * cores[i][:ranks[i]]) for i in keep]
    size = sum(ranks[i] for i in keep)
    gram = np.zeros((size, size))
    offsets = np.cumsum([0] + [ranks[i] for i in keep])
    for a, i in enumerate(keep):
        for b, l in enumerate(keep):
            if b < a:
                continue
            if a == b:
                blk = np.diag(factors[a] ** 2)
            else:
                corner = wigner_corner(two_j, terms[l][3] - terms[i][3], ranks[i], ranks[l])
                blk = factors[a][:, None] * corner * factors[b][None, :]
            gram[offsets[a]:offsets[a + 1], offsets[b]:offsets[b + 1]] = blk
            gram[offsets[b]:offsets[b + 1], offsets[a]:offsets[a + 1]] = blk.T
    return np.linalg.eigvalsh(gram)


class ReflectedPowers:
    """Excess entropies of a qubit state's tensor powers mixed with their Z-reflection.

    For a fixed real qubit state ``rho`` this evaluates

        S(t rho^{(x)n} + (1 - t) (Z rho Z)^{(x)n}) - n S(rho)

    for many ``n`` and ``t``. The Z-reflected state has the same spectrum and
    angle ``-theta``, so in every spin block the two terms share one
    normalized diagonal and differ only by the relative rotation
    ``D_j(-2 theta)``. The normalized block spectrum depends on ``(j, t)``
    and not on ``n``; it is cached across calls.
    """

    def __init__(self, rho):
        rho = np.asarray(rho, dtype=float)
        self.lam1, self.lam2 = qubit_eigenvalues(rho)
        self.theta = rotation_angle(rho)
        self.ratio = self.lam2 / self.lam1
        self._cache = {}
        self._weight_cache = {}

    def _block_excess(self, two_j, ts):
        """H(nu_t) - H(nu_1) in bits for the normalized spin block, per t."""
        cached = self._cache.setdefault(two_j, {})
        todo = [t for t in ts if t not in cached]
        if todo:
            core = _core(two_j, self.ratio)
            base = spectrum_entropy(core)
            d = two_j + 1
            r = _rank(core)
            tv = np.array(todo)
            if 2 * r < d:
                s = np.sqrt(core[:r])
                cross = s[:, None] * wigner_corner(two_j, -2.0 * self.theta, r, r) * s[None, :]
                mix = np.sqrt(tv * (1.0 - tv))
                gram = np.zeros((len(todo), 2 * r, 2 * r))
                idx = np.arange(r)
                gram[:, idx, idx] = tv[:, None] * core[:r]
                gram[:, r + idx, r + idx] = (1.0 - tv)[:, None] * core[:r]
                gram[:, :r, r:] = mix[:, None, None] * cross
                gram[:, r:, :r] = mix[:, None, None] * cross.T
                spectra = np.linalg.eigvalsh(gram)
            else:
                rot = wigner_block(two_j, self.theta)
                x = (rot * core) @ rot.T
                x = 0.5 * (x + x.T)
                sign = np.where(np.arange(d) % 2, -1.0, 1.0)
                y = sign[:, None] * x * sign[None, :]
                spectra = np.linalg.eigvalsh(tv[:, None, None] * x + (1.0 - tv)[:, None, None] * y)
            for t, nu in zip(todo, spectra):
                cached[t] = spectrum_entropy(nu) - base
        return np.array([cached[t] for t in ts])

    def _weights(self, n):
        """Significant blocks of n qubits and their weights N_Y exp(L)."""
        if n not in self._weight_cache:
            self._weight_cache[n] = self._compute_weights(n)
        return self._weight_cache[n]

    def _compute_weights(self, n):
        two_js, ln_ny = _log_multiplicities(n)
        if self.lam2 <= 0.0:
            return two_js[:1], np.ones(1)
        pairs = (n - two_js) // 2
        logs = ln_ny + two_js * math.log(self.lam1) + pairs * math.log(self.lam1 * self.lam2)
        core_tr = _geometric_sum(self.ratio, two_js + 1)
        keep = logs + np.log(core_tr) >= math.log(WEIGHT_TOL)
        return two_js[keep], np.exp(logs[keep])

    def _accumulate(self, n, t, deficit):
        _check_m(n)
        scalar = np.ndim(t) == 0
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(ts < 0) or np.any(ts > 1):
            raise ValueError("mixing weight outside [0, 1]")
        ts = np.maximum(ts, 1.0 - ts)
        keys = [float(x) for x in ts]
        two_js, weights = self._weights(n)
        out = np.zeros(len(keys))
        live = [i for i, x in enumerate(keys) if x < 1.0]
        if live:
            live_keys = [keys[i] for i in live]
            h = binary_entropy(np.array(live_keys))
            acc = np.zeros(len(live_keys))
            for tj, w in zip(two_js.tolist(), weights.tolist()):
                ex = self._block_excess(tj, live_keys)
                if deficit:
                    # per-block H(Delta) - H(G) >= 0, clipped against round-off
                    tr = float(_geometric_sum(self.ratio, tj + 1))
                    ex = np.maximum(tr * h - ex, 0.0)
                acc += w * ex
            out[live] = acc
        return float(out[0]) if scalar else out

    def excess(self, n, t):
        """Excess entropy for one or several mixing weights t in [0, 1]."""
        return self._accumulate(n, t, deficit=False)

    def deficit(self, n, t):
        """h(t) minus the excess entropy, summed block by block.

        This is the conditional entropy of the mixing label given the
        quantum register. Evaluating it per block avoids the cancellation in
        ``h(t) - excess`` when both are close to each other.
        """
        return self._accumulate(n, t, deficit=True)
