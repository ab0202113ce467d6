"""Scalar entropies and dense Hermitian spectra.

All entropies are in bits.
"""

import math

import numpy as np

# Eigenvalues in [-NEG_TOL, 0) are treated as zero; anything lower is an error.
NEG_TOL = 1e-10
HERMITIAN_TOL = 1e-12


class NumericalError(ArithmeticError):
    """Raised when a numerical routine produces an unusable result."""


def binary_entropy(x):
    """Binary entropy h(x) = -x log2 x - (1-x) log2(1-x).

    Accepts scalars or arrays. Values within 1e-12 outside [0, 1] are clipped.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < -1e-12) or np.any(arr > 1 + 1e-12):
        raise ValueError(f"binary entropy argument outside [0, 1]: {x!r}")
    arr = np.clip(arr, 0.0, 1.0)
    # log1p keeps the (1-x) term accurate for tiny x
    comp = 1.0 - arr
    safe = np.where(arr < 1.0, arr, 0.0)
    out = -_xlog2x(arr) - comp * np.log1p(-safe) / math.log(2.0)
    if np.ndim(out) == 0:
        return float(out)
    return out


def _xlog2x(a):
    a = np.asarray(a, dtype=float)
    safe = np.where(a > 0, a, 1.0)
    return np.where(a > 0, a * np.log2(safe), 0.0)


def shannon_entropy(p):
    """Shannon entropy -sum p_i log2 p_i of a (possibly subnormalized) vector.

    The input is not renormalized.
    """
    p = np.asarray(p, dtype=float).ravel()
    if np.any(p < 0):
        raise ValueError("probability vector has negative entries")
    if p.sum() > 1 + 1e-12:
        raise ValueError(f"probability vector sums to {p.sum()!r} > 1")
    return float(-np.sum(_xlog2x(p)))


def _check_hermitian(a):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if np.max(np.abs(a - a.conj().T), initial=0.0) > HERMITIAN_TOL * scale:
        raise ValueError("matrix is not Hermitian")
    return a


def eigh(a):
    """Eigendecomposition of a Hermitian matrix with eigenvalues descending.

    Returns ``(w, v)`` with ``a = v @ diag(w) @ v.conj().T``.
    """
    a = _check_hermitian(a)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    return w[::-1], v[:, ::-1]


def eigvalsh(a):
    """Eigenvalues only, descending; same checks as :func:`eigh`."""
    a = _check_hermitian(a)
    try:
        w = np.linalg.eigvalsh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    return w[::-1]


def spectrum_entropy(eigenvalues):
    """Entropy in bits of a spectrum, clipping tiny negative round-off.

    Sums in descending eigenvalue order so the result is reproducible.
    """
    w = np.sort(np.asarray(eigenvalues, dtype=float).ravel())[::-1]
    if w.size and w[-1] < -NEG_TOL:
        raise NumericalError(f"eigenvalue {w[-1]:.3e} below -{NEG_TOL:g}")
    w = np.where(w < 0, 0.0, w)
    return float(-np.sum(_xlog2x(w)))


def von_neumann_entropy(a):
    """Von Neumann entropy in bits of a positive (possibly subnormalized) operator."""
    a = np.asarray(a)
    tr = float(np.real(np.trace(a)))
    if tr > 1 + NEG_TOL:
        raise ValueError(f"trace {tr!r} exceeds 1")
    return spectrum_entropy(eigvalsh(a))

