"""Noise-rate maximization and threshold bisection."""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

GRID_POINTS = 51
TIE_TOL = 1e-14
# Rates whose per-block value is within this of zero are not resolvable from
# round-off in the entropy sums, and count as "no key" for thresholds.
RATE_RESOLUTION = 1e-12
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

_workers = None


def set_workers(n):
    """Set the default number of threads for grid evaluations (None resets)."""
    global _workers
    if n is not None and n < 1:
        raise ValueError("worker count must be positive")
    _workers = n


def default_workers():
    if _workers is not None:
        return _workers
    env = os.environ.get("CATKEY_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def parallel_map(f, xs, workers=None):
    """Ordered map; identical results for any worker count."""
    xs = list(xs)
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(xs) <= 1:
        return [f(x) for x in xs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(f, xs))


@dataclass(frozen=True)
class OptimizationResult:
    argmax: object
    value: float
    evaluations: int
    converged: bool


@dataclass(frozen=True)
class ThresholdResult:
    p_max: float
    width: float
    q_at_threshold: object
    evaluations: int


class InvalidBracketError(ValueError):
    """The supplied bracket does not straddle the threshold."""


def _golden(f, a, b, tol, fa=None):
    """Golden-section maximization on [a, b]; returns (x, fx, evaluations, ok)."""
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    evals = 2
    while b - a > tol:
        if not (math.isfinite(fc) and math.isfinite(fd)):
            return None, -math.inf, evals, False
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
        evals += 1
    x, fx = (c, fc) if fc >= fd else (d, fd)
    return x, fx, evals, True


def _grid_best(values):
    """Index of the grid maximum, preferring the smallest q among near-ties."""
    vals = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ArithmeticError("objective returned a non-finite value on the grid")
    return int(np.flatnonzero(vals >= vals.max() - TIE_TOL)[0])


def maximize_over_noise(f, lo=0.0, hi=0.5, grid=GRID_POINTS, tol=1e-6, workers=None):
    """Maximize a scalar function of the noise rate on [lo, hi].

    A coarse grid picks the best cell; golden-section search then runs over
    that cell and its neighbours until the bracket is below ``tol``. The
    reported value is never below the best grid value.
    """
    if not 0.0 <= lo <= hi <= 0.5:
        raise ValueError(f"search interval [{lo}, {hi}] not inside [0, 0.5]")
    if lo == hi:
        return OptimizationResult(lo, float(f(lo)), 1, True)
    xs = np.linspace(lo, hi, grid)
    values = parallel_map(f, xs.tolist(), workers)
    i = _grid_best(values)
    best_x, best_v = float(xs[i]), float(values[i])
    a, b = float(xs[max(i - 1, 0)]), float(xs[min(i + 1, grid - 1)])
    x, fx, evals, ok = _golden(f, a, b, tol)
    if ok and fx > best_v:
        best_x, best_v = x, fx
    return OptimizationResult(best_x, best_v, grid + evals, ok)


def maximize_2d(f, box=((0.0, 0.5), (0.0, 0.5)), grid=21, tol=1e-5, max_rounds=30, workers=None):
    """Maximize f(x, y) by a coarse grid then coordinate-wise golden sections.

    Each coordinate is refined inside one grid cell on either side of the
    current point; rounds stop when neither coordinate moves by more than
    ``tol``.
    """
    (xlo, xhi), (ylo, yhi) = box
    xs = np.linspace(xlo, xhi, grid)
    ys = np.linspace(ylo, yhi, grid)
    pts = [(float(x), float(y)) for x in xs for y in ys]
    values = parallel_map(lambda xy: f(*xy), pts, workers)
    i = _grid_best(values)
    (x, y), best = pts[i], float(values[i])
    evals = len(pts)
    hx = (xhi - xlo) / (grid - 1)
    hy = (yhi - ylo) / (grid - 1)
    converged = False
    for _ in range(max_rounds):
        x_old, y_old = x, y
        nx, vx, n, okx = _golden(lambda t: f(t, y), max(xlo, x - hx), min(xhi, x + hx), tol)
        evals += n
        if okx and vx > best:
            x, best = nx, vx
        ny, vy, n, oky = _golden(lambda t: f(x, t), max(ylo, y - hy), min(yhi, y + hy), tol)
        evals += n
        if oky and vy > best:
            y, best = ny, vy
        if not (okx and oky):
            break
        if abs(x - x_old) <= tol and abs(y - y_old) <= tol:
            converged = True
            break
    return OptimizationResult((x, y), best, evals, converged)


def _value(res):
    if isinstance(res, OptimizationResult):
        return res.value, res.argmax
    return float(res), None


def find_threshold(rate_opt, p_lo, p_hi, tol=1e-5, floor=0.0):
    """Bisect for the largest p with rate_opt(p) > floor.

    ``rate_opt`` returns either a number or an OptimizationResult. The
    bracket must satisfy rate(p_lo) > floor >= rate(p_hi). The result is the
    bracket midpoint, so ``p_max -+ width`` are the last positive and
    nonpositive points.
    """
    if not p_lo < p_hi:
        raise InvalidBracketError(f"need p_lo < p_hi, got {p_lo}, {p_hi}")
    v_lo, arg_lo = _value(rate_opt(p_lo))
    v_hi, _ = _value(rate_opt(p_hi))
    evals = 2
    if not (v_lo > floor >= v_hi):
        raise InvalidBracketError(
            f"rate does not change sign on [{p_lo}, {p_hi}]: {v_lo:.3e}, {v_hi:.3e}")
    lo, hi = p_lo, p_hi
    while hi - lo > 2 * tol:
        mid = 0.5 * (lo + hi)
        v, arg = _value(rate_opt(mid))
        evals += 1
        if v > floor:
            lo, arg_lo = mid, arg
        else:
            hi = mid
    return ThresholdResult(0.5 * (lo + hi), 0.5 * (hi - lo), arg_lo, evals)
