import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catkey.bb84 import rate_bb84, rate_bb84_closed_form
from catkey.entropy import binary_entropy
from catkey.optimize import (GRID_POINTS, InvalidBracketError, OptimizationResult, default_workers,
                             find_threshold, maximize_2d, maximize_over_noise, parallel_map,
                             set_workers)
from catkey.thresholds import threshold


def test_synthetic_parabola():
    res = maximize_over_noise(lambda q: 1 - (q - 0.3) ** 2)
    assert res.argmax == pytest.approx(0.3, abs=1e-6)
    assert res.converged


def test_perfect_channel_prefers_no_noise():
    res = maximize_over_noise(lambda q: rate_bb84(1, 0.0, q))
    assert res.argmax == 0.0
    assert res.value == pytest.approx(1.0)


def test_noise_helps_single_signal():
    res = maximize_over_noise(lambda q: rate_bb84_closed_form(0.12, q))
    assert res.argmax > 0
    assert res.value > rate_bb84_closed_form(0.12, 0.0)


def test_ties_go_to_smaller_noise():
    res = maximize_over_noise(lambda q: 1.0)
    assert res.argmax == 0.0


def test_rejects_bad_interval():
    with pytest.raises(ValueError):
        maximize_over_noise(lambda q: q, 0.2, 0.7)


def test_non_finite_grid_value():
    with pytest.raises(ArithmeticError):
        maximize_over_noise(lambda q: float("nan"))


@settings(max_examples=30, deadline=None)
@given(center=st.floats(0, 0.5), scale=st.floats(0.1, 10), wiggle=st.floats(0, 0.3))
def test_refinement_never_below_grid(center, scale, wiggle):
    f = lambda q: -scale * abs(q - center) + wiggle * np.sin(40 * q)  # noqa: E731
    grid_best = max(f(x) for x in np.linspace(0, 0.5, GRID_POINTS))
    assert maximize_over_noise(f).value >= grid_best


def test_maximize_2d_quadratic():
    res = maximize_2d(lambda x, y: -(x - 0.13) ** 2 - 2 * (y - 0.31) ** 2)
    assert res.argmax[0] == pytest.approx(0.13, abs=1e-4)
    assert res.argmax[1] == pytest.approx(0.31, abs=1e-4)


def test_threshold_linear():
    res = find_threshold(lambda p: 0.2 - p, 0.0, 0.5, tol=1e-8)
    assert res.p_max == pytest.approx(0.2, abs=1e-8)
    assert res.width <= 1e-8


def test_threshold_closed_form_bb84():
    res = find_threshold(lambda p: 1 - 2 * binary_entropy(p), 0.01, 0.2)
    assert res.p_max == pytest.approx(0.110028, abs=1e-4)


@settings(max_examples=30, deadline=None)
@given(root=st.floats(0.01, 0.49), tol=st.sampled_from([1e-3, 1e-5, 1e-7]))
def test_threshold_brackets_root(root, tol):
    f = lambda p: root - p  # noqa: E731
    res = find_threshold(f, 0.0, 0.5, tol=tol)
    assert f(res.p_max - res.width) > 0 >= f(res.p_max + res.width)
    assert res.width <= tol


def test_threshold_floor():
    res = find_threshold(lambda p: 0.2 - p, 0.0, 0.5, tol=1e-9, floor=0.05)
    assert res.p_max == pytest.approx(0.15, abs=1e-8)


def test_threshold_carries_argmax():
    res = find_threshold(lambda p: OptimizationResult(p / 2, 0.2 - p, 1, True), 0.0, 0.5)
    assert res.q_at_threshold == pytest.approx(0.1, abs=1e-5)


@pytest.mark.parametrize("lo,hi", [(0.3, 0.4), (0.0, 0.1), (0.2, 0.2)])
def test_invalid_bracket(lo, hi):
    with pytest.raises(InvalidBracketError):
        find_threshold(lambda p: 0.2 - p, lo, hi)


def test_workers_configuration(monkeypatch):
    monkeypatch.setenv("CATKEY_THREADS", "3")
    set_workers(None)
    assert default_workers() == 3
    set_workers(2)
    assert default_workers() == 2
    set_workers(None)
    with pytest.raises(ValueError):
        set_workers(0)


def test_results_independent_of_thread_count():
    f = lambda q: rate_bb84(6, 0.11, q)  # noqa: E731
    assert parallel_map(f, [0.1, 0.2, 0.3], workers=1) == parallel_map(f, [0.1, 0.2, 0.3], workers=4)
    a = maximize_over_noise(f, workers=1)
    b = maximize_over_noise(f, workers=4)
    assert a == b


def test_threshold_wrapper_fixed_noise():
    res = threshold("bb84", 1, q=0.0, bracket=(0.05, 0.2))
    assert res.p_max == pytest.approx(0.110028, abs=1e-4)
    assert res.q_at_threshold == 0.0
    with pytest.raises(ValueError):
        threshold("qkd", 1)
