"""Maximum tolerable bit-error rates for each protocol."""

from catkey.bb84 import check_blocklength, check_noise, rate_bb84, rate_bb84_opt
from catkey.iterated import IteratedParams, rate_iterated, rate_iterated_opt
from catkey.optimize import RATE_RESOLUTION, find_threshold
from catkey.sixstate import rate_sixstate, rate_sixstate_opt

PROTOCOLS = ("bb84", "sixstate")
P_UPPER = {"bb84": 0.5, "sixstate": 0.66}
DEFAULT_BRACKET = (0.0, 0.5)


def _check_protocol(protocol):
    if protocol not in PROTOCOLS:
        raise ValueError(f"unknown protocol {protocol!r}; expected one of {PROTOCOLS}")


def rate_function(protocol):
    _check_protocol(protocol)
    return rate_bb84 if protocol == "bb84" else rate_sixstate


def optimized_rate_function(protocol):
    _check_protocol(protocol)
    return rate_bb84_opt if protocol == "bb84" else rate_sixstate_opt


def threshold(protocol, m, q=None, bracket=DEFAULT_BRACKET, tol=1e-5):
    """p_max for blocklength m, with q optimized (q=None) or held fixed.

    A rate counts as positive only above RATE_RESOLUTION bits per block.
    """
    check_blocklength(m)
    if q is None:
        opt = optimized_rate_function(protocol)
        f = lambda p: opt(m, p)  # noqa: E731
    else:
        check_noise(q)
        rate = rate_function(protocol)
        f = lambda p: rate(m, p, q)  # noqa: E731
    res = find_threshold(f, bracket[0], bracket[1], tol=tol, floor=RATE_RESOLUTION / m)
    if q is not None:
        res = type(res)(res.p_max, res.width, q, res.evaluations)
    return res


def iterated_threshold(m1, m2, q=None, Q=None, bracket=DEFAULT_BRACKET, tol=1e-5):
    """p_max of the iterated code, optimizing (q, Q) unless both are given."""
    size = m1 * m2
    if q is None or Q is None:
        f = lambda p: rate_iterated_opt(m1, m2, p)  # noqa: E731
    else:
        params = IteratedParams(m1, m2, q, Q)
        f = lambda p: rate_iterated(params, p)  # noqa: E731
    res = find_threshold(f, bracket[0], bracket[1], tol=tol, floor=RATE_RESOLUTION / size)
    if q is not None and Q is not None:
        res = type(res)(res.p_max, res.width, (q, Q), res.evaluations)
    return res
