"""Command-line front end: rates, thresholds and CSV sweeps.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 numerical failure.
"""

import argparse
import csv
import json
import os
import sys
import tempfile
import time
from dataclasses import asdict, dataclass

import numpy as np

from catkey import optimize
from catkey.entropy import NumericalError
from catkey.iterated import IteratedParams, rate_iterated_opt, rate_parts_iterated
from catkey.bb84 import rate_parts_bb84
from catkey.sixstate import rate_parts_sixstate
from catkey.thresholds import P_UPPER, PROTOCOLS, optimized_rate_function, threshold

CSV_HEADER = ["protocol", "m1", "m2", "p", "q", "Q", "q_tot", "rate", "i_xy", "i_xe", "key_rate"]
SCAN_HEADER = ["protocol", "m1", "m2", "p_max", "q", "Q", "q_tot", "width"]
EXIT_OK, EXIT_VALIDATE, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RatePoint:
    protocol: str
    m1: int
    m2: int
    p: float
    q: float
    Q: object
    q_tot: object
    rate: float
    i_xy: float
    i_xe: float
    runtime_ms: float = 0.0

    @property
    def key_rate(self):
        return max(self.rate, 0.0)

    def csv_row(self):
        return [self.protocol, self.m1, self.m2, _fmt(self.p), _fmt(self.q), _fmt(self.Q),
                _fmt(self.q_tot), _fmt(self.rate), _fmt(self.i_xy), _fmt(self.i_xe),
                _fmt(self.key_rate)]


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.12g" % x


_PARTS = {"bb84": rate_parts_bb84, "sixstate": rate_parts_sixstate}


def single_round_point(protocol, m, p, q):
    """RatePoint for a fixed q, or the optimal q when q is None."""
    t0 = time.perf_counter()
    if q is None:
        q = optimized_rate_function(protocol)(m, p).argmax
    parts = _PARTS[protocol](m, p, q)
    ms = 1e3 * (time.perf_counter() - t0)
    return RatePoint(protocol, m, 1, p, q, None, None, parts.rate, parts.i_xy, parts.i_xe, ms)


def iterated_point(m1, m2, p, q, Q):
    t0 = time.perf_counter()
    if q is None or Q is None:
        q, Q = rate_iterated_opt(m1, m2, p).argmax
    params = IteratedParams(m1, m2, q, Q)
    parts = rate_parts_iterated(params, p)
    ms = 1e3 * (time.perf_counter() - t0)
    return RatePoint("bb84-iterated", m1, m2, p, q, Q, params.q_tot,
                     parts.rate, parts.i_xy, parts.i_xe, ms)


def _noise_arg(text):
    if text == "auto":
        return None
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {text!r}")
    if not 0.0 <= val <= 0.5:
        raise argparse.ArgumentTypeError(f"noise rate {val} outside [0, 0.5]")
    return val


def _positive_int(text):
    try:
        val = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if val < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {val}")
    return val


def _check_p(protocol, p):
    upper = P_UPPER.get(protocol, 0.5)
    if not 0.0 <= p <= upper:
        raise UsageError(f"p = {p} outside [0, {upper}] for {protocol}")


def _p_grid(args, protocol):
    if args.steps < 1:
        raise UsageError("--steps must be at least 1")
    if args.p_min > args.p_max:
        raise UsageError("--p-min exceeds --p-max")
    _check_p(protocol, args.p_min)
    _check_p(protocol, args.p_max)
    if args.steps == 1:
        return [args.p_min]
    return np.linspace(args.p_min, args.p_max, args.steps).tolist()


def _write_csv(path, header, rows):
    """Write atomically so a failed run leaves no partial file."""
    if path in (None, "-"):
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def _print_json(obj):
    print(json.dumps(obj, indent=2))


def cmd_rate(args):
    _check_p(args.protocol, args.p)
    pt = single_round_point(args.protocol, args.m, args.p, args.q)
    out = asdict(pt)
    out["key_rate"] = pt.key_rate
    out["q_mode"] = "auto" if args.q is None else "fixed"
    _print_json(out)
    return EXIT_OK


def cmd_threshold(args):
    bracket = (args.p_lo, args.p_hi)
    t0 = time.perf_counter()
    res = threshold(args.protocol, args.m, q=args.q, bracket=bracket, tol=args.tol)
    _print_json({
        "protocol": args.protocol,
        "m": args.m,
        "q_mode": "auto" if args.q is None else "fixed",
        "p_max": res.p_max,
        "width": res.width,
        "q_at_threshold": res.q_at_threshold,
        "evaluations": res.evaluations,
        "runtime_ms": 1e3 * (time.perf_counter() - t0),
    })
    return EXIT_OK


def cmd_curve(args):
    ps = _p_grid(args, args.protocol)
    jobs = [(p, m) for p in ps for m in sorted(args.m)]
    points = [single_round_point(args.protocol, m, p, args.q) for p, m in jobs]
    _write_csv(args.out, CSV_HEADER, [pt.csv_row() for pt in points])
    return EXIT_OK


def cmd_scan_m(args):
    rows = []
    for m in args.m_list:
        res = threshold(args.protocol, m, q=args.q, bracket=(args.p_lo, args.p_hi), tol=args.tol)
        rows.append([args.protocol, m, 1, _fmt(res.p_max), _fmt(res.q_at_threshold), "", "",
                     _fmt(res.width)])
    _write_csv(args.out, SCAN_HEADER, rows)
    return EXIT_OK


def cmd_iterate(args):
    if (args.q is None) != (args.Q is None):
        raise UsageError("give both --q and --Q, or neither (auto)")
    if args.p is not None:
        _check_p("bb84", args.p)
        ps = [args.p]
    else:
        ps = _p_grid(args, "bb84")
    points = [iterated_point(args.m1, args.m2, p, args.q, args.Q) for p in ps]
    _write_csv(args.out, CSV_HEADER, [pt.csv_row() for pt in points])
    return EXIT_OK


def cmd_validate(args):
    from catkey.oracle import run_validation_suite

    results = run_validation_suite()
    width = max(len(r.name) for r in results)
    ok = True
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        ok &= r.passed
        print(f"{r.name:<{width}}  max_dev={r.deviation:.3e}  tol={r.tolerance:.0e}  {status}")
    return EXIT_OK if ok else EXIT_VALIDATE


def build_parser():
    parser = argparse.ArgumentParser(prog="catkey", description=__doc__.splitlines()[0])
    parser.add_argument("--threads", type=_positive_int, default=None,
                        help="worker threads for grid evaluations (default: CATKEY_THREADS or all cores)")
    sub = parser.add_subparsers(dest="command", required=True)

    def protocol_flags(p):
        p.add_argument("--protocol", choices=PROTOCOLS, required=True)

    r = sub.add_parser("rate", help="key rate at one point")
    protocol_flags(r)
    r.add_argument("--m", type=_positive_int, required=True)
    r.add_argument("--p", type=float, required=True)
    r.add_argument("--q", type=_noise_arg, default=None, help="number or 'auto' (default)")
    r.set_defaults(func=cmd_rate)

    t = sub.add_parser("threshold", help="maximum tolerable bit-error rate")
    protocol_flags(t)
    t.add_argument("--m", type=_positive_int, required=True)
    t.add_argument("--q", type=_noise_arg, default=None)
    t.add_argument("--p-lo", type=float, default=0.0)
    t.add_argument("--p-hi", type=float, default=0.5)
    t.add_argument("--tol", type=float, default=1e-5)
    t.set_defaults(func=cmd_threshold)

    c = sub.add_parser("curve", help="rate versus p as CSV")
    protocol_flags(c)
    c.add_argument("--m", type=_positive_int, nargs="+", required=True)
    c.add_argument("--q", type=_noise_arg, default=None)
    c.add_argument("--p-min", type=float, required=True)
    c.add_argument("--p-max", type=float, required=True)
    c.add_argument("--steps", type=int, required=True)
    c.add_argument("--out", default="-")
    c.set_defaults(func=cmd_curve)

    s = sub.add_parser("scan-m", help="threshold versus blocklength as CSV")
    protocol_flags(s)
    s.add_argument("--m-list", type=_positive_int, nargs="+", required=True)
    s.add_argument("--q", type=_noise_arg, default=None)
    s.add_argument("--p-lo", type=float, default=0.0)
    s.add_argument("--p-hi", type=float, default=0.5)
    s.add_argument("--tol", type=float, default=1e-5)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_scan_m)

    i = sub.add_parser("iterate", help="iterated BB84 preprocessing as CSV")
    i.add_argument("--m1", type=_positive_int, required=True)
    i.add_argument("--m2", type=_positive_int, required=True)
    i.add_argument("--q", type=_noise_arg, default=None)
    i.add_argument("--Q", type=_noise_arg, default=None)
    i.add_argument("--p", type=float, default=None)
    i.add_argument("--p-min", type=float, default=0.0)
    i.add_argument("--p-max", type=float, default=0.15)
    i.add_argument("--steps", type=int, default=16)
    i.add_argument("--out", default="-")
    i.set_defaults(func=cmd_iterate)

    v = sub.add_parser("validate", help="run the oracle comparison suite")
    v.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    optimize.set_workers(args.threads)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (ValueError, TypeError) as exc:
        if isinstance(exc, optimize.InvalidBracketError):
            print(f"catkey: numerical failure: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        print(f"catkey: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"catkey: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    finally:
        optimize.set_workers(None)


if __name__ == "__main__":
    sys.exit(main())
