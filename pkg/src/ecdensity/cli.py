"""Command-line front end: average verification, trace audits, Euler
products, density curves, zero lists, empirical statistics and the
partial-product experiment.

A key=value config file supplies defaults that command-line flags
override.  All numeric output uses 17 significant digits so identical
configurations produce byte-identical files at any parallelism degree
(reductions are ordered).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import arith, averages, density, hecke, lfunc, ratios

__all__ = ["main", "run"]


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


class ConfigError(ValueError):
    pass


def _parse_complex(s: str) -> complex:
    try:
        return complex(s.replace(" ", ""))
    except ValueError as e:
        raise ConfigError(f"bad complex number {s!r}") from e


def _parse_range(s: str) -> tuple[int, int]:
    try:
        lo, hi = s.split(":")
        return int(lo), int(hi)
    except Exception as e:
        raise ConfigError(f"bad range {s!r}, expected lo:hi") from e


_OPTIONS = {
    "verify-averages": {
        "family": (int, 1), "pmax": (int, 97), "m1max": (int, 8),
        "out": (str, "-"),
    },
    "traces": {
        "jmax": (int, 22), "pmax": (int, 97), "out": (str, "-"),
    },
    "euler-product": {
        "family": (int, 1), "alpha": (_parse_complex, 0.1),
        "gamma": (_parse_complex, 0.1), "prime-cutoff": (int, 10_000),
        "order": (int, 14), "out": (str, "-"),
    },
    "predict-density": {
        "family": (int, 2), "X": (float, 1e8), "tau-min": (float, 0.05),
        "tau-max": (float, 3.0), "tau-steps": (int, 60),
        "test-function": (str, "gaussian"), "format": (str, "csv"),
        "out": (str, "-"), "plot-script": (str, ""),
    },
    "zeros": {
        "t-param": (int, 1), "height": (float, 10.0), "out": (str, "-"),
        "jobs": (int, 1),
    },
    "empirical": {
        "t-range": (_parse_range, (1, 13)), "X": (float, 4e6),
        "test-function": (str, "gaussian"), "out": (str, "-"),
        "jobs": (int, 1),
    },
    "bsd": {
        "t-param": (int, 13), "x-max": (int, 10 ** 6), "out": (str, "-"),
    },
}


def _build_parser(config: dict[str, dict[str, str]]) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ecdensity")
    parser.add_argument("--config", default=None, help="key=value defaults file")
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd, opts in _OPTIONS.items():
        p = sub.add_parser(cmd)
        file_defaults = config.get(cmd, {})
        for name, (conv, default) in opts.items():
            if name in file_defaults:
                default = conv(file_defaults[name])
            p.add_argument(f"--{name}", type=conv, default=default,
                           dest=name.replace("-", "_"))
    return parser


def _read_config(path: str) -> dict[str, dict[str, str]]:
    """Sections are optional: 'command.key = value' scopes to a subcommand,
    bare 'key = value' applies wherever the key exists."""
    table: dict[str, dict[str, str]] = {cmd: {} for cmd in _OPTIONS}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"bad config line {line!r}")
            key, val = (part.strip() for part in line.split("=", 1))
            if "." in key:
                cmd, key = key.split(".", 1)
                if cmd not in table or key not in _OPTIONS[cmd]:
                    raise ConfigError(f"unknown config key {cmd}.{key}")
                table[cmd][key] = val
            else:
                hit = False
                for cmd, opts in _OPTIONS.items():
                    if key in opts:
                        table[cmd][key] = val
                        hit = True
                if not hit:
                    raise ConfigError(f"unknown config key {key!r}")
    return table


def _write(out: str, text: str) -> None:
    if out == "-" or not out:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _sqrt_scaled_str(v: averages.SqrtScaled) -> str:
    return f"{v.frac}*{v.p}^-1/2" if v.half else str(v.frac)


def _cmd_verify_averages(args) -> int:
    lines = ["family,m1,m2,p,closed,brute,equal"]
    all_ok = True
    primes = [p for p in arith.sieve_primes(args.pmax) if p > (3 if args.family == 1 else 2)]
    for p in primes:
        for m1 in range(0, args.m1max + 1):
            for m2 in (0, 1, 2):
                if args.family == 1:
                    brute = averages.q_star_bruteforce(m1, m2, p).value
                    closed = averages.q_star_closed(m1, m2, p).value
                else:
                    brute = averages.q_t_bruteforce(m1, m2, p).value
                    closed = _family2_closed(m1, m2, p)
                    if closed is None:
                        lines.append(f"{args.family},{m1},{m2},{p},,"
                                     f"{_sqrt_scaled_str(brute)},")
                        continue
                eq = brute == closed
                all_ok = all_ok and eq
                lines.append(f"{args.family},{m1},{m2},{p},{_sqrt_scaled_str(closed)},"
                             f"{_sqrt_scaled_str(brute)},{str(eq).lower()}")
    _write(args.out, "\n".join(lines) + "\n")
    if not all_ok:
        raise AssertionError("closed and brute-force averages disagree")
    return 0


def _family2_closed(m1: int, m2: int, p: int):
    if (m1, m2) == (0, 0):
        return averages.SqrtScaled(p, Fraction(1), False)
    if (m1, m2) == (1, 0):
        return averages.washington_first_moment_exact(p)
    if (m1, m2) == (0, 1):
        return -averages.washington_first_moment_exact(p)
    if (m1, m2) == (1, 1):
        return averages.SqrtScaled(p, averages.washington_diagonal_exact(p), False)
    if (m1, m2) == (0, 2):
        return averages.SqrtScaled(p, averages.washington_second_moment_exact(p), False)
    if (m1, m2) == (2, 0):
        return averages.SqrtScaled(p, averages.washington_q20_exact(p), False)
    return None


def _cmd_traces(args) -> int:
    lines = ["j,p,trace_numerator,trace_denominator"]
    table = hecke.TraceTable()
    for p in arith.sieve_primes(args.pmax):
        for j in range(2, args.jmax + 1, 2):
            lines.append(f"{j},{p},{table.trace(j, p)},1")
    _write(args.out, "\n".join(lines) + "\n")
    return 0


def _cmd_euler_product(args) -> int:
    shift = ratios.ComplexShift(args.alpha, args.gamma)
    if args.family == 1:
        v = ratios.A_family1(shift, P=args.prime_cutoff, M=args.order)
    elif args.family == 2:
        v = ratios.A_family2(shift, P=args.prime_cutoff, M=args.order)
    else:
        raise ConfigError("family must be 1 or 2")
    payload = {"value_re": v.value.real, "value_im": v.value.imag,
               "tail_bound": v.tail_bound, "P": v.prime_cutoff, "M": v.series_order}
    _write(args.out, json.dumps(payload, sort_keys=True) + "\n")
    return 0


def _test_function(name: str) -> density.TestFunction:
    if name == "gaussian":
        return density.gaussian_test_function()
    if name == "fejer":
        return density.fejer_test_function()
    raise ConfigError(f"unknown test function {name!r}")


def _cmd_predict_density(args) -> int:
    if args.family not in (1, 2):
        raise ConfigError("family must be 1 or 2")
    import numpy as np

    tf = _test_function(args.test_function)
    tau = np.linspace(args.tau_min, args.tau_max, args.tau_steps)
    curve = density.scaled_density(args.family, args.X, tau)
    rows = list(curve.rows())
    if args.format == "csv":
        lines = ["tau,smooth,taylor,catalog,delta_mass"]
        for row in rows:
            lines.append(",".join(_fmt(x) for x in row))
        text = "\n".join(lines) + "\n"
    elif args.format == "json":
        text = json.dumps({
            "family": args.family, "X": args.X, "L": curve.L,
            "delta_mass": curve.delta_mass,
            "test_function": tf.name,
            "rows": [[float(x) for x in row] for row in rows],
        }, sort_keys=True) + "\n"
    else:
        raise ConfigError("format must be csv or json")
    _write(args.out, text)
    if args.plot_script:
        src = args.out if args.out not in ("-", "") else "density.csv"
        script = "\n".join([
            "set datafile separator ','",
            "set xlabel 'tau'",
            "set ylabel 'scaled density'",
            f"set title 'family {args.family}, X={_fmt(args.X)}'",
            f"plot '{src}' using 1:2 with lines title 'computed', \\",
            f"     '{src}' using 1:3 with lines title 'series form', \\",
            f"     '{src}' using 1:4 with lines title 'limit shape'",
            "",
        ])
        with open(args.plot_script, "w") as fh:
            fh.write(script)
    return 0


def _cmd_zeros(args) -> int:
    t = args.t_param
    c, res, ok = lfunc.confirm_conductor(t)
    nmax = int(12 * math.sqrt(c)) + 64
    ls = lfunc.coefficients(arith.WashingtonCurve(t), nmax, conductor=c)
    ls.conductor_exact = ok
    zl = lfunc.find_zeros(ls, args.height)
    payload = {
        "t": t, "conductor": int(c), "conductor_confirmed": bool(ok),
        "afe_residual": float(res),
        "central_multiplicity": int(zl.central_multiplicity),
        "count_estimate": float(zl.count_estimate),
        "ordinates": [float(g) for g in zl.ordinates],
        "warning": zl.warning,
    }
    _write(args.out, json.dumps(payload, sort_keys=True) + "\n")
    return 0


def _empirical_row(task) -> tuple:
    t, X, tf_name = task
    tf = _test_function(tf_name)
    res = lfunc.empirical_one_level([arith.WashingtonCurve(t)], tf, X)
    return res.per_curve[0]


def _cmd_empirical(args) -> int:
    lo, hi = args.t_range
    ts = [t for t in range(lo, hi + 1)
          if arith.washington_conductor(t).exact
          and arith.washington_conductor(t).value <= 10 ** 6]
    if not ts:
        raise ConfigError("no guarded curves with conductor <= 1e6 in range")
    tasks = [(t, args.X, args.test_function) for t in ts]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            rows = list(ex.map(_empirical_row, tasks))
    else:
        rows = [_empirical_row(task) for task in tasks]
    lines = ["t,conductor,central_contribution,contribution"]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    total = sum(r[3] for r in rows) / len(rows)
    central = sum(r[2] for r in rows) / len(rows)
    lines.append(f"aggregate,,{_fmt(central)},{_fmt(total)}")
    _write(args.out, "\n".join(lines) + "\n")
    return 0


def _cmd_bsd(args) -> int:
    res = density.bsd_decomposition(arith.WashingtonCurve(args.t_param), args.x_max)
    payload = {"t": args.t_param, "x_max": args.x_max,
               "slope_full": res.slope_full, "slope_shifted": res.slope_shifted,
               "gap": res.slope_full - res.slope_shifted}
    _write(args.out, json.dumps(payload, sort_keys=True) + "\n")
    return 0


_DISPATCH = {
    "verify-averages": _cmd_verify_averages,
    "traces": _cmd_traces,
    "euler-product": _cmd_euler_product,
    "predict-density": _cmd_predict_density,
    "zeros": _cmd_zeros,
    "empirical": _cmd_empirical,
    "bsd": _cmd_bsd,
}


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    config: dict = {}
    if "--config" in argv:
        try:
            path = argv[argv.index("--config") + 1]
        except IndexError:
            print(json.dumps({"error": "missing --config value", "kind": "config"}),
                  file=sys.stderr)
            return 2
        try:
            config = _read_config(path)
        except (OSError, ConfigError) as e:
            print(json.dumps({"error": str(e), "kind": "config"}), file=sys.stderr)
            return 2
    parser = _build_parser(config)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        if e.code not in (0, None):
            print(json.dumps({"error": "bad arguments", "kind": "config"}),
                  file=sys.stderr)
            return 2
        return 0
    try:
        return _DISPATCH[args.command](args)
    except (ConfigError, ValueError) as e:
        print(json.dumps({"error": str(e), "kind": "config"}), file=sys.stderr)
        return 2
    except AssertionError as e:
        print(json.dumps({"error": str(e), "kind": "assertion"}), file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
