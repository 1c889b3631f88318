"""Command-line interface: ``xxz-thermo <command> [options]``.

Exit codes: 0 success, 1 numerical failure, 2 domain error, 3 failed
verification, 64 malformed command line.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np

from . import __version__
from .asympt import asympt_fermi_rapidity, asympt_rho_at_Q, asympt_Z_at_Q, epsilon_gamma, rho_amplitude
from .bank import bank_profile
from .errors import DomainError, XXZError
from .fermi import filling, magnetic_rapidity_derivative, solve_fermi_rapidity, solve_magnetic_rapidity
from .kernels import ModelParams, bare_energy, fourier_K, kernel_K
from .special import G_function, R_infinite
from .thermo import dressed_charge, dressed_energy, dressed_momentum, root_density
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_DOMAIN = 2
EXIT_VERIFY = 3
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _fmt(x):
    return format(float(x), ".17g")


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json_text(obj):
    return json.dumps(obj, indent=2) + "\n"


def _emit(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _gamma(args):
    if args.gamma is not None:
        return args.gamma
    if args.delta is not None:
        if not -1.0 < args.delta < 1.0:
            raise DomainError(f"delta must lie in (-1, 1), got {args.delta!r}")
        return math.acos(args.delta)
    raise UsageError("one of --gamma or --delta is required")


def _params(args):
    return ModelParams(_gamma(args), args.j, args.h)


def _profile(args, lam, values):
    if args.format == "json":
        return _json_text({"lambda": [float(x) for x in lam], "value": [float(v) for v in values]})
    return _csv_text(["lambda", "value"], zip(lam, values))


def _record(args, header, row):
    if args.format == "csv":
        return _csv_text(header, [row])
    return _json_text({k: float(v) for k, v in zip(header, row)})


# -- commands -----------------------------------------------------------------

def cmd_kernel(args):
    g = _gamma(args)
    lam = np.linspace(args.start, args.stop, args.points)
    funcs = {
        "K": lambda x: kernel_K(x, g),
        "fourier": lambda x: fourier_K(x, g),
        "R": lambda x: R_infinite(x, g),
        "G": lambda x: G_function(x, g),
        "bare-energy": lambda x: bare_energy(x, ModelParams(g, args.j, args.h)),
    }
    _emit(args, _profile(args, lam, funcs[args.which](lam)))
    return EXIT_OK


def cmd_solve(args):
    g = _gamma(args)
    q = args.quantity
    if q == "charge":
        sol = dressed_charge(g, args.q, args.n)
    elif q in ("density", "momentum"):
        sol = root_density(g, args.q, args.n)
    else:
        sol = dressed_energy(ModelParams(g, args.j, args.h), args.q, args.n)
    lam = sol.grid.nodes
    values = dressed_momentum(sol, lam) if q == "momentum" else sol.values
    _log(args, f"quantity={q} gamma={g!r} Q={args.q!r} nodes={sol.grid.n}")
    _emit(args, _profile(args, lam, values))
    return EXIT_OK


FERMI_HEADER = ["q_f", "z_f", "p_f", "v_f", "residual"]


def cmd_fermi(args):
    point = solve_fermi_rapidity(_params(args), args.n)
    if point.polarized:
        _log(args, "field at or above saturation: empty Fermi zone")
    d = point.as_dict()
    _emit(args, _record(args, FERMI_HEADER, [d[k] for k in FERMI_HEADER]))
    return EXIT_OK


def cmd_magnetic(args):
    g = _gamma(args)
    Q = solve_magnetic_rapidity(g, args.m, args.n)
    deriv = magnetic_rapidity_derivative(g, Q, args.n)
    residual = filling(g, Q, args.n) - args.m
    _emit(args, _record(args, ["q_m", "dq_dm", "residual"], [Q, deriv, residual]))
    return EXIT_OK


def cmd_asympt(args):
    g = _gamma(args)
    header = ["epsilon_gamma", "z_limit"]
    row = [epsilon_gamma(g), asympt_Z_at_Q(g)]
    if g > math.pi / 5.0:
        header += ["rho_amplitude", "rho_at_q"]
        row += [rho_amplitude(g), asympt_rho_at_Q(g, args.q)]
    if args.h > 0.0:
        # raises a domain error for gamma <= pi/5 rather than dropping the column
        header.append("q_f")
        row.append(asympt_fermi_rapidity(ModelParams(g, args.j, args.h)))
    _emit(args, _record(args, header, row))
    return EXIT_OK


def cmd_bank(args):
    params = _params(args)
    lam = np.linspace(args.start, args.stop, args.points)
    prof = bank_profile(params, lam)
    _log(args, f"Q_F={prof.fermi.QF!r} floor={prof.floor!r} margin={prof.margin()!r}")
    _emit(args, _profile(args, lam, prof.omega))
    return EXIT_OK


def cmd_verify(args):
    results = run_suite(args.suite, args.gamma_grid)
    if args.format == "json":
        text = _json_text([{"name": r.name, "passed": r.passed, "value": r.value,
                            "tolerance": r.tolerance, "detail": r.detail} for r in results])
    else:
        text = "".join(r.line() + "\n" for r in results)
        failed = sum(not r.passed for r in results)
        text += f"{len(results) - failed}/{len(results)} checks passed\n"
    _emit(args, text)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def _scan_point(gamma, J, n, h):
    p = solve_fermi_rapidity(ModelParams(gamma, J, h), n)
    return [h, p.QF, p.ZF, p.pF, p.vF]


SCAN_HEADER = ["h", "q_f", "z_f", "p_f", "v_f"]


def cmd_scan(args):
    g = _gamma(args)
    if not 0.0 < args.h_min < args.h_max:
        raise DomainError("scan needs 0 < --h-min < --h-max")
    if args.log:
        hs = np.geomspace(args.h_min, args.h_max, args.points)
    else:
        hs = np.linspace(args.h_min, args.h_max, args.points)
    ModelParams(g, args.j, args.h_min)  # validate before fanning out
    work = partial(_scan_point, g, args.j, args.n)
    workers = args.workers or min(4, os.cpu_count() or 1)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(work, [float(h) for h in hs]))
    else:
        rows = [work(float(h)) for h in hs]
    if args.format == "json":
        text = _json_text([dict(zip(SCAN_HEADER, map(float, r))) for r in rows])
    else:
        text = _csv_text(SCAN_HEADER, rows)
    _emit(args, text)
    qf = np.array([r[1] for r in rows])
    # Q_F decreases with h and stays at 0 once the chain is polarised
    steps = np.diff(qf)
    monotone = bool(np.all((steps < 0.0) | ((qf[1:] == 0.0) & (steps <= 0.0))))
    if not monotone:
        sys.stderr.write("scan: Q_F is not monotonically decreasing in h\n")
        return EXIT_VERIFY
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def _add_common(p, physics=True, fmt="csv"):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--gamma", type=float, help="anisotropy gamma in radians, 0 < gamma < pi")
    g.add_argument("--delta", type=float, help="anisotropy Delta = cos(gamma), -1 < Delta < 1")
    if physics:
        p.add_argument("--j", type=float, default=1.0, help="exchange coupling J (default 1)")
        p.add_argument("--h", type=float, default=0.0, help="magnetic field h (default 0)")
    p.add_argument("--n", type=_even_int, default=None,
                   help="Gauss-Legendre node count (default: automatic, at least $XXZ_THERMO_N or 128)")
    p.add_argument("--format", choices=("csv", "json"), default=fmt)
    p.add_argument("--out", help="write output to this file instead of stdout")


def _even_int(text):
    n = int(text)
    if n < 2 or n % 2:
        raise argparse.ArgumentTypeError(f"node count must be an even integer >= 2, got {text}")
    return n


def _positive_int(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return n


def build_parser():
    parser = _Parser(prog="xxz-thermo", description="Dressed quantities of the XXZ chain.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", action="store_true", help="print metadata to stderr")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("kernel", help="tabulate K, its Fourier transform, R, G or the bare energy")
    _add_common(p)
    p.add_argument("--which", choices=("K", "fourier", "R", "G", "bare-energy"), default="K")
    p.add_argument("--start", type=float, default=-5.0)
    p.add_argument("--stop", type=float, default=5.0)
    p.add_argument("--points", type=_positive_int, default=101)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("solve", help="dressed function at the quadrature nodes")
    _add_common(p)
    p.add_argument("--quantity", choices=("charge", "density", "energy", "momentum"), required=True)
    p.add_argument("--q", type=float, required=True, help="interval endpoint Q")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("fermi", help="Fermi rapidity and Fermi-point data")
    _add_common(p, fmt="json")
    p.set_defaults(func=cmd_fermi)

    p = sub.add_parser("magnetic", help="endpoint Q_m for a given filling m")
    _add_common(p, physics=False, fmt="json")
    p.add_argument("--m", type=float, required=True, help="filling m in [0, 1/2)")
    p.set_defaults(func=cmd_magnetic)

    p = sub.add_parser("asympt", help="closed-form asymptotic values")
    _add_common(p, fmt="json")
    p.add_argument("--q", type=float, default=3.0, help="Q for the large-Q density")
    p.set_defaults(func=cmd_asympt)

    p = sub.add_parser("bank", help="omega on the other bank")
    _add_common(p)
    p.add_argument("--start", type=float, default=-15.0)
    p.add_argument("--stop", type=float, default=15.0)
    p.add_argument("--points", type=_positive_int, default=201)
    p.set_defaults(func=cmd_bank)

    p = sub.add_parser("verify", help="run the verification suite")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--gamma-grid", type=_positive_int, default=5,
                   help="number of anisotropies for the invariant checks")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", help="Fermi-point data over a range of fields")
    _add_common(p, fmt="csv")
    p.add_argument("--h-min", type=float, required=True)
    p.add_argument("--h-max", type=float, required=True)
    p.add_argument("--points", type=_positive_int, default=20)
    p.add_argument("--log", action="store_true", help="log-spaced fields")
    p.add_argument("--workers", type=_positive_int, default=None)
    p.set_defaults(func=cmd_scan)
    return parser


def _log(args, message):
    if getattr(args, "verbose", False):
        sys.stderr.write(message + "\n")


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
        start = time.perf_counter()
        code = args.func(args)
        _log(args, f"xxz-thermo {__version__} {args.command} finished in {time.perf_counter() - start:.3f}s")
        return code
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except DomainError as exc:
        sys.stderr.write(f"domain error: {exc}\n")
        return EXIT_DOMAIN
    except XXZError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
