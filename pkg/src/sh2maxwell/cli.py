"""Command-line front end.

Exit codes: 0 success, 1 a verification ran but failed, 2 input or domain
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import elliptic, extremal, frame, maxwell, symmetry
from .extremal import Covector, CylinderError, IntegrationError

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_NUMERIC = 3
RENORMALIZE_TOL = 1e-6
DEFAULT_T_MAX = 50.0


class InputError(ValueError):
    pass


def _floats(text: str, n: int, flag: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"{flag} expects {n} comma-separated numbers, got {text!r}") from None
    if len(vals) != n or not all(math.isfinite(v) for v in vals):
        raise InputError(f"{flag} expects {n} finite comma-separated numbers, got {text!r}")
    return vals


def read_covector(args) -> Covector:
    """Covector from --h or --pendulum; near-cylinder input is renormalised."""
    if args.h is not None and args.pendulum is not None:
        raise InputError("give exactly one of --h and --pendulum")
    if args.pendulum is not None:
        gamma, c = _floats(args.pendulum, 2, "--pendulum")
        return Covector.from_pendulum(gamma, c)
    if args.h is None:
        raise InputError("a covector is required: --h h1,h2,h3 or --pendulum gamma,c")
    h1, h2, h3 = _floats(args.h, 3, "--h")
    defect = h1 * h1 + h2 * h2 - 1.0
    if abs(defect) >= RENORMALIZE_TOL:
        raise InputError(f"covector ({h1}, {h2}, {h3}) is off the cylinder h1^2 + h2^2 = 1 (defect {defect:.3e})")
    if defect != 0.0:
        norm = math.hypot(h1, h2)
        h1, h2 = h1 / norm, h2 / norm
    return Covector(h1, h2, h3)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_classify(args) -> int:
    h = read_covector(args)
    p = extremal.to_pendulum(h)
    stratum = extremal.classify(h, eps_E=args.eps_e)
    report = {
        "h": list(h.as_tuple()),
        "energy": extremal.energy(h),
        "gamma": p.gamma,
        "c": p.c,
        "stratum": str(stratum),
        "eps_E": args.eps_e,
    }
    if args.format == "json":
        _emit(_json(report), args.out)
    else:
        lines = [f"{key}={report[key]!r}" for key in ("energy", "gamma", "c")]
        _emit("\n".join([*lines, f"stratum={stratum}"]) + "\n", args.out)
    return EXIT_OK


def cmd_integrate(args) -> int:
    h = read_covector(args)
    if args.tmax < 0:
        raise InputError("--tmax must be >= 0")
    traj = extremal.integrate_extremal(h, args.tmax, dt=args.dt, rtol=args.rtol, atol=args.rtol,
                                       method=args.method)
    extra = {}
    if args.symmetry is not None:
        image = symmetry.map_geodesic(traj, args.symmetry)
        extra = {"xs": image.q[:, 0], "ys": image.q[:, 1], "zs": image.q[:, 2]}
    if args.format == "json":
        payload = {
            "config": {"h": list(h.as_tuple()), "tmax": args.tmax, "dt": args.dt, "rtol": args.rtol,
                       "method": args.method, "symmetry": args.symmetry},
            "columns": ["t", "x", "y", "z", "h1", "h2", "h3", *extra],
            "rows": np.column_stack([traj.t, traj.q, traj.h, *extra.values()]).tolist(),
        }
        _emit(_json(payload), args.out)
    else:
        _emit(traj.to_csv(extra), args.out)
    return EXIT_OK


def cmd_maxwell(args) -> int:
    h = read_covector(args)
    search = dict(t_max=args.tmax, t_min=args.tmin, tol=args.tol, dt=args.dt)
    closed = maxwell.first_maxwell_time(h, k0=args.k0, **search)
    if closed.method == "numeric-search":
        verdict = closed
    else:
        verdict = maxwell.merge_verdicts(closed, maxwell.numeric_maxwell_search(h, **search))
    payload = verdict.to_dict()
    payload["config"] = {"h": list(h.as_tuple()), "k0": args.k0, **search}
    _emit(_json(payload), args.out)
    return EXIT_OK


def cmd_gscan(args) -> int:
    scan = maxwell.g_scan(args.kmin, args.kmax, args.n)
    report = maxwell.find_k0()
    if args.format == "json":
        payload = {
            "config": {"kmin": args.kmin, "kmax": args.kmax, "n": args.n},
            "rows": [vars(r) for r in scan.rows],
            "summary": scan.summary(),
            "root_report": report.to_dict(),
        }
        _emit(_json(payload), args.out)
    else:
        _emit(f"# find_k0: {report.message}\n" + scan.to_csv(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    kwargs = dict(mode=args.mode, threshold=args.threshold, n=args.samples, seed=args.seed)
    if args.field:
        try:
            fields = [symmetry.parse_field(args.field)]
        except symmetry.FieldParseError as exc:
            raise InputError(str(exc)) from None
        table = None
    else:
        fields = list(symmetry.GENERATORS.values())
        table = symmetry.bracket_table(seed=args.seed, mode=args.mode)
    reports = [symmetry.verify_symmetry(v, **kwargs) for v in fields]
    ok = all(r.passed for r in reports)
    payload = {
        "config": {"mode": args.mode, "threshold": args.threshold, "samples": args.samples,
                   "seed": args.seed, "box": list(symmetry.DEFAULT_BOX)},
        "reports": [r.to_dict() for r in reports],
    }
    if table is not None:
        payload["brackets"] = table.to_dict()
        ok = ok and table.residual < args.threshold
    payload["pass"] = ok
    _emit(_json(payload), args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_brackets(args) -> int:
    pts = symmetry.sample_points(args.samples, seed=args.seed)
    expected = {
        ("X1", "X2"): lambda p: frame.X3(*p),
        ("X2", "X3"): lambda p: -frame.X1(*p),
        ("X1", "X3"): lambda p: np.zeros(3),
    }
    fields = {"X1": frame.X1, "X2": frame.X2, "X3": frame.X3}
    frame_res = {}
    for (a, b), target in expected.items():
        frame_res[f"[{a},{b}]"] = max(
            float(np.max(np.abs(frame.lie_bracket(fields[a], fields[b], p, args.mode).as_array() - target(p))))
            for p in pts
        )
    ranks = sorted({frame.lie_rank(p) for p in pts})
    table = symmetry.bracket_table(seed=args.seed, mode=args.mode)
    payload = {
        "config": {"mode": args.mode, "samples": args.samples, "seed": args.seed},
        "frame": {"residuals": frame_res, "lie_ranks": ranks},
        "symmetry": table.to_dict(),
    }
    _emit(_json(payload), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(
        prog="sh2maxwell",
        description="Extremals, symmetries and Maxwell points of the sub-Riemannian problem on SH(2).",
        formatter_class=fmt,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def covector_opts(p):
        p.add_argument("--h", metavar="H1,H2,H3", help="initial covector (use --h=-1,0,0 for negative entries)")
        p.add_argument("--pendulum", metavar="GAMMA,C", help="initial covector in pendulum coordinates")

    def output_opts(p, formats=("csv", "json"), default="csv"):
        p.add_argument("--format", choices=formats, default=default)
        p.add_argument("--out", metavar="PATH", help="write to PATH instead of stdout")

    p = sub.add_parser("classify", help="energy, pendulum coordinates and stratum", formatter_class=fmt)
    covector_opts(p)
    p.add_argument("--eps-e", type=float, default=extremal.EPS_E, help="stratum boundary tolerance")
    output_opts(p, ("text", "json"), "text")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("integrate", help="integrate a normal extremal to CSV", formatter_class=fmt)
    covector_opts(p)
    p.add_argument("--tmax", type=float, default=DEFAULT_T_MAX)
    p.add_argument("--dt", type=float, default=extremal.DEFAULT_SAMPLE_DT, help="sample spacing")
    p.add_argument("--rtol", type=float, default=extremal.DEFAULT_RTOL, help="adaptive tolerance (rel = abs)")
    p.add_argument("--method", choices=("dp45", "rk4"), default="dp45")
    p.add_argument("--symmetry", type=float, metavar="S", help="append boost-image columns xs,ys,zs")
    output_opts(p)
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("maxwell", help="first Maxwell time and returns to S (JSON)", formatter_class=fmt)
    covector_opts(p)
    p.add_argument("--tmax", type=float, default=maxwell.DEFAULT_T_MAX)
    p.add_argument("--tmin", type=float, default=maxwell.DEFAULT_T_MIN)
    p.add_argument("--tol", type=float, default=maxwell.DEFAULT_TOL, help="distance to S counted as a hit")
    p.add_argument("--dt", type=float, default=extremal.DEFAULT_SAMPLE_DT)
    p.add_argument("--k0", type=float, help="modulus used for the C2 closed form")
    output_opts(p, ("json",), "json")
    p.set_defaults(func=cmd_maxwell)

    p = sub.add_parser("gscan", help="tabulate g(k), g'(k) and kK(k)", formatter_class=fmt)
    p.add_argument("--kmin", type=float, default=0.0)
    p.add_argument("--kmax", type=float, default=0.99)
    p.add_argument("--n", type=int, default=100)
    output_opts(p)
    p.set_defaults(func=cmd_gscan)

    p = sub.add_parser("verify", help="check the symmetry conditions for v1, v2, v3", formatter_class=fmt)
    p.add_argument("--threshold", type=float, default=symmetry.DEFAULT_THRESHOLD)
    p.add_argument("--mode", choices=("fd", "analytic"), default="fd")
    p.add_argument("--samples", type=int, default=symmetry.DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=symmetry.DEFAULT_SEED)
    p.add_argument("--field", help='user field, e.g. "x*dx" or "-y*dx - x*dy - dz"')
    output_opts(p, ("json",), "json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("brackets", help="frame and symmetry bracket tables", formatter_class=fmt)
    p.add_argument("--mode", choices=("fd", "analytic"), default="fd")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=symmetry.DEFAULT_SEED)
    output_opts(p, ("json",), "json")
    p.set_defaults(func=cmd_brackets)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, CylinderError, elliptic.EllipticDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except IntegrationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
