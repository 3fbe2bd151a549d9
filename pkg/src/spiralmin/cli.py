"""Command-line interface: ``spiralmin <command> [flags]``.

Exit codes: 0 pass, 1 verification failure or empty/unrealizable
parameters, 2 usage error.
"""

import argparse
import logging
import math
import sys
import time

import numpy as np

from . import io
from .catalog import catalog, lookup, validate_entry
from .errors import EmptyDomain, NoSteadyAngle, SpiralMinError
from .grids import interior_grid
from .profile import ProfileParams, c2_min, find_domain, half_period, integrate_profile
from .product import build, c_totally_real_test
from .verify import identity_suite, steady_check, takahashi_residual

log = logging.getLogger("spiralmin")

COMMANDS = ("catalog", "profile", "steady", "build", "verify", "identities", "sweep")


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(2, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# flag types


def c2_flag(text):
    """``12.5`` or ``autoX`` (X times c2_min)."""
    text = text.strip()
    try:
        if text.startswith("auto"):
            mult = float(text[4:] or "1")
            if not mult > 0:
                raise ValueError
            return ("auto", mult, text)
        val = float(text)
        if not val > 0:
            raise ValueError
        return ("abs", val, text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive number or autoX, got {text!r}")


def positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def immersion_flag(text):
    try:
        return lookup(text)
    except (KeyError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc).strip("'\""))


def resolve_c2(flag, k1, k2, C1):
    kind, val, _ = flag
    if kind == "auto":
        return val * c2_min(k1, k2, C1)[0]
    return val


# ---------------------------------------------------------------------------
# shared pieces


def _params_record(params, flag):
    out = params.to_json()
    out["C2_flag"] = flag[2]
    out["c2_min"] = c2_min(params.k1, params.k2, params.C1)[0]
    return out


def _emit(args, name, report):
    out_dir = io.output_dir(args.out_dir)
    if args.format == "csv":
        flat = _flatten(report)
        path = io.write_csv(out_dir / f"{name}.csv", ["key", "value"], list(flat.items()))
    else:
        path = io.write_json(out_dir / f"{name}.json", report)
    if not args.quiet:
        sys.stdout.write(io.dumps(report))
    log.info("wrote %s", path)
    return path


def _flatten(obj, prefix=""):
    out = {}
    if isinstance(obj, dict):
        for k, v in obj.items():
            out.update(_flatten(v, f"{prefix}{k}."))
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            out.update(_flatten(v, f"{prefix}{i}."))
    else:
        out[prefix[:-1]] = obj
    return out


def product_for(left, right, C1, c2flag, joints, validate=True):
    k1, k2 = left.k, right.k
    params = ProfileParams(k1, k2, C1, resolve_c2(c2flag, k1, k2, C1))
    curve = integrate_profile(params, n_joints=joints)
    return build(left, right, curve, validate=validate)


def joints_per_period(curve):
    """Joints per ``2 pi`` advance of ``s1`` (uses the first two joints)."""
    from .profile import gamma_eval

    if len(curve.joints) < 2:
        return math.nan
    s1 = gamma_eval(curve, np.array(curve.joints[:2])).s1
    return 2.0 * math.pi / abs(float(s1[1] - s1[0]))


def verification_record(prod, args):
    """Residual, identities and (for C1 = -1) the C-totally real test of ``prod``."""
    p = prod.curve.params
    grid = interior_grid(prod, density=args.density, cap=args.cap, kind=args.grid)
    ids = identity_suite(p, n_points=args.identity_points)
    rep = takahashi_residual(prod, args.lam or float(prod.k), grid, step=args.step,
                             outer_step=args.outer_step, tol=args.tol,
                             identities=ids.residuals, identity_tol=args.identity_tol)
    out = rep.to_json()
    ok = rep.passed
    if p.C1 == -1:
        ctr, ctr_ok = c_totally_real_test(prod, grid)
        out["ctr_residual_max"] = ctr
        ok = ok and ctr_ok
    out["pass"] = bool(ok)
    log.info("verification took %.3f s", rep.runtime_seconds)
    return out, ok


# ---------------------------------------------------------------------------
# commands


def cmd_catalog(args):
    entries = [lookup(args.name)] if args.name else list(catalog().values())
    rows, ok = [], True
    for e in entries:
        rec = e.to_json()
        if args.validate:
            vr = validate_entry(e, tol=args.tol)
            rec["validation"] = vr.to_json()
            ok = ok and vr.passed
        rows.append(rec)
    _emit(args, "catalog", {"entries": rows})
    return 0 if ok else 1


def cmd_profile(args):
    C2 = resolve_c2(args.C2, args.k1, args.k2, args.C1)
    params = ProfileParams(args.k1, args.k2, args.C1, C2)
    dom = find_domain(params)
    curve = integrate_profile(params, n_joints=args.joints, t_max=args.t_max, sign=args.sign,
                              sample_dt=args.sample_dt)
    report = {
        "params": _params_record(params, args.C2),
        "domain": dom.to_json(),
        "half_period": half_period(params, dom),
        "joints": list(curve.joints),
        "t_start": curve.t_start,
        "t_end": curve.t_end,
        "joints_per_period": joints_per_period(curve),
    }
    out_dir = io.output_dir(args.out_dir)
    tab = curve.sample_table()
    io.write_csv(out_dir / f"{args.prefix}_samples.csv", tab)
    io.write_csv(out_dir / f"{args.prefix}_plot.csv",
                 {k: tab[k] for k in ("t_arc", "s1", "s2", "a", "b")})
    _emit(args, args.prefix, report)
    return 0


def cmd_steady(args):
    rep = steady_check(args.k1, args.k2, C1=args.C1, s=args.s, tol=args.tol)
    _emit(args, "steady", rep.to_json())
    return 0 if rep.passed else 1


def cmd_build(args):
    prod = product_for(args.left, args.right, args.C1, args.C2, args.joints)
    rec = prod.to_json()
    rec["curve"]["params"]["C2_flag"] = args.C2[2]
    res, ok = c_totally_real_test(prod, density=args.density)
    rec["ctr_residual_max"] = res
    rec["ctr_pass"] = bool(ok)
    _emit(args, "build", rec)
    return 0


def cmd_verify(args):
    if args.right is None:
        grid = interior_grid(args.left, density=args.density, cap=args.cap, kind=args.grid)
        lam = args.lam or args.left.claimed_eigenvalue
        rep = takahashi_residual(args.left, lam, grid, step=args.step, outer_step=args.outer_step,
                                 tol=args.tol)
        _emit(args, "verify", rep.to_json())
        return 0 if rep.passed else 1
    if args.C1 is None or args.C2 is None:
        raise UsageError("--C1 and --C2 are required with --right")
    prod = product_for(args.left, args.right, args.C1, args.C2, args.joints)
    out, ok = verification_record(prod, args)
    out["params"] = _params_record(prod.curve.params, args.C2)
    _emit(args, "verify", out)
    return 0 if ok else 1


def cmd_identities(args):
    C2 = resolve_c2(args.C2, args.k1, args.k2, args.C1)
    params = ProfileParams(args.k1, args.k2, args.C1, C2)
    rep = identity_suite(params, n_points=args.n_points, sign=args.sign, tol=args.tol)
    out_dir = io.output_dir(args.out_dir)
    io.write_csv(out_dir / "identities_terms.csv", rep.terms.columns())
    report = rep.to_json()
    report["params"] = _params_record(params, args.C2)
    _emit(args, "identities", report)
    return 0 if rep.passed else 1


SWEEP_COLUMNS = ["k1", "k2", "C1", "C2_multiplier", "C2", "status", "domain_width",
                 "joints_per_period", "residual_max", "eigen_estimate"]


def sweep_rows(args):
    rows = []
    for C1 in args.C1_list:
        for mult in args.C2_mults:
            k1, k2 = args.left.k, args.right.k
            row = {"k1": k1, "k2": k2, "C1": C1, "C2_multiplier": mult, "C2": math.nan,
                   "status": "ok", "domain_width": math.nan, "joints_per_period": math.nan,
                   "residual_max": math.nan, "eigen_estimate": math.nan}
            try:
                flag = ("auto", mult, f"auto{mult:g}")
                row["C2"] = resolve_c2(flag, k1, k2, C1)
                row["domain_width"] = find_domain(ProfileParams(k1, k2, C1, row["C2"])).width
                prod = product_for(args.left, args.right, C1, flag, args.joints)
                row["joints_per_period"] = joints_per_period(prod.curve)
                if not args.no_residual:
                    rec, ok = verification_record(prod, args)
                    row["residual_max"] = rec["residual_max"]
                    row["eigen_estimate"] = rec["eigen_estimate"]
                    if not ok:
                        row["status"] = "fail"
            except SpiralMinError as exc:
                row["status"] = type(exc).__name__
            rows.append(row)
    return rows


def cmd_sweep(args):
    rows = sweep_rows(args)
    out_dir = io.output_dir(args.out_dir)
    path = io.write_csv(out_dir / "sweep.csv", SWEEP_COLUMNS,
                        [[r[c] for c in SWEEP_COLUMNS] for r in rows])
    if not args.quiet:
        sys.stdout.write(path.read_text())
    return 0


# ---------------------------------------------------------------------------
# parser


def _common(p):
    p.add_argument("--out-dir", default=None,
                   help=f"output directory (default ${io.OUTPUT_ENV} or the working directory)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--quiet", action="store_true", help="do not echo the report to stdout")
    p.add_argument("-v", "--verbose", action="store_true")


def _profile_flags(p, integer_dims=True, c2_required=True):
    dim = positive_int if integer_dims else positive_float
    p.add_argument("--k1", type=dim, required=True)
    p.add_argument("--k2", type=dim, required=True)
    p.add_argument("--C1", type=float, required=True)
    p.add_argument("--C2", type=c2_flag, required=c2_required, help="number or autoX")


def _grid_flags(p):
    p.add_argument("--density", type=positive_int, default=10)
    p.add_argument("--cap", type=positive_int, default=2000)
    p.add_argument("--grid", choices=("halton", "tensor"), default="halton")
    p.add_argument("--step", type=positive_float, default=1e-3)
    p.add_argument("--outer-step", type=positive_float, default=3e-3)
    p.add_argument("--tol", type=positive_float, default=1e-4)
    p.add_argument("--identity-tol", type=positive_float, default=1e-8)
    p.add_argument("--identity-points", type=positive_int, default=1000)
    p.add_argument("--lambda", dest="lam", type=positive_float, default=None,
                   help="expected eigenvalue (default: the dimension)")


def make_parser():
    parser = Parser(prog="spiralmin", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)

    p = sub.add_parser("catalog", help="list (and optionally validate) catalog immersions")
    p.add_argument("--name", type=str, default=None)
    p.add_argument("--validate", action="store_true")
    p.add_argument("--tol", type=positive_float, default=1e-5)
    _common(p)

    p = sub.add_parser("profile", help="integrate a profile curve")
    _profile_flags(p)
    p.add_argument("--joints", type=int, default=2)
    p.add_argument("--t-max", type=positive_float, default=None)
    p.add_argument("--sign", type=int, choices=(1, -1), default=1)
    p.add_argument("--sample-dt", type=positive_float, default=0.005)
    p.add_argument("--prefix", default="profile")
    _common(p)

    p = sub.add_parser("steady", help="steady-magnitude check")
    p.add_argument("--k1", type=positive_int, required=True)
    p.add_argument("--k2", type=positive_int, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--C1", type=float)
    g.add_argument("--s", type=float)
    p.add_argument("--tol", type=positive_float, default=1e-9)
    _common(p)

    for name, helptext in (("build", "build a spiral product"),
                           ("verify", "verify a catalog entry or spiral product")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--left", type=immersion_flag, required=True)
        p.add_argument("--right", type=immersion_flag, required=(name == "build"))
        p.add_argument("--C1", type=float, required=(name == "build"))
        p.add_argument("--C2", type=c2_flag, required=(name == "build"), help="number or autoX")
        p.add_argument("--joints", type=int, default=2)
        if name == "verify":
            _grid_flags(p)
        else:
            p.add_argument("--density", type=positive_int, default=6)
        _common(p)

    p = sub.add_parser("identities", help="closed-form identity suite")
    _profile_flags(p, integer_dims=False)
    p.add_argument("--n-points", type=positive_int, default=1000)
    p.add_argument("--sign", type=int, choices=(1, -1), default=1)
    p.add_argument("--tol", type=positive_float, default=1e-8)
    _common(p)

    p = sub.add_parser("sweep", help="sweep C1 and C2 multipliers")
    p.add_argument("--left", type=immersion_flag, default=lookup("legendrian_circle"))
    p.add_argument("--right", type=immersion_flag, default=lookup("legendrian_circle"))
    p.add_argument("--C1", dest="C1_list", type=float_list, default=[-1.0])
    p.add_argument("--C2-mult", dest="C2_mults", type=float_list, default=[1.05, 1.25, 2.0, 10.0])
    p.add_argument("--joints", type=int, default=2)
    p.add_argument("--no-residual", action="store_true")
    _grid_flags(p)
    _common(p)
    return parser


HANDLERS = {
    "catalog": cmd_catalog, "profile": cmd_profile, "steady": cmd_steady, "build": cmd_build,
    "verify": cmd_verify, "identities": cmd_identities, "sweep": cmd_sweep,
}


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    if getattr(args, "joints", 0) < 0:
        parser.error("argument --joints: must be nonnegative")
    t0 = time.perf_counter()
    try:
        code = HANDLERS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except (EmptyDomain, NoSteadyAngle) as exc:
        print(f"spiralmin: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except SpiralMinError as exc:
        print(f"spiralmin: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    log.info("%s finished in %.3f s", args.command, time.perf_counter() - t0)
    return code


if __name__ == "__main__":
    sys.exit(main())
