"""Command-line front end.

Every subcommand streams records to stdout as CSV (header
``inputs...,value,route,abs_error,status``) or as a JSON array.  Floats are
written with 17 significant digits; diagnostics go to stderr.

Exit codes: 0 ok, 2 argument error, 3 domain error, 4 non-convergence,
5 verification failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Dict, Iterable, Iterator, List, Optional

import numpy as np

from . import gdd, moments, sampler, stein, verify, vg as vgmod
from .errors import ConvergenceError, DomainError
from .gdd import GddParams

EXIT_OK = 0
EXIT_ARGS = 2
EXIT_DOMAIN = 3
EXIT_NONCONV = 4
EXIT_VERIFY = 5

SAMPLE_CHUNK = 1 << 16


def fmt_float(v) -> str:
    """17 significant digits; enough to round-trip any double."""
    return "%.17g" % float(v)


def _diag(msg: str) -> None:
    print(f"gammadiff: {msg}", file=sys.stderr)


# ---------------------------------------------------------------------------
# argument types
# ---------------------------------------------------------------------------


def finite_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return v


def count(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return v


def order(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {text!r}")
    return v


def seed_int(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits: {text!r}")
    return v


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting, so run() can return codes."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sub = self.prog.partition(" ")[2]
        raise _ArgError(f"{sub}: {message}" if sub else message)


class _ArgError(Exception):
    pass


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


class RecordWriter:
    """Streams records; the columns are fixed by the first record."""

    def __init__(self, stream, fmt: str):
        self.stream = stream
        self.fmt = fmt
        self.columns: Optional[List[str]] = None
        self.n = 0
        self.statuses: Dict[str, int] = {}

    @staticmethod
    def _cell(v) -> str:
        if v is None:
            return ""
        if isinstance(v, (bool, np.bool_)):
            return "true" if v else "false"
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        if isinstance(v, (float, np.floating)):
            return fmt_float(v)
        s = str(v)
        if any(c in s for c in ',"\n'):
            s = '"' + s.replace('"', '""') + '"'
        return s

    @staticmethod
    def _json(v) -> str:
        if v is None:
            return "null"
        if isinstance(v, (bool, np.bool_)):
            return "true" if v else "false"
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        if isinstance(v, (float, np.floating)):
            return fmt_float(v) if math.isfinite(v) else "null"
        return json.dumps(str(v))

    def write(self, inputs: Dict, value, route: str, abs_error, status: str):
        rec = dict(inputs)
        rec.update(value=value, route=route, abs_error=abs_error, status=status)
        self.statuses[status] = self.statuses.get(status, 0) + 1
        if self.columns is None:
            self.columns = list(rec)
            if self.fmt == "csv":
                self.stream.write(",".join(self.columns) + "\n")
            else:
                self.stream.write("[\n")
        if self.fmt == "csv":
            self.stream.write(",".join(self._cell(rec.get(c)) for c in self.columns) + "\n")
        else:
            body = ", ".join(f"{json.dumps(c)}: {self._json(rec.get(c))}" for c in self.columns)
            self.stream.write(("" if self.n == 0 else ",\n") + "{" + body + "}")
        self.n += 1
        self.stream.flush()

    def close(self):
        if self.fmt == "json":
            self.stream.write("[]\n" if self.n == 0 else "\n]\n")
        self.stream.flush()

    def exit_code(self) -> int:
        if self.statuses.get("domain_error"):
            return EXIT_DOMAIN
        if self.statuses.get("non_converged"):
            return EXIT_NONCONV
        return EXIT_OK


def _params_inputs(p: GddParams) -> Dict:
    return {"alpha1": p.alpha1, "beta1": p.beta1, "alpha2": p.alpha2, "beta2": p.beta2}


def _emit_special(w: RecordWriter, inputs: Dict, route: str, fn):
    """Evaluate fn() -> object with value/abs_error_estimate/converged and write it."""
    try:
        r = fn()
    except DomainError as exc:
        _diag(f"{inputs}: {exc}")
        w.write(inputs, math.nan, route, None, "domain_error")
        return
    except ConvergenceError as exc:
        _diag(f"{inputs}: {exc}")
        w.write(inputs, math.nan, route, None, "non_converged")
        return
    value = float(r.value)
    ok = bool(getattr(r, "converged", True)) and math.isfinite(value)
    w.write(inputs, value, route, getattr(r, "abs_error_estimate", None), "ok" if ok else "non_converged")


def _grid(args, name="x") -> np.ndarray:
    single = getattr(args, name)
    lo = getattr(args, f"{name}_min")
    hi = getattr(args, f"{name}_max")
    if single is not None:
        if lo is not None or hi is not None:
            raise _ArgError(f"--{name} cannot be combined with --{name}-min/--{name}-max")
        return np.asarray(single, dtype=float)
    if lo is None or hi is None:
        raise _ArgError(f"give --{name} or both --{name}-min and --{name}-max")
    if hi < lo:
        raise _ArgError(f"--{name}-max must be >= --{name}-min")
    return np.linspace(lo, hi, args.n)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_pdf(args, w):
    p = _gdd_params(args)
    for x in _grid(args):
        inputs = {**_params_inputs(p), "x": float(x)}
        _emit_special(w, inputs, args.route, lambda x=x: gdd.pdf(p, float(x), args.route))


def cmd_cdf(args, w):
    p = _gdd_params(args)
    if args.route != "tricomi":
        _diag(f"cdf integrates the tricomi density; --route {args.route} is ignored")
    for x in _grid(args):
        inputs = {**_params_inputs(p), "x": float(x)}
        _emit_special(w, inputs, "quadrature", lambda x=x: gdd.cdf(p, float(x)))


def cmd_charfn(args, w):
    p = _gdd_params(args)
    for t in _grid(args, "t"):
        phi = complex(gdd.char_fn(p, float(t)))
        for part, v in (("re", phi.real), ("im", phi.imag)):
            w.write({**_params_inputs(p), "t": float(t), "part": part}, v, "closed_form", None, "ok")


MOMENT_ROUTES = {
    "recurrence": lambda p, k: moments.moments_recurrence(p, k)[k],
    "closed": lambda p, k: moments.moment_closed_form(p, k, "first"),
    "closed_second": lambda p, k: moments.moment_closed_form(p, k, "second"),
    "binomial": lambda p, k: moments.moment_binomial_oracle(p, k),
    "quadrature": lambda p, k: moments.moment_quadrature(p, k),
}


def _moment_rows(w, inputs_base, k_max, routes, fns):
    for k in range(k_max + 1):
        for name in routes:
            inputs = {**inputs_base, "k": k}
            _emit_special(w, inputs, name, lambda k=k, name=name: fns[name](k))


def cmd_moments(args, w):
    p = _gdd_params(args)
    if args.route == "all":
        routes = ["recurrence", "closed", "closed_second", "binomial"]
    else:
        routes = [args.route]
    rec = moments.moments_recurrence(p, args.k_max)
    fns = {name: (lambda k, f=f: f(p, k)) for name, f in MOMENT_ROUTES.items()}
    fns["recurrence"] = lambda k: rec[k]
    _moment_rows(w, _params_inputs(p), args.k_max, routes, fns)


ABS_ROUTES = {
    "closed_form": moments.abs_moment,
    "connection": moments.abs_moment_connection_form,
    "quadrature": moments.abs_moment_quadrature,
}


def cmd_absmoment(args, w):
    p = _gdd_params(args)
    routes = list(ABS_ROUTES) if args.route == "all" else [args.route]
    for b in args.b:
        for name in routes:
            inputs = {**_params_inputs(p), "b": b}
            _emit_special(w, inputs, name, lambda b=b, name=name: ABS_ROUTES[name](p, b))


def cmd_pvmoment(args, w):
    p = _gdd_params(args)
    fns = {"delta_limit": moments.pv_inverse_moment, "eps_limit": moments.pv_inverse_moment_eps}
    routes = list(fns) if args.route == "all" else [args.route]
    for name in routes:
        _emit_special(w, _params_inputs(p), name, lambda name=name: fns[name](p))


def _battery(name):
    return list(stein.BATTERY.items()) if name == "all" else [(name, stein.BATTERY[name])]


def _emit_stein(w, inputs, check):
    try:
        r = check()
    except DomainError as exc:
        _diag(f"{inputs}: {exc}")
        w.write({**inputs, "scale": math.nan}, math.nan, "quadrature", None, "domain_error")
        return
    ok = r.converged and math.isfinite(r.value)
    w.write({**inputs, "scale": r.scale}, r.value, "quadrature", r.abs_error_estimate,
            "ok" if ok else "non_converged")


def cmd_stein(args, w):
    p = _gdd_params(args)
    for name, tf in _battery(args.g):
        _emit_stein(w, {**_params_inputs(p), "g": name}, lambda tf=tf: stein.stein_check(p, tf))


def _emit_ode(w, inputs, check):
    try:
        r = check()
    except DomainError as exc:
        _diag(f"{inputs}: {exc}")
        w.write(inputs, math.nan, "finite_difference", None, "domain_error")
        return
    w.write(inputs, r.scaled, "finite_difference", None, "ok" if math.isfinite(r.scaled) else "non_converged")


def cmd_odecheck(args, w):
    p = _gdd_params(args)
    for x in np.linspace(args.x_min, args.x_max, args.n):
        _emit_ode(w, {**_params_inputs(p), "x": float(x)}, lambda x=x: stein.ode_check(p, float(x)))


def cmd_vg(args, w):
    v = vgmod.VgParams(args.r, args.theta, args.sigma)
    base = {"r": v.r, "theta": v.theta, "sigma": v.sigma}
    act = args.action
    if act == "map":
        q = vgmod.to_gdd(v)
        for name, val in _params_inputs(q).items():
            w.write({**base, "quantity": name}, val, "to_gdd", None, "ok")
    elif act == "pdf":
        for x in _grid(args):
            _emit_special(w, {**base, "x": float(x)}, "bessel_k", lambda x=x: vgmod.vg_pdf(v, float(x)))
    elif act == "moments":
        routes = ["recurrence", "closed_form", "gdd"] if args.route == "all" else [args.route]
        tables = {r: vgmod.vg_moments(v, args.k_max, r) for r in routes}
        fns = {r: (lambda k, r=r: tables[r][k]) for r in routes}
        _moment_rows(w, base, args.k_max, routes, fns)
    elif act == "absmoment":
        if args.b is None:
            raise _ArgError("vg absmoment needs --b (the moment is E|Y|^(b-1))")
        for b in args.b:
            _emit_special(w, {**base, "b": b}, "closed_form", lambda b=b: vgmod.vg_abs_moment(v, b - 1.0))
    elif act == "stein":
        for name, tf in _battery(args.g):
            _emit_stein(w, {**base, "g": name}, lambda tf=tf: vgmod.vg_stein_check(v, tf))
    elif act == "odecheck":
        lo = 0.1 if args.x_min is None else args.x_min
        hi = 5.0 if args.x_max is None else args.x_max
        for x in np.linspace(lo, hi, args.n):
            _emit_ode(w, {**base, "x": float(x)}, lambda x=x: vgmod.vg_ode_check(v, float(x)))


def cmd_sample(args, w):
    state = sampler.SamplerState(args.seed, args.position)
    if args.law == "gdd":
        target = _gdd_params(args)
        base = _params_inputs(target)
        draw = lambda m: sampler.sample_gdd(state, target, m)  # noqa: E731
        route = "difference"
    else:
        if args.r is None or args.theta is None or args.sigma is None:
            raise _ArgError("--law vg needs --r, --theta and --sigma")
        target = vgmod.VgParams(args.r, args.theta, args.sigma)
        base = {"r": target.r, "theta": target.theta, "sigma": target.sigma}
        draw = lambda m: sampler.sample_vg(state, target, m, args.vg_route)  # noqa: E731
        route = args.vg_route
    done = 0
    while done < args.n:
        m = min(SAMPLE_CHUNK, args.n - done)
        for i, x in enumerate(draw(m)):
            w.write({**base, "seed": args.seed, "index": done + i}, float(x), route, None, "ok")
        done += m


def cmd_verify(args, w):
    p = _gdd_params(args)
    scale = 1e-30 if args.corrupt_tolerance else args.tol_scale
    failed = 0
    for c in verify.iter_checks(p, scale, quick=args.quick):
        status = "ok" if c.passed else "failed"
        if not c.passed:
            failed += 1
            _diag(f"FAIL {c.name}: error {c.error:.3e} > tolerance {c.tolerance:.3e} {c.detail}".rstrip())
        w.write({**_params_inputs(p), "check": c.name, "tolerance": c.tolerance}, c.error,
                "cross_route", None, status)
    if failed:
        _diag(f"{failed} check(s) failed")
        return EXIT_VERIFY
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _gdd_params(args) -> GddParams:
    missing = [n for n in ("alpha1", "beta1", "alpha2", "beta2") if getattr(args, n, None) is None]
    if missing:
        raise _ArgError("missing " + ", ".join("--" + m for m in missing))
    return GddParams(args.alpha1, args.beta1, args.alpha2, args.beta2)


def _add_params(sp, required=True):
    for n in ("alpha1", "beta1", "alpha2", "beta2"):
        sp.add_argument(f"--{n}", type=finite_float, required=required)


def _add_format(sp):
    sp.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_grid(sp, name="x", n_default=None):
    sp.add_argument(f"--{name}", type=finite_float, nargs="+", default=None)
    sp.add_argument(f"--{name}-min", type=finite_float, default=None)
    sp.add_argument(f"--{name}-max", type=finite_float, default=None)
    sp.add_argument("--n", type=count, default=n_default or 11)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="gammadiff", description="Gamma difference distribution toolkit.")
    sub = ap.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    sp = sub.add_parser("pdf", help="density")
    _add_params(sp)
    _add_grid(sp)
    sp.add_argument("--route", choices=gdd.ROUTES, default="tricomi")
    _add_format(sp)
    sp.set_defaults(func=cmd_pdf)

    sp = sub.add_parser("cdf", help="distribution function")
    _add_params(sp)
    _add_grid(sp)
    sp.add_argument("--route", choices=gdd.ROUTES, default="tricomi")
    _add_format(sp)
    sp.set_defaults(func=cmd_cdf)

    sp = sub.add_parser("charfn", help="characteristic function (real and imaginary parts)")
    _add_params(sp)
    _add_grid(sp, "t")
    _add_format(sp)
    sp.set_defaults(func=cmd_charfn)

    sp = sub.add_parser("moments", help="integer moments")
    _add_params(sp)
    sp.add_argument("--k-max", type=order, required=True)
    sp.add_argument("--route", choices=tuple(MOMENT_ROUTES) + ("all",), default="recurrence")
    _add_format(sp)
    sp.set_defaults(func=cmd_moments)

    sp = sub.add_parser("absmoment", help="absolute moment E|X|^(b-1)")
    _add_params(sp)
    sp.add_argument("--b", type=finite_float, nargs="+", required=True)
    sp.add_argument("--route", choices=tuple(ABS_ROUTES) + ("all",), default="closed_form")
    _add_format(sp)
    sp.set_defaults(func=cmd_absmoment)

    sp = sub.add_parser("pvmoment", help="principal value E(1/X)")
    _add_params(sp)
    sp.add_argument("--route", choices=("delta_limit", "eps_limit", "all"), default="all")
    _add_format(sp)
    sp.set_defaults(func=cmd_pvmoment)

    sp = sub.add_parser("stein", help="Stein identity expectation")
    _add_params(sp)
    sp.add_argument("--g", choices=tuple(stein.BATTERY) + ("all",), default="all")
    _add_format(sp)
    sp.set_defaults(func=cmd_stein)

    sp = sub.add_parser("odecheck", help="scaled residuals of the density ODE")
    _add_params(sp)
    sp.add_argument("--x-min", type=finite_float, default=0.1)
    sp.add_argument("--x-max", type=finite_float, default=5.0)
    sp.add_argument("--n", type=count, default=8)
    _add_format(sp)
    sp.set_defaults(func=cmd_odecheck)

    sp = sub.add_parser("vg", help="variance gamma law")
    sp.add_argument("action", choices=("pdf", "moments", "absmoment", "stein", "odecheck", "map"))
    sp.add_argument("--r", type=finite_float, required=True)
    sp.add_argument("--theta", type=finite_float, required=True)
    sp.add_argument("--sigma", type=finite_float, required=True)
    _add_grid(sp, n_default=8)
    sp.add_argument("--k-max", type=order, default=4)
    sp.add_argument("--b", type=finite_float, nargs="+", default=None)
    sp.add_argument("--g", choices=tuple(stein.BATTERY) + ("all",), default="all")
    sp.add_argument("--route", choices=("recurrence", "closed_form", "gdd", "all"), default="recurrence")
    _add_format(sp)
    sp.set_defaults(func=cmd_vg)

    sp = sub.add_parser("sample", help="random variates")
    _add_params(sp, required=False)
    sp.add_argument("--law", choices=("gdd", "vg"), default="gdd")
    sp.add_argument("--r", type=finite_float, default=None)
    sp.add_argument("--theta", type=finite_float, default=None)
    sp.add_argument("--sigma", type=finite_float, default=None)
    sp.add_argument("--vg-route", choices=("mixture", "difference"), default="mixture")
    sp.add_argument("--n", type=count, required=True)
    sp.add_argument("--seed", type=seed_int, required=True)
    sp.add_argument("--position", type=order, default=0, help="stream position to start from")
    _add_format(sp)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("verify", help="cross-route verification suite")
    _add_params(sp)
    sp.add_argument("--tol-scale", type=finite_float, default=1.0, help="multiplier on every tolerance")
    sp.add_argument("--corrupt-tolerance", action="store_true",
                    help="shrink every tolerance to 1e-30 times its value, forcing failures")
    sp.add_argument("--quick", action="store_true", help="skip quadrature-heavy checks")
    _add_format(sp)
    sp.set_defaults(func=cmd_verify)
    return ap


def _check_env():
    env = os.environ.get("GDD_DEFAULT_TOL")
    if env is None or env == "":
        return
    try:
        v = float(env)
    except ValueError:
        raise _ArgError(f"GDD_DEFAULT_TOL is not a number: {env!r}")
    if not (math.isfinite(v) and v > 0):
        raise _ArgError(f"GDD_DEFAULT_TOL must be positive and finite: {env!r}")


def run(argv: Optional[Iterable[str]] = None, stdout=None) -> int:
    out = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        _check_env()
        args = parser.parse_args(None if argv is None else list(argv))
        if getattr(args, "tol_scale", 1.0) <= 0:
            raise _ArgError("--tol-scale must be > 0")
    except _ArgError as exc:
        _diag(str(exc))
        return EXIT_ARGS
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_ARGS

    w = RecordWriter(out, args.format)
    try:
        code = args.func(args, w)
    except _ArgError as exc:
        _diag(str(exc))
        return EXIT_ARGS
    except DomainError as exc:
        _diag(f"domain error: {exc}")
        return EXIT_DOMAIN
    except ConvergenceError as exc:
        _diag(f"non-convergence: {exc}")
        return EXIT_NONCONV
    finally:
        if w.n:
            w.close()
    if w.n == 0:
        w.close()
    return code if code else w.exit_code()


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
