"""Command-line front end: ``itx eval-kernel | forward | invert | verify``.

Exit codes: 0 success, 1 verification failure, 2 usage or precondition
error, 3 numerical failure. Numbers are written with 17 significant digits.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import specfun, transforms, verify
from .curves import SampledCurve
from .errors import NumericalError, PreconditionError
from .functions import IndexFunction, by_name
from .quadrature import OUTER_CFG, QuadratureConfig
from .transforms import TransformParams

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

KINDS = ("whittaker-sq", "macdonald", "phi", "inv-mu0", "gauss2f1")
DEFAULTS = {
    "mu": 0.0,
    "tau": 1.0,
    "delta": 0.5,
    "gamma": None,
    "grid": None,
    "f": "f1",
    "route": "composed",
    "suite": "all",
    "out": None,
    "format": None,
    "abs_tol": None,
    "rel_tol": None,
    "max_subdivisions": None,
    "tail_rate": None,
    "kind": None,
    "input": None,
}
DEFAULT_GRIDS = {
    "eval-kernel": "0.5:4:8:linear",
    "forward-direct": "0.001:40:200:log",
    "invert": "0.25:3:12:linear",
}
_FLOAT_KEYS = ("mu", "tau", "delta", "gamma", "abs_tol", "rel_tol", "tail_rate")


class UsageError(PreconditionError):
    pass


# ---------------------------------------------------------------- parsing


def parse_grid(spec: str) -> np.ndarray:
    """``min:max:count:spacing`` with spacing ``linear`` or ``log``."""
    parts = spec.split(":")
    if len(parts) != 4:
        raise UsageError(f"grid {spec!r}: expected min:max:count:spacing")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"grid {spec!r}: malformed number") from None
    kind = parts[3]
    if n < 2:
        raise UsageError("grid count must be at least 2")
    if not lo < hi:
        raise UsageError("grid min must be below max")
    if kind == "linear":
        return np.linspace(lo, hi, n)
    if kind == "log":
        if lo <= 0:
            raise UsageError("log grid needs min > 0")
        return np.geomspace(lo, hi, n)
    raise UsageError(f"grid spacing must be linear or log, got {kind!r}")


def read_config(path: str) -> dict:
    """Flat ``key=value`` file; ``#`` starts a comment; keys use - or _."""
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"config file {path} not found")
    out = {}
    for i, line in enumerate(p.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{i}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        k = k.replace("-", "_")
        if k not in DEFAULTS:
            raise UsageError(f"{path}:{i}: unknown key {k!r}")
        out[k] = v
    return out


def _coerce(opts: dict) -> dict:
    for k in _FLOAT_KEYS:
        if isinstance(opts.get(k), str):
            try:
                opts[k] = float(opts[k])
            except ValueError:
                raise UsageError(f"{k} must be a number, got {opts[k]!r}") from None
    if isinstance(opts.get("max_subdivisions"), str):
        try:
            opts["max_subdivisions"] = int(opts["max_subdivisions"])
        except ValueError:
            raise UsageError("max_subdivisions must be an integer") from None
    return opts


def resolve(args: argparse.Namespace) -> dict:
    """defaults < config file < command-line flags."""
    opts = dict(DEFAULTS)
    if getattr(args, "config", None):
        opts.update(read_config(args.config))
    opts.update({k: v for k, v in vars(args).items() if v is not None and k in DEFAULTS})
    return _coerce(opts)


def quad_config(opts: dict) -> QuadratureConfig:
    kw = {}
    for k in ("abs_tol", "rel_tol"):
        v = opts.get(k)
        if v is not None:
            if not 0 < v < 1:
                raise UsageError(f"{k} must lie in (0, 1)")
            kw[k] = float(v)
    if opts.get("max_subdivisions") is not None:
        if opts["max_subdivisions"] < 1:
            raise UsageError("max_subdivisions must be at least 1")
        kw["max_subdivisions"] = int(opts["max_subdivisions"])
    if "abs_tol" in kw:
        kw["tail_tol"] = min(OUTER_CFG.tail_tol, kw["abs_tol"])
    return OUTER_CFG.replace(**kw)


def params(opts: dict) -> TransformParams:
    return TransformParams(float(opts["mu"]), float(opts["delta"]), opts["gamma"])


def load_function(name: str, tail_rate=None) -> IndexFunction:
    """A named test function, or an ``x,value`` table of f(tau) with a fitted tail."""
    p = Path(name)
    if p.suffix == ".csv" or p.exists() or "/" in name:
        curve = SampledCurve.from_csv(p, coord="linear", tail_rate=tail_rate)
        rate = curve.tail.rate
        if not rate > 0:
            raise UsageError(f"{name}: samples do not decay exponentially")
        return IndexFunction(curve, rate, p.stem)
    return by_name(name)


# ---------------------------------------------------------------- output


def _num(x) -> str:
    x = float(x)
    return format(x, ".17g") if np.isfinite(x) else ("nan" if np.isnan(x) else ("inf" if x > 0 else "-inf"))


def format_table(columns, rows, fmt: str) -> str:
    if fmt == "csv":
        lines = [",".join(columns)] + [",".join(_num(v) for v in r) for r in rows]
        return "\n".join(lines) + "\n"
    if fmt == "json":
        return verify._dump({"columns": list(columns), "rows": [[float(v) for v in r] for r in rows]}) + "\n"
    raise UsageError(f"format must be csv or json, got {fmt!r}")


def emit(text: str, out) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc.strerror}") from None


# ---------------------------------------------------------------- commands


def cmd_eval_kernel(opts: dict) -> int:
    kind = opts["kind"]
    if kind not in KINDS:
        raise UsageError(f"--kind must be one of {', '.join(KINDS)}")
    quad_config(opts)  # kernels use their own rules; still reject bad overrides
    mu, tau = float(opts["mu"]), float(opts["tau"])
    x = parse_grid(opts["grid"] or DEFAULT_GRIDS["eval-kernel"])
    if kind == "whittaker-sq":
        if not mu < 0.5:
            raise UsageError("whittaker-sq needs mu < 1/2")
        if np.any(x <= 0):
            raise UsageError("whittaker-sq needs x > 0")
        vals = [float(np.atleast_1d(specfun.whittaker_w_sq(mu, tau, xi))[0]) for xi in x]
    elif kind == "macdonald":
        if np.any(x <= 0):
            raise UsageError("macdonald needs x > 0")
        vals = np.atleast_1d(specfun.macdonald_imag(tau, x))
    elif kind == "phi":
        vals = np.atleast_1d(specfun.phi_kernel(mu, tau, x))
    elif kind == "inv-mu0":
        vals = np.atleast_1d(specfun.inversion_kernel_mu0(tau, x))
    else:
        vals = np.atleast_1d(specfun.gauss2f1_kernel(mu, tau, x))
    emit(format_table(("x", "value"), zip(x, vals), opts["format"]), opts["out"])
    return EXIT_OK


def cmd_forward(opts: dict) -> int:
    p = params(opts)
    cfg = quad_config(opts)
    f = load_function(opts["f"], opts["tail_rate"])
    route = opts["route"]
    if route not in ("direct", "composed", "both"):
        raise UsageError("--route must be direct, composed or both")
    if opts["grid"]:
        x = parse_grid(opts["grid"])
    elif route == "composed":
        x = None  # the wide log grid that inversion needs
    else:
        x = parse_grid(DEFAULT_GRIDS["forward-direct"])
    if x is not None and np.any(x <= 0):
        raise UsageError("forward needs x > 0")
    if route == "both":
        d = np.atleast_1d(transforms.forward_direct(f, p, x, cfg))
        c = np.atleast_1d(transforms.forward_composed(f, p, x, cfg))
        den = np.maximum(np.abs(d) + np.abs(c), verify.RESIDUAL_FLOOR)
        rel = np.where((d == 0) & (c == 0), 0.0, np.abs(d - c) / den)
        table = format_table(("x", "F_direct", "F_composed", "rel_diff"), zip(x, d, c, rel), opts["format"])
    else:
        if x is None:
            x = transforms.wide_grid()
        v = transforms.forward_values(f, p, x, route, cfg)
        table = format_table(("x", "value"), zip(x, v), opts["format"])
    emit(table, opts["out"])
    return EXIT_OK


def cmd_invert(opts: dict) -> int:
    p = params(opts)
    p.require_inversion()
    cfg = quad_config(opts)
    src = opts["input"]
    if not src:
        raise UsageError("invert needs --input <F table>")
    F = SampledCurve.from_csv(src, coord="log", tail_rate=opts["tail_rate"])
    taus = parse_grid(opts["grid"] or DEFAULT_GRIDS["invert"])
    if np.any(taus <= 0):
        raise UsageError("tau grid must be positive")
    if p.mu == 0:
        vals = transforms.invert_mu0(F, taus, cfg)
    else:
        vals = transforms.invert_general(F, p, taus, cfg)
    emit(format_table(("tau", "value"), zip(taus, np.atleast_1d(vals)), opts["format"]), opts["out"])
    return EXIT_OK


def cmd_verify(opts: dict) -> int:
    suite = opts["suite"]
    if suite not in verify.SUITES:
        raise UsageError(f"--suite must be one of {', '.join(verify.SUITES)}")
    p = params(opts)
    cfg = quad_config(opts)
    f = load_function(opts["f"], opts["tail_rate"])
    report = verify.run_suite(suite, p, f, cfg)
    if opts["format"] == "csv":
        cols = ("description", "kind", "lhs", "rhs", "residual", "tolerance", "passed")
        lines = [",".join(cols)]
        for c in report.cases:
            desc = '"' + c.description.replace('"', '""') + '"'
            lines.append(",".join([desc, c.kind] + [_num(v) for v in (c.lhs, c.rhs, c.residual, c.tolerance)]
                                  + [str(c.passed).lower()]))
        text = "\n".join(lines) + "\n"
    elif opts["format"] == "json":
        text = report.to_json()
    else:
        raise UsageError(f"format must be csv or json, got {opts['format']!r}")
    emit(text, opts["out"])
    return EXIT_OK if report.passed else EXIT_FAIL


COMMANDS = {"eval-kernel": cmd_eval_kernel, "forward": cmd_forward, "invert": cmd_invert, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # defaults are None so a config file can fill what the flags leave out
    common.add_argument("--mu", type=float)
    common.add_argument("--delta", type=float)
    common.add_argument("--gamma", type=float)
    common.add_argument("--grid", help="min:max:count:spacing (spacing linear|log)")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--abs-tol", dest="abs_tol", type=float)
    common.add_argument("--rel-tol", dest="rel_tol", type=float)
    common.add_argument("--max-subdivisions", dest="max_subdivisions", type=int)
    common.add_argument("--tail-rate", dest="tail_rate", type=float)
    common.add_argument("--config", help="flat key=value file; flags override it")

    ap = argparse.ArgumentParser(prog="itx", description="Index transform with squared Whittaker kernel.")
    sub = ap.add_subparsers(dest="command", required=True)
    k = sub.add_parser("eval-kernel", parents=[common], help="tabulate a kernel over an x grid")
    k.add_argument("--kind", choices=KINDS)
    k.add_argument("--tau", type=float)
    fw = sub.add_parser("forward", parents=[common], help="forward transform of a test function")
    fw.add_argument("--f", help="test function name or x,value samples file")
    fw.add_argument("--route", choices=("direct", "composed", "both"))
    iv = sub.add_parser("invert", parents=[common], help="recover f(tau) from an F table")
    iv.add_argument("--input", help="x,value table of F")
    vf = sub.add_parser("verify", parents=[common], help="run a verification suite")
    vf.add_argument("--suite", choices=verify.SUITES)
    vf.add_argument("--f", help="test function name or x,value samples file")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        opts = resolve(args)
        if opts["format"] is None:
            opts["format"] = "json" if args.command == "verify" else "csv"
        return COMMANDS[args.command](opts)
    except PreconditionError as exc:
        print(f"itx: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, ArithmeticError) as exc:
        print(f"itx: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"itx: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"itx: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
