"""Executable checks of the transform's bounds and identities.

Each suite returns a ``VerifyReport``: an ordered list of cases, each with
both sides, a relative residual and a verdict. Three kinds of case exist:

* ``equality``: passes when the residual is within the case tolerance;
* ``bound``: passes when lhs <= rhs up to a relative slack;
* ``diagnostic``: recorded for inspection, never fails the report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import gamma as gamma_fn

from . import specfun, transforms
from ._parallel import pmap
from .errors import PreconditionError
from .functions import CORPUS, IndexFunction, f1
from .quadrature import KERNEL_CFG, OUTER_CFG, QuadratureConfig, integrate_semi_infinite
from .transforms import TransformParams

__all__ = [
    "Case", "VerifyReport", "residual", "SUITES", "IDENTITIES",
    "check_macdonald_bound", "check_whittaker_bound", "check_operator_norm",
    "check_kl_reduction", "check_kernel_reduction", "check_dual_route",
    "check_mellin", "check_frac_derivative",
    "run_bounds_suite", "run_parseval_suite", "run_crosscheck_suite", "run_roundtrip_suite", "run_suite",
]

RESIDUAL_FLOOR = 1e-30
BOUND_SLACK = 1e-10

# suite -> identities it exercises; emitted in every report header
IDENTITIES = {
    "bounds": [
        "uniform Macdonald bound |K_{i tau}(x)| <= e^{-delta tau} K_0(x cos delta)",
        "squared Whittaker bound with the Bessel constant C_{-2mu}",
        "sup-norm estimate of the index transform on [x0, inf)",
    ],
    "parseval": [
        "Olevskii Parseval equality, general mu (gamma-ratio weight)",
        "Olevskii Parseval equality, mu = 0 form",
    ],
    "crosschecks": [
        "index transform = Laplace transform of the Olevskii transform",
        "Mellin factorisation F*(s) = Gamma(s) G*(1-2mu-s)",
        "right-sided fractional derivative D_-^{2mu} F = Laplace transform of G",
        "1F2 inversion kernel = Bessel-product kernel at mu = 0",
        "mu = 0 Whittaker square = Macdonald square reduction",
    ],
    "roundtrip": [
        "general inversion formula with the 1F2 kernel",
        "mu = 0 inversion formula with the Bessel-product kernel",
    ],
}
SUITES = (*IDENTITIES, "all")


def residual(lhs, rhs) -> float:
    """|lhs - rhs| / max(|lhs| + |rhs|, 1e-30)."""
    return float(abs(lhs - rhs) / max(abs(lhs) + abs(rhs), RESIDUAL_FLOOR))


@dataclass(frozen=True)
class Case:
    description: str
    lhs: float
    rhs: float
    residual: float
    passed: bool
    kind: str = "equality"
    tolerance: float = 0.0

    @classmethod
    def equality(cls, description, lhs, rhs, tol, res=None):
        r = residual(lhs, rhs) if res is None else float(res)
        return cls(description, float(lhs), float(rhs), r, bool(r <= tol), "equality", float(tol))

    @classmethod
    def bound(cls, description, lhs, rhs, slack=BOUND_SLACK):
        ok = lhs <= rhs + slack * abs(rhs)
        return cls(description, float(lhs), float(rhs), residual(lhs, rhs), bool(ok), "bound", float(slack))

    @classmethod
    def diagnostic(cls, description, lhs, rhs):
        return cls(description, float(lhs), float(rhs), residual(lhs, rhs), True, "diagnostic", 0.0)

    def to_dict(self):
        return {"description": self.description, "kind": self.kind, "lhs": self.lhs, "rhs": self.rhs,
                "residual": self.residual, "tolerance": self.tolerance, "passed": self.passed}


@dataclass(frozen=True)
class VerifyReport:
    suite_name: str
    cases: tuple
    tolerance: float
    metrics: dict = field(default_factory=dict)
    identities: dict = field(default_factory=dict)  # check name -> identity exercised

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    @property
    def failures(self):
        return [c for c in self.cases if not c.passed]

    def to_dict(self):
        return {
            "suite_name": self.suite_name,
            "identities": dict(self.identities),
            "tolerance": self.tolerance,
            "passed": self.passed,
            "metrics": dict(sorted(self.metrics.items())),
            "cases": [c.to_dict() for c in self.cases],
        }

    def to_json(self) -> str:
        return _dump(self.to_dict()) + "\n"

    @staticmethod
    def merge(name: str, reports) -> "VerifyReport":
        cases, metrics, ids = [], {}, {}
        for r in reports:
            cases += [replace(c, description=f"{r.suite_name}: {c.description}") for c in r.cases]
            metrics.update({f"{r.suite_name}.{k}": v for k, v in r.metrics.items()})
            ids.update(r.identities)
        tol = max((r.tolerance for r in reports), default=0.0)
        return VerifyReport(name, tuple(cases), tol, metrics, ids)


def _fmt(x) -> str:
    if isinstance(x, bool) or x is None:
        return {True: "true", False: "false", None: "null"}[x]
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def _dump(obj, indent=0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad, pad1 = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad1}{_str(k)}: {_dump(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad1 + _dump(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, str):
        return _str(obj)
    return _fmt(obj)


def _str(s: str) -> str:
    import json

    return json.dumps(s, ensure_ascii=False)


# ---------------------------------------------------------------- bounds

MACDONALD_GRID = [(t, x, d) for t in (0.5, 1.0, 2.0, 4.0) for x in (0.5, 1.0, 2.0) for d in (0.5, 1.0)]
WHITTAKER_GRID = [(t, x, d) for t in (0.5, 1.0, 2.0, 4.0) for x in (0.5, 1.0, 2.0, 20.0) for d in (0.0, 0.5, 1.0)]


def check_macdonald_bound(grid=None, cfg: QuadratureConfig = KERNEL_CFG) -> VerifyReport:
    """|K_{i tau}(x)| <= e^{-delta tau} K_0(x cos delta) at each (tau, x, delta)."""
    grid = MACDONALD_GRID if grid is None else list(grid)
    for _, x, d in grid:
        if not x > 0 or not 0 <= d < np.pi / 2:
            raise PreconditionError("Macdonald bound needs x > 0 and delta in [0, pi/2)")

    def one(pt):
        tau, x, d = pt
        lhs = abs(float(specfun.macdonald_imag(tau, x, cfg)))
        rhs = math.exp(-d * tau) * float(specfun.macdonald_imag(0.0, x * math.cos(d), cfg))
        return Case.bound(f"tau={tau:g} x={x:g} delta={d:g}", lhs, rhs)

    return VerifyReport("macdonald_bound", tuple(pmap(one, grid)), BOUND_SLACK,
                        identities={"macdonald_bound": IDENTITIES["bounds"][0]})


def whittaker_bound_rhs(mu: float, tau: float, x: float, delta: float, C: float | None = None) -> float:
    if C is None:
        C = specfun.bessel_j_bound_constant(-2 * mu)
    lg = 2 * specfun.log_gamma(0.5 - mu + 1j * tau).real
    return float(C * gamma_fn(0.25) ** 2 / math.sqrt(2 * math.cos(delta))
                 * math.sqrt(math.pi * x) * math.exp(-x - 2 * delta * tau - lg))


def check_whittaker_bound(mu: float = 0.0, grid=None, cfg: QuadratureConfig = KERNEL_CFG) -> VerifyReport:
    """W^2_{mu,i tau}(x) against its Bessel-constant bound.

    The constant C_{-2mu} bounds sqrt(x)|J_{-2mu}(x)|, which is finite only
    for -2mu >= -1/2, so mu > 1/4 is rejected.
    """
    if not mu <= 0.25:
        raise PreconditionError("the Whittaker bound needs mu <= 1/4 (C_{-2mu} is infinite beyond)")
    grid = WHITTAKER_GRID if grid is None else list(grid)
    C = specfun.bessel_j_bound_constant(-2 * mu)

    def one(pt):
        tau, x, d = pt
        lhs = float(np.atleast_1d(specfun.whittaker_w_sq(mu, tau, x, cfg))[0])
        return Case.bound(f"mu={mu:g} tau={tau:g} x={x:g} delta={d:g}", lhs, whittaker_bound_rhs(mu, tau, x, d, C))

    return VerifyReport("whittaker_bound", tuple(pmap(one, grid)), BOUND_SLACK,
                        metrics={"C_bessel": C}, identities={"whittaker_bound": IDENTITIES["bounds"][1]})


def operator_norm_bound(f: IndexFunction, p: TransformParams, x0: float, cfg: QuadratureConfig = OUTER_CFG) -> float:
    """C sqrt(pi) Gamma^2(1/4) / sqrt(2 x0 cos delta) int e^{-2 delta tau}|f| / |Gamma(1/2-mu+i tau)|^2."""
    mu, d = p.mu, p.delta
    if not mu <= 0.25:
        raise PreconditionError("the norm estimate needs mu <= 1/4")
    f.require(d)
    if f.is_zero:
        return 0.0

    def w(tau):
        return np.exp(-2 * d * tau - 2 * specfun.log_gamma(0.5 - mu + 1j * tau).real) * np.abs(f(tau))

    # net decay is decay_rate + 2 delta - pi > 0 by admissibility; keep headroom
    # for the polynomial factors
    rate = 0.75 * (f.decay_rate + 2 * d - np.pi)
    integral = float(integrate_semi_infinite(w, 0.0, rate, cfg).value)
    C = specfun.bessel_j_bound_constant(-2 * mu)
    return C * math.sqrt(math.pi) * gamma_fn(0.25) ** 2 / math.sqrt(2 * x0 * math.cos(d)) * integral


def check_operator_norm(f: IndexFunction, p: TransformParams, x0: float, x_grid=None,
                        cfg: QuadratureConfig = OUTER_CFG) -> VerifyReport:
    """sup over the grid of |F(x)| against the norm estimate on [x0, inf)."""
    if not x0 > 0:
        raise PreconditionError("x0 must be positive")
    xs = x0 * np.array([1.0, 1.5, 2.0, 4.0, 8.0]) if x_grid is None else np.asarray(x_grid, dtype=float)
    if np.any(xs < x0):
        raise PreconditionError("x grid must lie in [x0, inf)")
    rhs = operator_norm_bound(f, p, x0, cfg)
    F = np.atleast_1d(transforms.forward_composed(f, p, xs, cfg))
    lhs = float(np.max(np.abs(F)))
    case = Case.bound(f"{f.label} mu={p.mu:g} delta={p.delta:g} x0={x0:g}", lhs, rhs)
    return VerifyReport("operator_norm", (case,), BOUND_SLACK,
                        identities={"operator_norm": IDENTITIES["bounds"][2]})


def run_bounds_suite(f: IndexFunction, p: TransformParams, cfg: QuadratureConfig = OUTER_CFG) -> VerifyReport:
    parts = [check_macdonald_bound(), check_whittaker_bound(p.mu)]
    parts += [check_operator_norm(f, p, x0, cfg=cfg) for x0 in (0.5, 1.0)]
    return VerifyReport.merge("bounds", parts)


# ---------------------------------------------------------------- Parseval


def run_parseval_suite(fs, p: TransformParams, cfg: QuadratureConfig = OUTER_CFG, tol: float = 1e-2) -> VerifyReport:
    """Parseval residual for each function in ``fs``."""
    fs = [fs] if isinstance(fs, IndexFunction) else list(fs)

    def one(f):
        res, lhs, rhs = transforms.parseval_residual(f, p, cfg, return_sides=True)
        return Case.equality(f"{f.label} mu={p.mu:g}", lhs, rhs, tol, res)

    ident = IDENTITIES["parseval"][0 if p.mu else 1]
    return VerifyReport("parseval", tuple(pmap(one, fs)), tol, identities={"parseval": ident})


# ---------------------------------------------------------------- cross checks

KL_TAUS = (0.25, 0.5, 1.0, 2.0, 4.0)
KL_XS = (0.25, 0.5, 1.0, 2.0, 5.0)


def check_kl_reduction(taus=KL_TAUS, xs=KL_XS, tol: float = 1e-6, cfg: QuadratureConfig = KERNEL_CFG) -> VerifyReport:
    """e^x/x W^2_{0,i tau}(x) against (e^x/pi) K^2_{i tau}(x/2)."""
    pts = [(t, x) for t in taus for x in xs]

    def one(pt):
        tau, x = pt
        lhs = float(np.atleast_1d(specfun.scaled_w_sq(0.0, tau, x, cfg))[0])
        rhs = math.exp(x) / math.pi * float(specfun.macdonald_imag(tau, x / 2, cfg)) ** 2
        return Case.equality(f"tau={tau:g} x={x:g}", lhs, rhs, tol)

    return VerifyReport("kl_reduction", tuple(pmap(one, pts)), tol,
                        identities={"kl_reduction": IDENTITIES["crosschecks"][4]})


KERNEL_POINTS = ((1.0, 0.5), (0.5, 0.2), (1.0, 1.0), (2.0, 1.5), (2.0, 3.0), (3.0, 6.0))


def check_kernel_reduction(points=KERNEL_POINTS, tol: float = 1e-6, cfg: QuadratureConfig = KERNEL_CFG) -> VerifyReport:
    """The general 1F2 inversion kernel at mu = 0 against (1/2) psi(tau, y/2) e^{-y}."""

    def one(pt):
        tau, y = pt
        lhs = float(specfun.inversion_kernel_general(0.0, tau, y))
        rhs = 0.5 * float(specfun.inversion_kernel_mu0(tau, y / 2, cfg)) * math.exp(-y)
        return Case.equality(f"tau={tau:g} y={y:g}", lhs, rhs, tol)

    return VerifyReport("kernel_reduction", tuple(pmap(one, points)), tol,
                        identities={"kernel_reduction": IDENTITIES["crosschecks"][3]})


def check_dual_route(f: IndexFunction, p: TransformParams, xs=(0.5, 1.0, 2.0, 4.0), tol: float = 1e-5,
                     cfg: QuadratureConfig = OUTER_CFG) -> VerifyReport:
    """forward_direct against forward_composed."""
    xs = np.asarray(xs, dtype=float)
    comp = np.atleast_1d(transforms.forward_composed(f, p, xs, cfg))
    direct = pmap(lambda x: float(transforms.forward_direct(f, p, x, cfg)), xs)
    cases = tuple(Case.equality(f"{f.label} mu={p.mu:g} x={x:g}", d, c, tol) for x, d, c in zip(xs, direct, comp))
    return VerifyReport("dual_route", cases, tol, identities={"dual_route": IDENTITIES["crosschecks"][0]})


MELLIN_HEIGHTS = (0.0, 1.0, 2.0, 4.0, 8.0)


def check_mellin(f: IndexFunction, p: TransformParams, heights=MELLIN_HEIGHTS, tol: float = 1e-4,
                 cfg: QuadratureConfig = KERNEL_CFG) -> VerifyReport:
    """Mellin factorisation at s = gamma + i u on the mid line of the admissible strip."""
    g = p.mellin_line()
    s = g + 1j * np.asarray(heights, dtype=float)
    res, lhs, rhs = transforms.mellin_factorization_residual(f, p, s, cfg, return_sides=True)
    cases = tuple(Case.equality(f"{f.label} mu={p.mu:g} s={g:g}{u:+g}i", abs(a), abs(b), tol, r)
                  for u, r, a, b in zip(heights, res, lhs, rhs))
    return VerifyReport("mellin", cases, tol, identities={"mellin": IDENTITIES["crosschecks"][1]})


FRAC_YS = tuple(np.linspace(0.5, 4.0, 8))


def check_frac_derivative(f: IndexFunction, p: TransformParams, ys=FRAC_YS, tol: float = 1e-4,
                          cfg: QuadratureConfig = KERNEL_CFG, F=None, G=None) -> VerifyReport:
    """D_-^{2mu} F at y against the Laplace transform of G at y."""
    if not 0 <= p.mu < 0.5:
        raise PreconditionError("the fractional-derivative identity needs 2mu in [0, 1)")
    ys = np.asarray(ys, dtype=float)
    if F is None:
        F = transforms.forward_curve(f, p)
    if G is None:
        G = transforms.build_g_curve(f, p)
    lhs = np.atleast_1d(transforms.frac_derivative_right(F, 2 * p.mu, ys, cfg))
    rhs = np.atleast_1d(transforms.laplace_of_curve(G, 0.0, ys, cfg))
    cases = tuple(Case.equality(f"{f.label} mu={p.mu:g} y={y:.6g}", a, b, tol) for y, a, b in zip(ys, lhs, rhs))
    return VerifyReport("frac_derivative", cases, tol,
                        identities={"frac_derivative": IDENTITIES["crosschecks"][2]})


def run_crosscheck_suite(p: TransformParams, f: IndexFunction = f1, cfg: QuadratureConfig = OUTER_CFG,
                         grids: dict | None = None) -> VerifyReport:
    """Dual route, Mellin factorisation, fractional derivative, kernel reductions.

    ``grids`` may override ``x`` (dual route), ``u`` (Mellin heights) and
    ``y`` (fractional derivative). Checks whose parameter range excludes
    ``p.mu`` are left out and listed under ``metrics['skipped']``.
    """
    grids = grids or {}
    parts = [check_dual_route(f, p, grids.get("x", (0.5, 1.0, 2.0, 4.0)), cfg=cfg)]
    skipped = []
    if p.mu < 0.25:
        parts.append(check_mellin(f, p, grids.get("u", MELLIN_HEIGHTS)))
    else:
        skipped.append("mellin")
    if p.mu >= 0:
        parts.append(check_frac_derivative(f, p, grids.get("y", FRAC_YS)))
    else:
        skipped.append("frac_derivative")
    parts += [check_kernel_reduction(), check_kl_reduction()]
    rep = VerifyReport.merge("crosschecks", parts)
    if skipped:
        rep.metrics["skipped"] = ",".join(skipped)
    return rep


# ---------------------------------------------------------------- round trip

ROUNDTRIP_TAUS = tuple(np.linspace(0.25, 3.0, 12))


def l2_error(recovered, exact) -> float:
    exact = np.asarray(exact, dtype=float)
    den = float(np.sqrt(np.sum(exact**2)))
    num = float(np.sqrt(np.sum((np.asarray(recovered) - exact) ** 2)))
    return 0.0 if den == 0 and num == 0 else num / max(den, RESIDUAL_FLOOR)


def run_roundtrip_suite(f: IndexFunction, p: TransformParams, taus=ROUNDTRIP_TAUS, cfg: QuadratureConfig = OUTER_CFG,
                        tol: float | None = None, F=None) -> VerifyReport:
    """Forward transform, invert, compare with f on the tau grid.

    Pointwise values are diagnostics; the verdict rests on the discrete
    relative L2 error over the grid (1e-2 at mu = 0, else 5e-2).
    """
    p.require_inversion()
    taus = np.asarray(taus, dtype=float)
    if tol is None:
        tol = 1e-2 if p.mu == 0 else 5e-2
    if F is None:
        F = transforms.forward_curve(f, p)
    exact = np.atleast_1d(f(taus))
    methods = [("general", lambda: transforms.invert_general(F, p, taus, cfg))]
    if p.mu == 0:
        methods.append(("mu0", lambda: transforms.invert_mu0(F, taus, cfg)))
    cases, metrics = [], {}
    for name, run in methods:
        rec = np.atleast_1d(run())
        cases += [Case.diagnostic(f"{name} {f.label} mu={p.mu:g} tau={t:.6g}", r, e)
                  for t, r, e in zip(taus, rec, exact)]
        err = l2_error(rec, exact)
        metrics[f"l2_error_{name}"] = err
        cases.append(Case.bound(f"{name} {f.label} mu={p.mu:g} relative L2 error", err, tol, slack=0.0))
    ids = {f"roundtrip_{name}": IDENTITIES["roundtrip"][i] for i, (name, _) in enumerate(methods)}
    return VerifyReport("roundtrip", tuple(cases), tol, metrics, ids)


# ---------------------------------------------------------------- dispatch


def run_suite(name: str, p: TransformParams, f: IndexFunction = f1, cfg: QuadratureConfig = OUTER_CFG) -> VerifyReport:
    """Run one named suite, or all of them, for (p, f)."""
    if name == "bounds":
        return run_bounds_suite(f, p, cfg)
    if name == "parseval":
        return run_parseval_suite(f, p, cfg)
    if name == "crosschecks":
        return run_crosscheck_suite(p, f, cfg)
    if name == "roundtrip":
        return run_roundtrip_suite(f, p, cfg=cfg)
    if name == "all":
        parts = [run_suite(s, p, f, cfg) for s in ("bounds", "parseval", "crosschecks", "roundtrip")]
        return VerifyReport.merge("all", parts)
    raise PreconditionError(f"unknown suite {name!r}; choose from {list(SUITES)}")


def corpus_parseval(p: TransformParams, cfg: QuadratureConfig = OUTER_CFG) -> VerifyReport:
    return run_parseval_suite(list(CORPUS.values()), p, cfg)
