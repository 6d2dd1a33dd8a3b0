"""Adaptive Gauss-Kronrod integration and finite-difference differentiation.

All integrands are called with a 1-D array of abscissae and may return
either one value per abscissa or a trailing vector of values (shape
``(n, m)``), real or complex. Vector-valued integrands share the
subdivision, which is what the nested transforms need: one inner
integral per outer quadrature node, evaluated in a single sweep.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, EnvelopeError

__all__ = [
    "QuadratureConfig",
    "IntegralResult",
    "integrate_finite",
    "integrate_semi_infinite",
    "differentiate",
    "gauss_legendre_panels",
]

# 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
_XGK = np.array([
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0,
])
_WGK = np.array([
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525420000, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[:-1][::-1]])
KRONROD_W = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[:-1][::-1]])
GAUSS_W = np.zeros(21)
GAUSS_W[1:10:2] = _WG
GAUSS_W[11:20:2] = _WG[::-1]

_EPS = np.finfo(float).eps
ENV_PAD = 2.0


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and limits shared by every integral in the package."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 4000
    tail_tol: float = 1e-11
    diff_step: float = 1e-3

    def __post_init__(self):
        if not (0 < self.abs_tol < 1 and 0 < self.rel_tol < 1):
            raise ValueError("abs_tol and rel_tol must lie in (0, 1)")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")
        if not 0 < self.tail_tol <= self.abs_tol:
            raise ValueError("tail_tol must be positive and not exceed abs_tol")
        if self.diff_step <= 0:
            raise ValueError("diff_step must be positive")

    def replace(self, **kw) -> "QuadratureConfig":
        vals = {k: getattr(self, k) for k in self.__dataclass_fields__}
        vals.update(kw)
        return QuadratureConfig(**vals)

    def tightened(self, factor: float) -> "QuadratureConfig":
        """Copy with abs_tol and tail_tol both multiplied by ``factor``."""
        return self.replace(abs_tol=self.abs_tol * factor, tail_tol=self.tail_tol * factor)


KERNEL_CFG = QuadratureConfig()
OUTER_CFG = QuadratureConfig(abs_tol=1e-7, rel_tol=1e-6, tail_tol=1e-8)


@dataclass
class IntegralResult:
    value: float | np.ndarray
    error_estimate: float | np.ndarray
    evaluations: int
    converged: bool
    intervals: int = 0
    worst_interval: tuple[float, float] | None = field(default=None, repr=False)

    def __float__(self):
        return float(np.real(self.value))


def _rule(f, lo, hi):
    """Apply the 21-point rule on every [lo_i, hi_i]; returns (K, err, ...)."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * NODES[None, :]
    vals = np.asarray(f(x.ravel()))
    vals = vals.reshape((lo.size, 21) + vals.shape[1:])
    extra = (None,) * (vals.ndim - 2)
    h = half[(slice(None),) + extra]
    wk = KRONROD_W[(None, slice(None)) + extra]
    wg = GAUSS_W[(None, slice(None)) + extra]
    k = (vals * wk).sum(axis=1) * h
    g = (vals * wg).sum(axis=1) * h
    resabs = (np.abs(vals) * wk).sum(axis=1) * np.abs(h)
    mean = k / (2 * h)
    resasc = (np.abs(vals - mean[:, None]) * wk).sum(axis=1) * np.abs(h)
    err = np.abs(k - g)
    # QUADPACK error scaling
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc != 0) & (err != 0), scaled, err)
    err = np.maximum(err, 50 * _EPS * resabs)
    return k, err


def integrate_finite(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    cfg: QuadratureConfig = KERNEL_CFG,
    *,
    breakpoints=None,
) -> IntegralResult:
    """Adaptive G10/K21 integration of ``f`` over [a, b].

    Endpoint power-law singularities are resolved by repeated bisection
    toward the endpoint. Non-convergence returns the best estimate with
    ``converged=False`` rather than raising.
    """
    if not a < b:
        raise ValueError("integrate_finite requires a < b")
    edges = np.array([a] + sorted(p for p in (breakpoints or []) if a < p < b) + [b], float)
    lo, hi = edges[:-1].copy(), edges[1:].copy()
    k, err = _rule(f, lo, hi)
    nevals = 21 * lo.size
    while True:
        total = k.sum(axis=0)
        total_err = err.sum(axis=0)
        tol = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(total))
        score = err / tol
        if score.ndim > 1:
            score = score.reshape(score.shape[0], -1).max(axis=1)
        if np.all(total_err <= tol):
            converged = True
            break
        n_int = lo.size
        budget = cfg.max_subdivisions - n_int
        # intervals too narrow to split are frozen
        width_ok = (hi - lo) > 64 * _EPS * np.maximum(np.abs(lo), np.abs(hi))
        cand = np.where(width_ok & (score > 0))[0]
        if budget <= 0 or cand.size == 0:
            converged = False
            break
        order = cand[np.argsort(-score[cand])]
        cum = np.cumsum(score[order])
        target = 0.5 * score.sum()
        nsplit = int(np.searchsorted(cum, target) + 1)
        nsplit = max(1, min(nsplit, budget, order.size))
        split = order[:nsplit]
        keep = np.ones(n_int, dtype=bool)
        keep[split] = False
        mids = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mids])
        new_hi = np.concatenate([mids, hi[split]])
        nk, ne = _rule(f, new_lo, new_hi)
        nevals += 21 * new_lo.size
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        k = np.concatenate([k[keep], nk])
        err = np.concatenate([err[keep], ne])
    worst = None
    if lo.size:
        i = int(np.argmax(score)) if np.ndim(score) else 0
        worst = (float(lo[i]), float(hi[i]))
    value = k.sum(axis=0)
    est = err.sum(axis=0)
    if np.ndim(value) == 0:
        value = value.item()
        est = float(est)
    return IntegralResult(value, est, nevals, converged, int(lo.size), worst)


def integrate_semi_infinite(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    decay_rate: float,
    cfg: QuadratureConfig = KERNEL_CFG,
    *,
    max_extent: float | None = None,
) -> IntegralResult:
    """Integrate ``f`` over [a, inf) assuming |f(x)| <= M exp(-decay_rate x) eventually.

    The truncation point b is moved out until the fitted envelope bounds
    the discarded tail by ``tail_tol`` (tightened relative to the size of
    the integrand); the bound is added to the error estimate. An
    ``EnvelopeError`` is raised when |f| is seen above the envelope
    beyond b.
    """
    r = float(decay_rate)
    if r <= 0:
        raise ValueError("decay_rate must be positive")

    def env_coef(lo_, hi_):
        xs = np.linspace(lo_, hi_, 17)
        v = np.abs(np.asarray(f(xs)))
        if v.ndim > 1:
            v = v.reshape(v.shape[0], -1).max(axis=1)
        # 17 samples can miss oscillation peaks: pad the estimate by ENV_PAD
        return ENV_PAD * float(np.max(v * np.exp(r * (xs - a)))), xs, v

    b = a + max(1.0 / r, 1.0)
    coef = 0.0
    for _ in range(200):
        with np.errstate(over="ignore", invalid="ignore"):
            coef, _, _ = env_coef(a + 0.5 * (b - a), b)
        if coef == 0.0:
            break
        if not np.isfinite(coef):
            raise EnvelopeError(f"|f| outgrows the declared envelope (rate {r}) near x={b:.6g}")
        target = min(cfg.tail_tol, 1e-2 * cfg.rel_tol * coef / r)
        b_new = a + np.log(coef / (r * target)) / r
        if b_new <= b:
            break
        b = b_new
        if max_extent is not None and b - a > max_extent:
            raise EnvelopeError(f"truncation point beyond {max_extent} from {a}")
    else:
        raise EnvelopeError("truncation point did not stabilise")
    # envelope check beyond the truncation point
    xs = b + np.linspace(0.0, b - a, 9)[1:]
    v = np.abs(np.asarray(f(xs)))
    if v.ndim > 1:
        v = v.reshape(v.shape[0], -1).max(axis=1)
    bound = coef * np.exp(-r * (xs - a))
    bad = v > ENV_PAD * bound + 1e-300
    if bad.any():
        i = int(np.argmax(bad))
        raise EnvelopeError(
            f"|f({xs[i]:.6g})| = {v[i]:.6g} exceeds envelope {bound[i]:.6g} (rate {r})"
        )
    res = integrate_finite(f, a, b, cfg)
    tail = coef * np.exp(-r * (b - a)) / r
    res.error_estimate = res.error_estimate + tail
    return res


def differentiate(func, x, cfg: QuadratureConfig = KERNEL_CFG):
    """Central difference with one Richardson step (steps h and h/2).

    The base step is ``diff_step`` scaled by |x| (absolute when x = 0).
    Objects exposing a ``domain`` attribute (lo, hi) are checked so the
    stencil never leaves it.
    """
    x = np.asarray(x, dtype=float)
    h = cfg.diff_step * np.where(x != 0, np.abs(x), 1.0)
    dom = getattr(func, "domain", None)
    if dom is not None:
        lo, hi = dom
        if np.any(x - h < lo) or np.any(x + h > hi):
            raise DomainError("difference stencil leaves the function's domain")
    d1 = (np.asarray(func(x + h)) - np.asarray(func(x - h))) / (2 * h)
    d2 = (np.asarray(func(x + h / 2)) - np.asarray(func(x - h / 2))) / h
    out = (4 * d2 - d1) / 3
    return out.item() if out.ndim == 0 else out


_GL20 = np.polynomial.legendre.leggauss(20)


def gauss_legendre_panels(a: float, b: float, n: int):
    """Nodes and weights of a composite 20-point Gauss-Legendre rule on n equal panels."""
    e = np.linspace(a, b, n + 1)
    h = 0.5 * (e[1:] - e[:-1])
    m = 0.5 * (e[1:] + e[:-1])
    x = (m[:, None] + h[:, None] * _GL20[0]).ravel()
    w = (h[:, None] * _GL20[1]).ravel()
    return x, w
