"""Forward index transform, its Laplace/Olevskii factorisation, fractional
operators and the inversion formulas.

Conventions used throughout:

* G(t) = (1/Gamma(1-2mu)) int_0^inf 2F1(1/2-mu-i tau, 1/2-mu+i tau; 1-2mu; -t^2-2t) f(tau) dtau
* F(x) = (e^x/x) int_0^inf W^2_{mu,i tau}(x) f(tau) dtau = int_0^inf t^{-2mu} e^{-xt} G(t) dt
* D(y) = (D_-^{2mu} F)(y) = int_0^inf e^{-yt} G(t) dt

G curves are sampled in L = ln(1+t) and store (1+t)^{1-2mu} G, which tends
to a slowly varying series in 1/L. F curves are sampled in ln x.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import exp1, gamma as gamma_fn

from . import specfun
from .curves import SampledCurve, TailModel, fit_tail
from .errors import (
    ConvergenceError,
    MissingTailError,
    PreconditionError,
)
from .functions import IndexFunction
from .quadrature import (
    KERNEL_CFG,
    OUTER_CFG,
    QuadratureConfig,
    differentiate,
    integrate_finite,
    integrate_semi_infinite,
)

__all__ = [
    "TransformParams",
    "olevskii_forward",
    "build_g_curve",
    "forward_direct",
    "laplace_of_curve",
    "forward_composed",
    "forward_curve",
    "mellin_factorization_residual",
    "frac_integral_rl",
    "frac_derivative_right",
    "invert_mu0",
    "invert_general",
    "olevskii_inverse_mu0",
    "parseval_residual",
]

# Default wide grid for curves consumed by the inversions: F in ln x on
# [LOG_X_MIN, LOG_X_MAX]; the head and tail models take over beyond it.
LOG_X_MIN = -25.0
LOG_X_MAX = np.log(1e5)
LOG_X_STEP = 0.05
# Upper limit of the inversion body integrals (general mu); the algebraic
# tail beyond it is integrated in closed form.
Y_BODY = 1000.0
# mu = 0 inversion: the body integral switches to the Macdonald form here.
Y_SPLIT = 1.5


def _cut(cfg: QuadratureConfig) -> float:
    # e^{-z} below this is dropped from Laplace-type integrals
    return np.log(1.0 / cfg.tail_tol) + 12.0


@dataclass(frozen=True)
class TransformParams:
    """Parameter bundle (mu, delta, gamma)."""

    mu: float
    delta: float = 0.5
    gamma: float | None = None

    def __post_init__(self):
        if not self.mu < 0.5:
            raise PreconditionError(f"mu={self.mu} must be below 1/2")
        if not 0 <= self.delta < np.pi / 2:
            raise PreconditionError(f"delta={self.delta} outside [0, pi/2)")
        if self.gamma is not None:
            lo, hi = self.gamma_interval()
            if not lo < self.gamma < hi:
                raise PreconditionError(f"gamma={self.gamma} outside ({lo:.6g}, {hi:.6g})")

    def gamma_interval(self):
        return max(-2 * self.mu, 0.5), 0.75 - self.mu

    def mellin_line(self) -> float:
        """gamma if set, else the midpoint of its admissible interval."""
        if self.gamma is not None:
            return self.gamma
        lo, hi = self.gamma_interval()
        if not lo < hi:
            raise PreconditionError(f"no admissible Mellin line for mu={self.mu}")
        return 0.5 * (lo + hi)

    def require_inversion(self):
        if not 0 <= self.mu < 0.25:
            raise PreconditionError(f"inversion needs mu in [0, 1/4), got {self.mu}")


# ---------------------------------------------------------------- Olevskii / G


def _scaled_olevskii(f: IndexFunction, mu: float, t: np.ndarray, cfg: QuadratureConfig):
    """(1+t)^{1-2mu} G(t) for an array of t, one shared tau quadrature."""
    t = np.asarray(t, dtype=float)
    if f.is_zero:
        return np.zeros(t.shape)
    w = (1.0 + t) ** (1.0 - 2.0 * mu) / gamma_fn(1.0 - 2.0 * mu)

    def integrand(tau):
        return specfun._gauss_matrix(mu, tau, t).T * (f(tau) * 1.0)[:, None] * w[None, :]

    res = integrate_semi_infinite(integrand, 0.0, f.decay_rate, cfg)
    if not res.converged:
        raise ConvergenceError(f"Olevskii integral did not converge near tau in {res.worst_interval}")
    return np.asarray(res.value)


def olevskii_forward(f: IndexFunction, p: TransformParams, t, cfg: QuadratureConfig = KERNEL_CFG):
    """G(t) by quadrature over tau; ``t`` may be an array."""
    ta = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ta < 0):
        raise PreconditionError("t must be non-negative")
    out = np.empty(ta.shape)
    for i in range(0, ta.size, 256):
        chunk = ta[i:i + 256]
        out[i:i + 256] = _scaled_olevskii(f, p.mu, chunk, cfg) * (1.0 + chunk) ** (2.0 * p.mu - 1.0)
    return out.item() if np.ndim(t) == 0 else out


def g_grid(L_max: float) -> np.ndarray:
    """L = ln(1+t) sample points: fine near t = 0, 0.1 apart beyond L = 3."""
    head = np.linspace(0.0, 3.0, 121)
    if L_max <= 3.0:
        return np.linspace(0.0, L_max, max(int(L_max / 0.025), 8) + 1)
    body = np.arange(3.0, L_max, 0.1)[1:]
    return np.concatenate([head, body, [L_max]]) if L_max - body[-1] > 1e-9 else np.concatenate([head, body])


def build_g_curve(f: IndexFunction, p: TransformParams, x_min: float = np.exp(LOG_X_MIN),
                  cfg: QuadratureConfig = KERNEL_CFG, L_max: float | None = None) -> SampledCurve:
    """Sample G on ln(1+t) up to where e^{-x_min t} is negligible; fit a 1/L tail."""
    if L_max is None:
        L_max = max(float(np.log1p(_cut(cfg) / x_min)), 6.0)
    L = g_grid(L_max)
    t = np.expm1(L)
    g = np.concatenate([_scaled_olevskii(f, p.mu, t[i:i + 256], cfg) for i in range(0, t.size, 256)])
    scale = 1.0 - 2.0 * p.mu
    curve = SampledCurve(t, g * (1.0 + t) ** (-scale), "log1p", None, scale)
    if f.is_zero:
        return curve.with_tail(TailModel((0.0,), scale, 0.0))
    tail = fit_tail(curve, power=scale, orders=(1, 2, 3), window=np.exp(L_max / 2))
    return curve.with_tail(tail)


# ---------------------------------------------------------------- forward maps


def forward_direct(f: IndexFunction, p: TransformParams, x, cfg: QuadratureConfig = OUTER_CFG,
                   kernel_cfg: QuadratureConfig = KERNEL_CFG):
    """(e^x/x) int W^2_{mu,i tau}(x) f(tau) dtau, one nested quadrature per x."""
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa <= 0):
        raise PreconditionError("x must be positive")
    out = np.zeros(xa.shape)
    if not f.is_zero:
        for i, xv in enumerate(xa):
            # F decays like x^{2mu-1}; keep the absolute tolerance relative to that size
            size = min(1.0, xv ** (2 * p.mu - 1))
            res = integrate_semi_infinite(
                lambda tau: specfun.scaled_w_sq(p.mu, tau, xv, kernel_cfg) * f(tau),
                0.0, f.decay_rate, cfg.tightened(size))
            if not res.converged:
                raise ConvergenceError(f"forward_direct did not converge at x={xv}")
            out[i] = res.value
    return out.item() if np.ndim(x) == 0 else out


def _coord_of(curve):
    if curve.coord == "log1p":
        return np.log1p, np.expm1, lambda t: 1.0 + t
    if curve.coord == "log":
        return np.log, np.exp, lambda t: t
    return (lambda t: t), (lambda u: u), np.ones_like


def laplace_of_curve(G: SampledCurve, weight_exponent: float, x, cfg: QuadratureConfig = KERNEL_CFG):
    """int_0^inf t^w e^{-xt} G(t) dt from the curve's interpolant and tail.

    Integration runs in the curve's coordinate. Beyond the last sample the
    tail model is integrated numerically unless e^{-xt} already makes that
    piece negligible; without a tail model that case raises.
    """
    w = float(weight_exponent)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa <= 0):
        raise PreconditionError("x must be positive")
    if w <= -1:
        raise PreconditionError("weight exponent must exceed -1")
    to_u, from_u, jac = _coord_of(G)
    t0, t1 = G.support
    if t0 > 0:
        # the curve starts away from 0: the piece on [0, t0] uses G(t0)
        # (callers sample from t = 0; this only guards hand-made curves)
        pass
    t_cut = _cut(cfg) / xa.min()
    u_hi = to_u(min(t1, t_cut))
    u_lo = to_u(t0)

    def integrand(u):
        t = from_u(u)
        g = G(np.clip(t, t0, t1)) * jac(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            tw = np.where(t > 0, t ** w, 0.0 if w > 0 else (1.0 if w == 0 else 0.0))
        return (tw * g)[:, None] * np.exp(-np.outer(t, xa))

    res = integrate_finite(integrand, u_lo, u_hi, cfg)
    if not res.converged:
        raise ConvergenceError("Laplace integral of the curve did not converge")
    val = np.asarray(res.value, dtype=float)
    if t0 > 0:
        val = val + G(t0) * np.array([_lower_gamma_piece(w, xv, t0) for xv in xa])
    if t_cut > t1:
        for i, xv in enumerate(xa):
            bound = abs(G(t1)) * t1 ** w * np.exp(-xv * t1) / xv
            if bound <= cfg.tail_tol:
                continue
            if G.tail is None:
                raise MissingTailError(f"tail beyond t={t1:g} matters at x={xv:g} but the curve has none")
            tr = G.tail
            rr = xv + tr.rate
            r2 = integrate_semi_infinite(lambda t: t ** w * np.exp(-xv * t) * tr(t), t1, rr, cfg)
            val[i] += r2.value
    return val.item() if np.ndim(x) == 0 else val


def _lower_gamma_piece(w, x, t0):
    # int_0^t0 t^w e^{-xt} dt
    from scipy.special import gammainc

    return gammainc(w + 1, x * t0) * gamma_fn(w + 1) / x ** (w + 1)


def forward_composed(f: IndexFunction, p: TransformParams, x, cfg: QuadratureConfig = OUTER_CFG,
                     G: SampledCurve | None = None):
    """F(x) = int t^{-2mu} e^{-xt} G(t) dt with G sampled by ``build_g_curve``."""
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa <= 0):
        raise PreconditionError("x must be positive")
    if f.is_zero:
        out = np.zeros(xa.shape)
        return out.item() if np.ndim(x) == 0 else out
    if G is None:
        G = build_g_curve(f, p, float(xa.min()), KERNEL_CFG)
    size = min(1.0, float(xa.max()) ** (2 * p.mu - 1))
    out = np.concatenate([
        np.atleast_1d(laplace_of_curve(G, -2 * p.mu, xa[i:i + 400], cfg.tightened(size)))
        for i in range(0, xa.size, 400)
    ])
    return out.item() if np.ndim(x) == 0 else out


def wide_grid() -> np.ndarray:
    """Default abscissae of F: ln x from LOG_X_MIN to LOG_X_MAX in LOG_X_STEP."""
    return np.exp(np.arange(LOG_X_MIN, LOG_X_MAX + 1e-9, LOG_X_STEP))


def forward_values(f: IndexFunction, p: TransformParams, x, route: str = "composed",
                   cfg: QuadratureConfig = OUTER_CFG) -> np.ndarray:
    """F at the points ``x`` by the direct or the composed route."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if route == "direct":
        return np.atleast_1d(forward_direct(f, p, x, cfg))
    if route == "composed":
        # the composed route is cheap, so it runs well below the outer tolerance
        tight = cfg.replace(rel_tol=min(cfg.rel_tol, 1e-9), abs_tol=min(cfg.abs_tol, 1e-12),
                            tail_tol=min(cfg.tail_tol, 1e-13))
        return np.atleast_1d(forward_composed(f, p, x, tight))
    raise PreconditionError(f"unknown route {route!r}")


def forward_curve(f: IndexFunction, p: TransformParams, x=None, route: str = "composed",
                  cfg: QuadratureConfig = OUTER_CFG, tail_rate: float | None = None) -> SampledCurve:
    """F sampled on ``x`` (default: the wide log grid) with a fitted tail."""
    x = wide_grid() if x is None else np.asarray(x, dtype=float)
    curve = SampledCurve(x, forward_values(f, p, x, route, cfg), "log")
    if f.is_zero:
        return curve.with_tail(TailModel((0.0,), 1.0, 0.0))
    return curve.with_tail(fit_tail(curve, rate=tail_rate))


# ---------------------------------------------------------------- Mellin check

# Rotation angles of the two Mellin contours. Along the real axis both
# sides are Fourier integrals whose value decays like e^{-pi |im s|}, far
# below the rounding floor of the integrands. G is taken on the ray
# t = rho e^{-i phi}; F on x = r e^{i theta} with theta > pi/2, reached by
# running the Laplace integral along the same t ray (re(x t) > 0 needs
# theta - phi < pi/2). The remaining cancellation is e^{-(pi - theta)|im s|}
# on the F side and e^{-(pi/2 - phi)|im s|} on the G side.
MELLIN_THETA = 2.2
MELLIN_PHI = 1.0  # kernel growth e^{2 phi tau} stays below f's decay
MELLIN_LOG_R = (-40.0, 15.0)
MELLIN_LOG_RHO = (-18.0, 40.0)
RAY_LOG_RHO = (-25.0, 46.0)
RAY_STEP = 0.025


def _g_complex(f: IndexFunction, mu: float, t: np.ndarray, cfg: QuadratureConfig) -> np.ndarray:
    """G(t) for complex t off the real axis, by the tau quadrature."""
    phi = float(np.max(np.abs(np.angle(t))))
    rate = f.decay_rate - 2.0 * phi
    if rate <= 0:
        raise PreconditionError("test function decays too slowly for the rotated contour")
    size = np.abs(1.0 + t) ** (1.0 - 2.0 * mu)

    def integrand(tau):
        k = specfun.gauss2f1_kernel_complex(mu, tau[:, None], t[None, :])
        return k * (f(tau) * 1.0)[:, None] * size[None, :]

    res = integrate_semi_infinite(integrand, 0.0, rate, cfg)
    if not res.converged:
        raise ConvergenceError("rotated Olevskii integral did not converge")
    return np.asarray(res.value) / size / gamma_fn(1.0 - 2.0 * mu)


def _g_ray(f: IndexFunction, mu: float, cfg: QuadratureConfig):
    """Spline in lambda = ln rho of |1+t|^{1-2mu} G(t) on t = rho e^{-i phi}."""
    lam = np.arange(RAY_LOG_RHO[0], RAY_LOG_RHO[1] + RAY_STEP / 2, RAY_STEP)
    t = np.exp(lam) * np.exp(-1j * MELLIN_PHI)
    size = np.abs(1.0 + t) ** (1.0 - 2.0 * mu)
    vals = np.concatenate([_g_complex(f, mu, t[i:i + 512], cfg) for i in range(0, t.size, 512)])
    return CubicSpline(lam, vals * size)


def _laplace_ray(h: CubicSpline, mu: float, x: np.ndarray, cfg: QuadratureConfig) -> np.ndarray:
    """F(x) = int t^{-2mu} e^{-xt} G(t) dt with t on the G ray, x on the F ray."""
    e = np.exp(-1j * MELLIN_PHI)
    w = x * e
    lam0, lam_max = RAY_LOG_RHO
    c = float(np.min(w.real))
    lam1 = min(lam_max, float(np.log(_cut(cfg) / c)))
    if lam1 >= lam_max and np.exp(-c * np.exp(lam_max)) > cfg.tail_tol:
        raise ConvergenceError("G ray too short for the complex Laplace integral")
    a = 1.0 - 2.0 * mu

    def integrand(lam):
        rho = np.exp(lam)
        t = rho * e
        g = h(lam) / np.abs(1.0 + t) ** a
        return (rho**a * g)[:, None] * np.exp(-np.outer(rho, w))

    res = integrate_finite(integrand, lam0, lam1, cfg)
    if not res.converged:
        raise ConvergenceError("complex Laplace integral did not converge")
    # head below rho0: G linear in rho, e^{-w rho} = 1 - w rho to far below tolerance
    rho0 = np.exp(lam0)
    g0 = complex(h(lam0)) / abs(1.0 + rho0 * e) ** a
    g1 = complex(h(lam0, 1)) / rho0  # dG/drho, the size factor is flat here
    head = rho0**a * (g0 / a + (g1 - w * g0) * rho0 / (a + 1))
    return (np.asarray(res.value) + head) * e**a


def _mellin_lhs(h: CubicSpline, mu: float, s: complex, cfg: QuadratureConfig) -> complex:
    """F*(s) along x = r e^{i theta}."""
    th = MELLIN_THETA
    e = np.exp(1j * th)
    lam0, lam1 = MELLIN_LOG_R

    def F_at(lam):
        return _laplace_ray(h, mu, np.exp(lam) * e, cfg)

    res = integrate_finite(lambda lam: F_at(lam) * np.exp(s * lam), lam0, lam1, cfg)
    if not res.converged:
        raise ConvergenceError("Mellin integral of F did not converge")
    total = complex(res.value)
    # head: F quadratic in lambda below lam0
    hh = 0.5
    fm, f0, fp = F_at(np.array([lam0 - hh, lam0, lam0 + hh]))
    F1 = (fp - fm) / (2 * hh)
    F2 = (fp - 2 * f0 + fm) / hh**2
    total += np.exp(s * lam0) * (f0 / s - F1 / s**2 + F2 / s**3)
    # tail: F = sum_k A_k x^{2mu-1-k}, k = 0, 1, 2, fitted at r1, 2 r1, 4 r1
    r1 = np.exp(lam1)
    xs = r1 * np.array([1.0, 2.0, 4.0]) * e
    M = np.stack([xs ** (2 * mu - 1 - k) for k in range(3)], axis=1)
    A = np.linalg.solve(M, F_at(np.log(r1 * np.array([1.0, 2.0, 4.0]))))
    for k in range(3):
        ex = s + 2 * mu - 1 - k
        total += A[k] * e ** (2 * mu - 1 - k) * (-(r1 ** ex) / ex)
    return complex(np.exp(1j * th * s) * total)


def _mellin_rhs(f: IndexFunction, G: SampledCurve, mu: float, s: np.ndarray, cfg: QuadratureConfig) -> np.ndarray:
    """Gamma(s) G*(1-2mu-s) along t = rho e^{-i phi}, vectorised over s.

    G on the ray dominates the cost and does not depend on s, so all points
    share one adaptive pass.
    """
    sg = 1 - 2 * mu - s
    e = np.exp(-1j * MELLIN_PHI)
    lam0, lam1 = MELLIN_LOG_RHO

    def integrand(lam):
        t = np.exp(lam) * e
        return _g_complex(f, mu, t, cfg)[:, None] * np.exp(np.outer(lam - 1j * MELLIN_PHI, sg))

    res = integrate_finite(integrand, lam0, lam1, cfg)
    if not res.converged:
        raise ConvergenceError("Mellin integral of G did not converge")
    total = np.asarray(res.value, dtype=complex)
    # head: G linear in t near 0
    t0 = np.exp(lam0) * e
    g0, g1 = _g_complex(f, mu, np.array([t0, 2 * t0]), cfg)
    b = (g1 - g0) / t0
    a = g0 - b * t0
    total = total + a * t0**sg / sg + b * t0 ** (sg + 1) / (sg + 1)
    # tail: the 1/L series of G continued along the ray
    tr = G.tail
    if tr is not None and not tr.is_zero:
        def tail_fn(z):
            t = np.exp(lam1 + z) * e
            L = np.log1p(t)
            ser = sum(c * L ** (-float(k)) for c, k in zip(tr.coefs, tr.orders))
            return ((1 + t) ** (-tr.power) * ser)[:, None] * np.exp(np.outer(lam1 + z - 1j * MELLIN_PHI, sg))

        r2 = integrate_semi_infinite(tail_fn, 0.0, 0.9 * (tr.power - float(np.max(sg.real))), cfg)
        total = total + np.asarray(r2.value)
    return specfun.gamma_c(s) * total


def mellin_factorization_residual(f: IndexFunction, p: TransformParams, s,
                                  cfg: QuadratureConfig = KERNEL_CFG, G: SampledCurve | None = None,
                                  ray: CubicSpline | None = None, return_sides: bool = False):
    """|F*(s) - Gamma(s) G*(1-2mu-s)| / (|F*| + |Gamma(s) G*|) for re(s) in (1/2, 3/4 - mu).

    The left side is the Mellin integral of F = Laplace(t^{-2mu} G) on a ray
    in the upper half plane; the right side integrates G, recomputed from f
    with the complex kernel, on a ray below the real axis. Both rays are
    legitimate deformations because F and G are analytic there and the arcs
    at 0 and infinity vanish on this strip.

    ``s`` may be a scalar or a 1-d array; the G-side work is shared.
    """
    scalar = np.ndim(s) == 0
    sv = np.atleast_1d(np.asarray(s, dtype=complex))
    if not p.mu < 0.25:
        raise PreconditionError("Mellin factorisation needs mu < 1/4")
    lo, hi = p.gamma_interval()
    bad = ~((lo < sv.real) & (sv.real < hi))
    if bad.any():
        raise PreconditionError(f"re(s)={sv.real[bad][0]} outside ({lo:.6g}, {hi:.6g})")
    if f.is_zero:
        z = np.zeros(sv.shape)
        out = (z, z.astype(complex), z.astype(complex))
    else:
        if G is None or G.support[1] < np.exp(MELLIN_LOG_RHO[1]):
            G = build_g_curve(f, p, np.exp(-MELLIN_LOG_RHO[1] - 1.0))
        if ray is None:
            ray = _g_ray(f, p.mu, cfg)
        lhs = np.array([_mellin_lhs(ray, p.mu, complex(si), cfg) for si in sv])
        # the G-side integrand cancels exponentially in |im s|: tighten with it
        u = float(np.max(np.abs(sv.imag)))
        rhs = _mellin_rhs(f, G, p.mu, sv, cfg.tightened(max(1e-2, 10.0 ** (-u / 4))))
        den = np.abs(lhs) + np.abs(rhs)
        resid = np.where(den == 0, 0.0, np.abs(lhs - rhs) / np.maximum(den, 1e-300))
        out = (resid, lhs, rhs)
    if scalar:
        out = (float(out[0][0]), complex(out[1][0]), complex(out[2][0]))
    return out if return_sides else out[0]


# ---------------------------------------------------------------- fractional operators


def frac_integral_rl(phi, order: float, y: float, cfg: QuadratureConfig = OUTER_CFG) -> float:
    """(1/Gamma(order)) int_0^y (y-x)^{order-1} phi(x) dx."""
    if not 0 < order <= 1:
        raise PreconditionError("order must lie in (0, 1]")
    if y <= 0:
        raise PreconditionError("y must be positive")
    # u = (y-x)^order / order absorbs the kernel: dx (y-x)^{order-1} = -du
    top = y**order / order

    def g(u):
        x = np.maximum(y - (order * u) ** (1.0 / order), 0.0)
        return np.asarray(phi(x))

    res = integrate_finite(g, 0.0, top, cfg)
    if not res.converged:
        raise ConvergenceError("fractional integral did not converge")
    return float(np.real(res.value)) / gamma_fn(order)


def frac_derivative_right(F, order: float, x, cfg: QuadratureConfig = KERNEL_CFG):
    """-(1/Gamma(1-order)) int_x^inf (y-x)^{-order} F'(y) dy.

    Substituting y = x(1 + e^s) turns the weak singularity at y = x and the
    algebraic decay at infinity into exponential decay at both ends of the
    s-line. F' is the analytic derivative of a SampledCurve (spline plus
    tail model) or else a Richardson difference of the callable.
    """
    if not 0 <= order < 1:
        raise PreconditionError("order must lie in [0, 1)")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa <= 0):
        raise PreconditionError("x must be positive")
    if isinstance(F, SampledCurve):
        if F.tail is None:
            raise MissingTailError("fractional derivative needs the curve's tail model")
        dF = F.derivative
        x_last = F.support[1]
        decay = max(F.tail.power + order, 0.0) + (1.0 if F.tail.rate > 0 else 0.0)
    else:
        def dF(y):
            return differentiate(F, y, cfg)
        x_last = float(xa.max())
        decay = 1.0 - order
    decay = max(decay, 0.25)
    c = 1.0 - order
    tol_log = np.log(cfg.tail_tol) - 8.0
    s_lo = tol_log / c
    s_hi = np.log(max(x_last, xa.max()) / xa.min()) + (-tol_log) / decay
    pref = xa ** c

    def integrand(s):
        y = np.outer(1.0 + np.exp(s), xa)
        return np.exp(c * s)[:, None] * np.asarray(dF(y.ravel())).reshape(y.shape) * pref[None, :]

    res = integrate_finite(integrand, s_lo, s_hi, cfg)
    if not res.converged:
        raise ConvergenceError("fractional derivative integral did not converge")
    out = -np.asarray(res.value) / gamma_fn(c)
    return out.item() if np.ndim(x) == 0 else out


# ---------------------------------------------------------------- inversion


def _inv_log_coef(mu, tau):
    return specfun._inv_coef(mu, tau)


def _head(mu: float, tau: float, P: SampledCurve) -> float:
    """int_0^{y0} kernel * D dy for y0 = first abscissa of P = y^{2mu} D.

    Near y = 0 the kernel is (2/pi) Re[C y^{-2i tau}] y^{2mu-1}; in u = -ln y
    this pairs e^{2i tau u} with P. P is modelled as a + b ln(u/u0) + c/u,
    matched in value, slope and curvature at u0, and the oscillatory
    integral is taken in the Abel sense.
    """
    y0 = P.support[0]
    u0 = -np.log(y0)
    P0, d1, d2 = P.coord_derivatives(np.log(y0))
    # derivatives with respect to u = -ln y
    p1, p2 = -d1, d2
    A = np.array([[1.0 / u0, -1.0 / u0**2], [-1.0 / u0**2, 2.0 / u0**3]])
    b, c = np.linalg.solve(A, [p1, p2])
    a = P0 - c / u0
    k = 2j * tau
    E = exp1(-k * u0)
    I = a * (-np.exp(k * u0) / k) - b * E / k + c * E
    C = np.exp(_inv_log_coef(mu, tau))
    return float((2 / np.pi) * (C * I).real)


def _p_curve(F: SampledCurve, mu: float, y_hi: float, cfg: QuadratureConfig) -> SampledCurve:
    """P = y^{2mu} D on ln y, from the first abscissa of F to beyond y_hi."""
    y0 = F.support[0]
    s = np.arange(np.log(y0), np.log(y_hi) + 0.5, LOG_X_STEP)
    y = np.exp(s)
    if mu == 0:
        D = F(y)
    else:
        D = frac_derivative_right(F, 2 * mu, y, cfg)
    return SampledCurve(y, y ** (2 * mu) * D, "log")


def _general_one(mu: float, tau: float, P: SampledCurve, cfg: QuadratureConfig) -> float:
    y0 = P.support[0]
    s0, s1 = np.log(y0), np.log(Y_BODY)

    def body(s):
        y = np.exp(s)
        return specfun.inversion_kernel_general(mu, tau, y) * P(y) * y ** (1 - 2 * mu)

    n = int((s1 - s0) * tau) + 8
    edges = list(np.linspace(s0, s1, n + 1)[1:-1])
    res = integrate_finite(body, s0, s1, cfg, breakpoints=edges)
    if not res.converged:
        raise ConvergenceError(f"inversion body integral did not converge at tau={tau}")
    total = float(res.value) + _head(mu, tau, P)
    if mu > 0:
        # kernel ~ y^{2mu-1}(A0 + A1/y) and P ~ P(Y)(Y/y)^q beyond Y
        A0 = specfun.inversion_kernel_asymptote(mu, tau)
        A1 = (specfun.inversion_kernel_general(mu, tau, Y_BODY) * Y_BODY ** (1 - 2 * mu) - A0) * Y_BODY
        PY = P(Y_BODY)
        q = -P.derivative(Y_BODY) * Y_BODY / PY if PY != 0 else 1.0
        if PY != 0:
            if q <= 0:
                raise ConvergenceError("transform does not decay fast enough for the inversion tail")
            total += PY * (A0 / q + A1 / (Y_BODY * (q + 1)))
    return total


def invert_general(F: SampledCurve, p: TransformParams, tau, cfg: QuadratureConfig = OUTER_CFG):
    """Recover f(tau) from F with the 1F2 kernel and D = D_-^{2mu} F.

    D is tabulated once per call on ln y (step 0.05) from the first abscissa
    of F to past Y_BODY; the body integral runs to Y_BODY, the region below
    the first abscissa is covered by ``_head`` and the algebraic kernel tail
    beyond Y_BODY in closed form.
    """
    p.require_inversion()
    taus = np.atleast_1d(np.asarray(tau, dtype=float))
    if np.any(taus <= 0):
        raise PreconditionError("tau must be positive")
    if F.tail is None:
        raise MissingTailError("inversion needs F with a tail model")
    if not np.any(F.values):
        out = np.zeros(taus.shape)
        return out.item() if np.ndim(tau) == 0 else out
    P = _p_curve(F, p.mu, Y_BODY, KERNEL_CFG)
    out = np.array([_general_one(p.mu, t, P, cfg) for t in taus])
    return out.item() if np.ndim(tau) == 0 else out


def invert_mu0(F: SampledCurve, tau, cfg: QuadratureConfig = OUTER_CFG):
    """f(tau) = int_0^inf psi(tau, y) e^{-2y} F(2y) dy with the Bessel-product kernel.

    The part y < y0 = x0/2 (x0 the first abscissa of F) uses the same
    regularised head as the general formula, to which this kernel reduces
    at mu = 0.
    """
    taus = np.atleast_1d(np.asarray(tau, dtype=float))
    if np.any(taus <= 0):
        raise PreconditionError("tau must be positive")
    if F.tail is None:
        raise MissingTailError("inversion needs F with a tail model")
    if not np.any(F.values):
        out = np.zeros(taus.shape)
        return out.item() if np.ndim(tau) == 0 else out
    x0 = F.support[0]
    y0 = 0.5 * x0
    out = np.empty(taus.shape)
    for i, tv in enumerate(taus):
        def body(s):
            y = np.exp(s)
            return specfun.inversion_kernel_mu0(tv, y) * np.exp(-2 * y) * F(2 * y) * y

        s0, s1 = np.log(y0), np.log(Y_SPLIT)
        n = int((s1 - s0) * tv) + 8
        r1 = integrate_finite(body, s0, s1, cfg, breakpoints=list(np.linspace(s0, s1, n + 1)[1:-1]))
        r2 = integrate_semi_infinite(
            lambda y: specfun.inversion_kernel_mu0(tv, y) * np.exp(-2 * y) * F(2 * y), Y_SPLIT, 1.5, cfg)
        if not (r1.converged and r2.converged):
            raise ConvergenceError(f"mu=0 inversion did not converge at tau={tv}")
        out[i] = float(r1.value) + float(r2.value) + _head(0.0, tv, F)
    return out.item() if np.ndim(tau) == 0 else out


def _en(k: int, z: complex) -> complex:
    # generalised exponential integral E_k(z) by upward recurrence from E_1
    e = complex(exp1(z))
    for n in range(1, k):
        e = (np.exp(-z) - z * e) / n
    return e


def olevskii_inverse_mu0(G: SampledCurve, tau, cfg: QuadratureConfig = OUTER_CFG):
    """4 tau tanh(pi tau) int_0^inf (t+1) 2F1(1/2-i tau, 1/2+i tau; 1; -t^2-2t) G(t) dt.

    The integrand decays only like cos(2 tau L)/L in L = ln(1+t). Past the
    sampled range the kernel is replaced by its leading term
    2 e^{-L} Re[B e^{2i tau L}], B = Gamma(2i tau)/Gamma^2(1/2+i tau), and
    the log-series tail of G is integrated termwise with E_k.
    """
    taus = np.atleast_1d(np.asarray(tau, dtype=float))
    if np.any(taus <= 0):
        raise PreconditionError("tau must be positive")
    if G.tail is None:
        raise MissingTailError("Olevskii inversion needs G with a tail model")
    t1 = G.support[1]
    L1 = float(np.log1p(t1))
    tr = G.tail
    out = np.empty(taus.shape)
    for i, tv in enumerate(taus):
        def body(L):
            t = np.expm1(L)
            return np.exp(2 * L) * specfun.gauss2f1_kernel(0.0, tv, t) * G(t)

        n = int(L1 * tv) + 8
        res = integrate_finite(body, 0.0, L1, cfg, breakpoints=list(np.linspace(0, L1, n + 1)[1:-1]))
        if not res.converged:
            raise ConvergenceError(f"Olevskii inversion did not converge at tau={tv}")
        total = float(res.value)
        if not tr.is_zero:
            if tr.rate > 0:
                r2 = integrate_semi_infinite(
                    lambda t: (t + 1) * specfun.gauss2f1_kernel(0.0, tv, t) * tr(t), t1, tr.rate, cfg)
                total += float(r2.value)
            else:
                B = np.exp(specfun.log_gamma(2j * tv) - 2 * specfun.log_gamma(0.5 + 1j * tv))
                acc = 0j
                for c, k in zip(tr.coefs, tr.orders):
                    z = (tr.power - 1 - 2j * tv) * L1
                    if k == 0 and tr.power <= 1:
                        raise ConvergenceError("G tail does not decay; Olevskii inversion diverges")
                    acc += c * L1 ** (1 - k) * _en(int(k), z) * np.exp(0)
                total += float(2 * (B * acc).real)
        out[i] = 4 * tv * np.tanh(np.pi * tv) * total
    return out.item() if np.ndim(tau) == 0 else out


# ---------------------------------------------------------------- Parseval


def parseval_residual(f: IndexFunction, p: TransformParams, cfg: QuadratureConfig = OUTER_CFG,
                      G: SampledCurve | None = None, return_sides: bool = False):
    """Relative residual of int f^2 |Gamma(2i tau)|^2/|Gamma(1/2-mu+i tau)|^4 dtau
    = (1/pi) int G^2 (t(t+2))^{-2mu} (t+1) dt.

    In L = ln(1+t) the right integrand is g^2 (1 - e^{-2L})^{-2mu} with
    g = (1+t)^{1-2mu} G ~ sum c_k L^{-k}; the part past the sampled range
    is integrated from that series in closed form.
    """
    mu = p.mu
    if not -0.5 < mu < 0.25:
        raise PreconditionError("Parseval identity needs mu in (-1/2, 1/4)")
    if f.is_zero:
        return (0.0, 0.0, 0.0) if return_sides else 0.0

    def w_lhs(tau):
        lg = 2 * specfun.log_gamma(2j * tau).real - 4 * specfun.log_gamma(0.5 - mu + 1j * tau).real
        return f(tau) ** 2 * np.exp(lg)

    # tau -> 0: |Gamma(2i tau)|^2 ~ 1/(4 tau^2) cancels against f^2 = O(tau^2)
    # for the corpus; start just off the pole. The weight grows like
    # tau^{4mu-1}, so the envelope rate keeps one unit of headroom below 2r.
    t_eps = 1e-7
    lhs_res = integrate_semi_infinite(w_lhs, t_eps, max(2 * f.decay_rate - 1.0, 0.5 * f.decay_rate), cfg)
    lhs = float(lhs_res.value)
    if G is None:
        G = build_g_curve(f, p)
    t1 = G.support[1]
    L1 = float(np.log1p(t1))

    def rhs_body(L):
        t = np.expm1(L)
        g = G(t) * (1 + t) ** (1 - 2 * mu)
        with np.errstate(divide="ignore"):
            wt = (-np.expm1(-2 * L)) ** (-2 * mu)
        return g * g * wt

    r = integrate_finite(rhs_body, 0.0, L1, cfg)
    rhs = float(r.value)
    tr = G.tail
    if tr.rate == 0 and abs(tr.power - (1 - 2 * mu)) < 1e-12:
        for cj, j in zip(tr.coefs, tr.orders):
            for ck, k in zip(tr.coefs, tr.orders):
                if j + k <= 1:
                    raise ConvergenceError("G tail too slow for the Parseval integral")
                rhs += cj * ck * L1 ** (1 - j - k) / (j + k - 1)
    else:
        r2 = integrate_semi_infinite(lambda t: tr(t) ** 2 * (t * (t + 2)) ** (-2 * mu) * (t + 1), t1,
                                     max(2 * tr.rate, 1e-3), cfg)
        rhs += float(r2.value)
    rhs /= np.pi
    den = abs(lhs) + abs(rhs)
    resid = 0.0 if den < cfg.abs_tol else abs(lhs - rhs) / den
    return (resid, lhs, rhs) if return_sides else resid
