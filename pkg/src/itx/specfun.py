"""Special functions of the transform: complex gamma, imaginary-order Bessel
functions, the Gauss and 1F2 kernels and the squared Whittaker function.

Functions documented as real are computed in complex arithmetic where
needed; the imaginary residue is checked against the tolerance before it
is dropped.
"""

from __future__ import annotations

import numpy as np
from scipy import optimize
from scipy.special import jv

from . import _kernels
from .errors import (
    AccuracyLossError,
    ConsistencyError,
    ConvergenceError,
    OverflowRangeError,
    PoleError,
    PreconditionError,
)
from .quadrature import KERNEL_CFG, QuadratureConfig, integrate_finite

__all__ = [
    "log_gamma",
    "gamma_c",
    "macdonald_imag",
    "macdonald_imag_derivative",
    "bessel_i_imag",
    "bessel_j",
    "bessel_j_bound_constant",
    "gauss2f1_kernel",
    "tricomi_u",
    "whittaker_w",
    "whittaker_w_sq",
    "scaled_w_sq",
    "hyp1f2",
    "phi_kernel",
    "inversion_kernel_general",
    "inversion_kernel_asymptote",
    "inversion_kernel_mu0",
]

POLE_TOL = 1e-8
BESSEL_Y_CAP = 700.0
HYP1F2_Z_CAP = 1e6


def _check_poles(z):
    z = np.asarray(z, dtype=complex)
    near = (np.abs(z.imag) < POLE_TOL) & (z.real < 0.5)
    if near.any():
        re = z.real[near]
        if np.any(np.abs(re - np.round(re)) < POLE_TOL) and np.any(np.round(re) <= 0):
            bad = z[near][np.abs(re - np.round(re)) < POLE_TOL][0]
            raise PoleError(f"gamma argument {bad} is at a pole")


def log_gamma(z):
    """Principal-branch log Gamma(z) for complex z (scalar or array)."""
    _check_poles(z)
    out = _kernels.loggamma(np.asarray(z, dtype=complex))
    return complex(out) if np.ndim(out) == 0 else out


def gamma_c(z):
    """Gamma(z) for complex z."""
    return np.exp(log_gamma(z))


def _real(value, cfg: QuadratureConfig, what: str):
    value = np.asarray(value)
    if np.iscomplexobj(value):
        lim = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(value.real))
        if np.any(np.abs(value.imag) > lim):
            raise ConsistencyError(f"{what}: imaginary residue {np.max(np.abs(value.imag)):.3g}")
        value = value.real
    return value.item() if value.ndim == 0 else value


# ---------------------------------------------------------------- Macdonald


def _cosh_cutoff(x, abs_tol):
    # e^{-x cosh T} < abs_tol * 1e-2
    c = np.log(100.0 / abs_tol) / np.min(x)
    return float(np.arccosh(max(c, 1.0))) + 0.5


def _macdonald_integral(tau, x, cfg, weight_cosh=False):
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    T = _cosh_cutoff(x, cfg.abs_tol)

    def f(t):
        e = np.exp(-np.outer(np.cosh(t), x))  # (nt, nx)
        if weight_cosh:
            e = e * np.cosh(t)[:, None]
        return e[:, :, None] * np.cos(np.outer(t, tau))[:, None, :]

    res = integrate_finite(f, 0.0, T, cfg.tightened(1e-2))
    val = np.asarray(res.value)  # (nx, ntau)
    # cancellation: achievable absolute accuracy is ~ eps * int |integrand|
    def absolute(t):
        e = np.exp(-np.outer(np.cosh(t), x))
        return e * np.cosh(t)[:, None] if weight_cosh else e

    scale = np.asarray(integrate_finite(absolute, 0.0, T, cfg).value)
    floor = 1e2 * np.finfo(float).eps * scale[:, None]
    lim = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(val))
    if np.any(floor > lim):
        raise AccuracyLossError("K_{i tau}(x): cancellation exceeds tolerance (large tau, small x)")
    if not res.converged:
        raise ConvergenceError(f"Macdonald integral did not converge (tau={tau}, x={x})")
    return val


def macdonald_imag(tau, x, cfg: QuadratureConfig = KERNEL_CFG):
    """K_{i tau}(x) from the integral of exp(-x cosh t) cos(tau t) over t > 0.

    ``tau`` and ``x`` may be arrays; the result has shape (len(x), len(tau))
    squeezed to the inputs' dimensionality.
    """
    if np.any(np.asarray(x) <= 0):
        raise PreconditionError("macdonald_imag requires x > 0")
    val = _macdonald_integral(tau, x, cfg)
    return _squeeze(val, tau, x)


def macdonald_imag_derivative(tau, x, cfg: QuadratureConfig = KERNEL_CFG):
    """d/dx K_{i tau}(x) = -int cosh(t) exp(-x cosh t) cos(tau t) dt."""
    if np.any(np.asarray(x) <= 0):
        raise PreconditionError("x must be positive")
    val = -_macdonald_integral(tau, x, cfg, weight_cosh=True)
    return _squeeze(val, tau, x)


def _squeeze(val, tau, x):
    if np.ndim(tau) == 0:
        val = val[:, 0]
    if np.ndim(x) == 0:
        val = val[0]
    return val.item() if np.ndim(val) == 0 else val


# ---------------------------------------------------------------- Bessel


def bessel_i_imag(tau, y, order_shift: int = 0):
    """I_{s + i tau}(y) from the ascending series, s = ``order_shift``.

    Returns complex values; ``order_shift=1`` gives the neighbour used for
    derivatives, I'_nu = I_{nu+1} + (nu / y) I_nu.
    """
    yv = np.asarray(y, dtype=float)
    if np.any(yv <= 0):
        raise PreconditionError("bessel_i_imag requires y > 0")
    if np.any(yv > BESSEL_Y_CAP):
        raise OverflowRangeError(f"I_nu(y) overflows beyond y={BESSEL_Y_CAP}")
    nu = complex(order_shift, float(tau))
    out = _kernels.bessel_i_series(nu, np.atleast_1d(yv))
    return complex(out[0]) if yv.ndim == 0 else out


def bessel_j(nu: float, x):
    """J_nu(x) for real order (scipy's Amos-based routine)."""
    if nu <= -1:
        raise PreconditionError("bessel_j requires nu > -1")
    if np.any(np.asarray(x) <= 0):
        raise PreconditionError("bessel_j requires x > 0")
    return jv(nu, x)


def bessel_j_bound_constant(nu: float) -> float:
    """C_nu with |J_nu(x)| <= C_nu x^{-1/2} for x > 0.

    Maximum of sqrt(x)|J_nu(x)| over a dense grid on (0, 200], refined
    locally, combined with the Hankel envelope beyond 200.
    """
    if nu < -0.5:
        raise PreconditionError("sqrt(x) J_nu(x) is unbounded at 0 for nu < -1/2")
    x = np.concatenate([np.geomspace(1e-8, 1.0, 2000), np.linspace(1.0, 200.0, 200000)])
    g = np.sqrt(x) * np.abs(jv(nu, x))
    i = int(np.argmax(g))
    lo, hi = x[max(i - 1, 0)], x[min(i + 1, x.size - 1)]
    best = g[i]
    if hi > lo:
        r = optimize.minimize_scalar(lambda s: -np.sqrt(s) * abs(jv(nu, s)), bounds=(lo, hi), method="bounded",
                                     options={"xatol": 1e-12})
        best = max(best, -r.fun)
    # beyond 200: sqrt(x)|J_nu| <= sqrt(2/pi) (1 + |4nu^2-1|/(8x)) to first order, padded
    env = np.sqrt(2 / np.pi) * (1 + abs(4 * nu * nu - 1) / 1600.0) * (1 + 1e-3)
    if nu == 0.5 or nu == -0.5:
        env = np.sqrt(2 / np.pi)
    return float(max(best, env))


# ---------------------------------------------------------------- Gauss kernel


def gauss2f1_kernel(mu: float, tau, t):
    """2F1(1/2-mu-i tau, 1/2-mu+i tau; 1-2mu; -t^2-2t), real, broadcast over tau and t."""
    if mu >= 0.5:
        raise PreconditionError("gauss2f1_kernel requires mu < 1/2")
    if np.any(np.asarray(t) < 0):
        raise PreconditionError("gauss2f1_kernel requires t >= 0")
    try:
        out = _kernels.gauss2f1_pairs(mu, tau, t)
    except ArithmeticError as exc:
        raise ConvergenceError(str(exc)) from None
    return out.item() if np.ndim(out) == 0 else out


def _gauss_matrix(mu, tau, t):
    try:
        return _kernels.gauss2f1_matrix(mu, tau, t)
    except ArithmeticError as exc:
        raise ConvergenceError(str(exc)) from None


# ---------------------------------------------------------------- Whittaker


def tricomi_u(a: complex, b: complex, x: float, cfg: QuadratureConfig = KERNEL_CFG) -> complex:
    """U(a, b, x) from (1/Gamma(a)) int_0^inf e^{-xt} t^{a-1} (1+t)^{b-a-1} dt, Re a > 0.

    Integrated in s = ln t, where both ends decay exponentially.
    """
    a = complex(a)
    b = complex(b)
    if a.real <= 0:
        raise PreconditionError("tricomi_u requires re(a) > 0")
    if x <= 0:
        raise PreconditionError("tricomi_u requires x > 0")
    tol = cfg.abs_tol * 1e-3
    s_lo = np.log(tol * a.real) / a.real
    p = max((b - a - 1).real + a.real, 0.0)
    s_hi = np.log((np.log(1 / tol) + 30 + p * 5) / x)
    for _ in range(60):
        t = np.exp(s_hi)
        if x * t - p * np.log(t) > np.log(1 / tol) + 10:
            break
        s_hi += 0.5

    def f(s):
        return np.exp(a * s + (b - a - 1) * np.log1p(np.exp(s)) - x * np.exp(s))

    res = integrate_finite(f, s_lo, s_hi, cfg)
    if not res.converged:
        raise ConvergenceError("tricomi_u quadrature did not converge")
    return complex(res.value * np.exp(-log_gamma(a)))


def whittaker_w(mu: float, tau: float, x: float, cfg: QuadratureConfig = KERNEL_CFG) -> float:
    """W_{mu, i tau}(x) = e^{-x/2} x^{1/2+i tau} U(1/2+i tau-mu, 1+2i tau, x), real."""
    if mu >= 0.5:
        raise PreconditionError("whittaker_w requires mu < 1/2")
    if x <= 0:
        raise PreconditionError("whittaker_w requires x > 0")
    u = tricomi_u(0.5 + 1j * tau - mu, 1 + 2j * tau, x, cfg)
    w = np.exp(-x / 2 + (0.5 + 1j * tau) * np.log(x)) * u
    return _real(w, cfg.replace(abs_tol=max(cfg.abs_tol, 1e-9), rel_tol=max(cfg.rel_tol, 1e-7)), "whittaker_w")


def scaled_w_sq(mu: float, tau, x: float, cfg: QuadratureConfig = KERNEL_CFG):
    """(e^x / x) W^2_{mu, i tau}(x), i.e. (1/Gamma(1-2mu)) int t^{-2mu} e^{-xt} 2F1(...) dt.

    Vectorised over ``tau``: one adaptive sweep in s = ln t serves every tau.
    """
    if mu >= 0.5:
        raise PreconditionError("whittaker_w_sq requires mu < 1/2")
    if x <= 0:
        raise PreconditionError("whittaker_w_sq requires x > 0")
    tau_arr = np.atleast_1d(np.asarray(tau, dtype=float))
    c = 1.0 - 2.0 * mu
    tol = cfg.abs_tol * 1e-3
    s_lo = np.log(tol * c) / c
    s_hi = np.log((np.log(1 / tol) + 40.0) / x)

    def f(s):
        t = np.exp(s)
        w = np.exp(c * s - x * t)
        return w[:, None] * _gauss_matrix(mu, tau_arr, t)

    res = integrate_finite(f, s_lo, s_hi, cfg.tightened(min(1.0, x ** (2 * mu - 1))))
    if not res.converged:
        raise ConvergenceError(f"W^2 quadrature did not converge near s in {res.worst_interval}")
    # head below s_lo, where 2F1 ~ 1 and e^{-xt} ~ 1
    head = np.exp(c * s_lo) / c
    val = (np.asarray(res.value) + head) * np.exp(-log_gamma(c).real)
    return val.item() if np.ndim(tau) == 0 else val


def whittaker_w_sq(mu: float, tau, x: float, cfg: QuadratureConfig = KERNEL_CFG):
    """W^2_{mu, i tau}(x) by quadrature of the 2F1 integral representation."""
    val = x * np.exp(-x) * np.asarray(scaled_w_sq(mu, tau, x, cfg))
    if np.any(val < -max(cfg.abs_tol, 1e-12)):
        raise ConsistencyError("W^2 evaluated negative beyond tolerance")
    return val.item() if np.ndim(val) == 0 else val


# ---------------------------------------------------------------- 1F2 kernels


def hyp1f2(a: complex, b1: complex, b2: complex, z) -> complex:
    """1F2(a; b1, b2; z) for real z >= 0 by its Taylor series."""
    for b in (b1, b2):
        b = complex(b)
        if abs(b.imag) < POLE_TOL and b.real <= 0 and abs(b.real - round(b.real)) < POLE_TOL:
            raise PoleError(f"lower parameter {b} is a non-positive integer")
    zv = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(zv < 0):
        raise PreconditionError("hyp1f2 requires z >= 0")
    if np.any(zv > HYP1F2_Z_CAP):
        raise ConvergenceError(f"hyp1f2: z beyond configured range {HYP1F2_Z_CAP:g}")
    m, ls = _kernels.hyp1f2_scaled(complex(a), complex(b1), complex(b2), zv)
    if np.any(ls > 700):
        raise OverflowRangeError("1F2 value overflows double precision")
    out = m * np.exp(ls)
    return complex(out[0]) if np.ndim(z) == 0 else out


def _check_mu_inv(mu):
    if not -0.5 < mu < 0.25:
        raise PreconditionError(f"mu={mu} outside (-1/2, 1/4)")


def _inv_coef(mu, tau):
    # log of Gamma^2(1/2-mu-i tau) / (Gamma(-2i tau) Gamma(2(mu-i tau)))
    return 2 * log_gamma(0.5 - mu - 1j * tau) - log_gamma(-2j * tau) - log_gamma(2 * (mu - 1j * tau))


def phi_kernel(mu: float, tau: float, x):
    """phi_{mu,i tau}(x) = -2 e^{-x} x^{2mu-1} Re[x^{-2i tau} Gamma(2i tau)
    / (Gamma^2(1/2-mu+i tau) Gamma(2(mu-i tau))) (1F2(1/2+mu-i tau; 1-2i tau, mu-i tau; x^2/4) - 1)].
    """
    _check_mu_inv(mu)
    if tau <= 0:
        raise PreconditionError("phi_kernel requires tau > 0")
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xv <= 0):
        raise PreconditionError("phi_kernel requires x > 0")
    a, b1, b2 = 0.5 + mu - 1j * tau, 1 - 2j * tau, mu - 1j * tau
    lc = log_gamma(2j * tau) - 2 * log_gamma(0.5 - mu + 1j * tau) - log_gamma(2 * (mu - 1j * tau))
    z = xv * xv / 4
    small = z < 1.0
    out = np.empty(xv.shape)
    if small.any():
        # 1F2 - 1 summed from the first term to avoid cancellation
        zs = z[small]
        term = a / (b1 * b2) * zs + 0j
        s = term.copy()
        for k in range(1, 200):
            term = term * (a + k) / ((b1 + k) * (b2 + k) * (k + 1)) * zs
            s += term
            if np.all(np.abs(term) <= 1e-17 * np.abs(s)):
                break
        xs = xv[small]
        out[small] = -2 * np.real(np.exp(lc - 2j * tau * np.log(xs)) * s) * np.exp(-xs) * xs ** (2 * mu - 1)
    if (~small).any():
        xl = xv[~small]
        m, ls = _kernels.hyp1f2_scaled(a, b1, b2, z[~small])
        lg = lc + ls - xl - 2j * tau * np.log(xl) + (2 * mu - 1) * np.log(xl)
        out[~small] = -2 * (np.exp(lg) * m - np.exp(lc - xl - 2j * tau * np.log(xl) + (2 * mu - 1) * np.log(xl))).real
    return out.item() if np.ndim(x) == 0 else out


def inversion_kernel_general(mu: float, tau: float, y):
    """(2/pi) Re[C 1F2(1/2+mu-i tau; 1-2i tau, mu-i tau; y^2/4) y^{-2i tau}] e^{-y} y^{2mu-1},
    C = Gamma^2(1/2-mu-i tau) / (Gamma(-2i tau) Gamma(2(mu-i tau))).

    The series is rescaled internally so large y does not overflow.
    """
    if not 0 <= mu < 0.25:
        raise PreconditionError(f"mu={mu} outside [0, 1/4)")
    if tau <= 0:
        raise PreconditionError("tau must be positive")
    yv = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(yv <= 0):
        raise PreconditionError("y must be positive")
    lc = _inv_coef(mu, tau)
    m, ls = _kernels.hyp1f2_scaled(0.5 + mu - 1j * tau, 1 - 2j * tau, mu - 1j * tau, yv * yv / 4)
    lg = lc + ls - yv - 2j * tau * np.log(yv) + (2 * mu - 1) * np.log(yv)
    out = (2 / np.pi) * (np.exp(lg) * m).real
    return out.item() if np.ndim(y) == 0 else out


def inversion_kernel_asymptote(mu: float, tau: float) -> float:
    """Limit of y^{1-2mu} times the general inversion kernel as y -> inf.

    Equals (2/pi) Re[-2i tau 2^{-2mu} Gamma^2(1/2-mu-i tau) / Gamma^2(1/2+mu-i tau)];
    it vanishes at mu = 0, where the kernel decays exponentially.
    """
    lg = 2 * log_gamma(0.5 - mu - 1j * tau) - 2 * log_gamma(0.5 + mu - 1j * tau)
    return float((2 / np.pi) * (-2j * tau * 2 ** (-2 * mu) * np.exp(lg)).real)


def inversion_kernel_mu0(tau: float, y, cfg: QuadratureConfig = KERNEL_CFG, *, split: float = 1.5):
    """psi(tau, y) = -4 tau d/dy Im[I^2_{i tau}(y)], real.

    For y < ``split`` the derivative is formed analytically from the series,
    -8 tau Im(I I') with I' = I_{1+i tau} + (i tau / y) I. Beyond it Im I is
    tiny next to Re I and the series loses it to cancellation, so the
    equivalent form (8 tau sinh(pi tau)/pi) d/dy[K_{i tau} Re I_{i tau}] is
    used with K and K' from quadrature.
    """
    yv = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(yv <= 0):
        raise PreconditionError("inversion_kernel_mu0 requires y > 0")
    if tau < 0:
        raise PreconditionError("tau must be non-negative")
    out = np.zeros(yv.shape)
    if tau == 0:
        return out.item() if np.ndim(y) == 0 else out
    lo = yv < split
    if lo.any():
        I = bessel_i_imag(tau, yv[lo])
        dI = bessel_i_imag(tau, yv[lo], 1) + (1j * tau / yv[lo]) * I
        out[lo] = -8 * tau * np.imag(I * dI)
    if (~lo).any():
        yh = yv[~lo]
        I = bessel_i_imag(tau, yh)
        dI = bessel_i_imag(tau, yh, 1) + (1j * tau / yh) * I
        K = np.atleast_1d(macdonald_imag(tau, yh, cfg))
        dK = np.atleast_1d(macdonald_imag_derivative(tau, yh, cfg))
        out[~lo] = 8 * tau * np.sinh(np.pi * tau) / np.pi * (dK * I.real + K * dI.real)
    return out.item() if np.ndim(y) == 0 else out


def gauss2f1_kernel_complex(mu: float, tau, t):
    """The Gauss kernel continued to complex t with re(t) > 0 (array broadcast).

    Same Pfaff form as the real kernel; near t = 0 the w-series is summed,
    elsewhere both terms of the connection formula about v = 1/(t+1)^2 are
    kept, since they are no longer complex conjugates off the real axis.
    Used by the contour-rotated Mellin check.
    """
    from ._fallback import GROWTH_MAX, W_FLOOR, W_SPLIT

    _series_aac = _kernels.series_aac

    U, T = np.broadcast_arrays(np.abs(np.asarray(tau, dtype=float)), np.asarray(t, dtype=complex))
    out = np.empty(T.shape, dtype=complex)
    c = 1.0 - 2.0 * mu
    tb = 1.0 + T
    lntb = np.log(tb)
    w = T * (T + 2.0) / tb**2
    v = 1.0 / tb**2
    aw = np.abs(w)
    direct = (aw < W_FLOOR) | ((aw < W_SPLIT) & (2 * U * np.sqrt(aw) < GROWTH_MAX))
    if direct.any():
        a = 0.5 - mu - 1j * U[direct]
        out[direct] = np.exp(-2 * a * lntb[direct]) * _series_aac(a, c, w[direct])
    conn = ~direct
    if conn.any():
        u = U[conn]
        a = 0.5 - mu - 1j * u
        ln = lntb[conn]
        lc = _kernels.loggamma(c + 0j)
        A1 = np.exp(lc + _kernels.loggamma(2j * u) - 2 * _kernels.loggamma(0.5 - mu + 1j * u))
        A2 = np.exp(lc + _kernels.loggamma(-2j * u) - 2 * _kernels.loggamma(a))
        s1 = _series_aac(a, 1.0 - 2j * u, v[conn])
        s2 = _series_aac(c - a, 1.0 + 2j * u, v[conn])
        out[conn] = np.exp(-2 * a * ln) * (A1 * s1 + np.exp(-4j * u * ln) * A2 * s2)
    return out
