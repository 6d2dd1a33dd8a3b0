"""Pure numpy implementations of the hot kernels.

Signatures mirror the compiled ``_core`` module exactly so that
``itx._kernels`` can swap one for the other at import time.
"""

import numpy as np
from scipy.special import digamma, loggamma as _sp_loggamma

# Series in w = 1 - 1/(t+1)^2 is used below this value, the connection
# formula around w = 1 above it.
W_SPLIT = 0.5
# The w-series grows like exp(2 tau sqrt(w)) before converging, so large
# tau moves to the connection formula earlier.
W_FLOOR = 0.06
GROWTH_MAX = 5.0
# Below this tau the connection formula cancels badly; switch to the
# logarithmic (c = a + b) case.
TAU_DEGENERATE = 1e-6
MAX_TERMS = 100000
RESCALE = 1e150
LOG_RESCALE = np.log(RESCALE)


def loggamma(z):
    """Principal-branch log Gamma for complex input (array or scalar)."""
    return _sp_loggamma(np.asarray(z, dtype=complex))


def _series_aac(a, c, x):
    """sum_k (a)_k^2 / ((c)_k k!) x^k, elementwise, complex."""
    s = np.ones(np.broadcast(a, c, x).shape, dtype=complex)
    term = s.copy()
    active = np.ones(s.shape, dtype=bool)
    for k in range(MAX_TERMS):
        if not active.any():
            break
        term = np.where(active, term * (a + k) ** 2 / ((c + k) * (k + 1)) * x, 0)
        s = s + term
        active = active & ~((np.abs(term) < 1e-17 * np.abs(s)) & (k > 2))
    else:
        raise ArithmeticError("2F1 series did not converge")
    return s


def series_aac(a, c, x):
    """sum_k (a)_k^2 / ((c)_k k!) x^k, elementwise with broadcasting, complex x."""
    return _series_aac(np.asarray(a, dtype=complex), np.asarray(c, dtype=complex), np.asarray(x, dtype=complex))


def _kernel_degenerate(mu, t):
    # tau = 0: 2F1(a0, a0; 2 a0; w) with a0 = 1/2 - mu, expanded about w = 1
    a0 = 0.5 - mu
    tb = 1.0 + t
    v = 1.0 / tb**2
    lnv = np.log(v)
    s = np.zeros_like(t, dtype=float)
    term = np.ones_like(t, dtype=float)
    psi1 = -np.euler_gamma
    psia = float(digamma(a0))
    active = np.ones(t.shape, dtype=bool)
    for n in range(MAX_TERMS):
        contrib = term * (2 * psi1 - 2 * psia - lnv)
        s = s + np.where(active, contrib, 0)
        active = active & ~((np.abs(contrib) < 1e-17 * np.abs(s)) & (n > 2))
        if not active.any():
            break
        term = term * (a0 + n) ** 2 / (n + 1) ** 2 * v
        psi1 += 1.0 / (n + 1)
        psia += 1.0 / (a0 + n)
    pref = np.exp(float(_sp_loggamma(2 * a0).real) - 2 * float(_sp_loggamma(a0).real))
    return tb ** (-2 * a0) * pref * s


def gauss2f1_pairs(mu, tau, t):
    """Kernel 2F1(1/2-mu-i tau, 1/2-mu+i tau; 1-2mu; -t^2-2t), elementwise."""
    mu = float(mu)
    U, T = np.broadcast_arrays(np.asarray(tau, dtype=float), np.asarray(t, dtype=float))
    U = np.abs(U)
    out = np.empty(T.shape)
    tb = 1.0 + T
    lntb = np.log1p(T)
    w = T * (T + 2.0) / tb**2
    v = 1.0 / tb**2
    c = 1.0 - 2.0 * mu

    direct = (w < W_FLOOR) | ((w < W_SPLIT) & (2 * U * np.sqrt(w) < GROWTH_MAX))
    degen = (~direct) & (U < TAU_DEGENERATE)
    conn = (~direct) & (~degen)

    if direct.any():
        a = 0.5 - mu - 1j * U[direct]
        s = _series_aac(a, c, w[direct])
        out[direct] = (np.exp(-2 * a * lntb[direct]) * s).real
    if conn.any():
        u = U[conn]
        a = 0.5 - mu - 1j * u
        s = _series_aac(a, 1.0 - 2j * u, v[conn])
        coef = np.exp(_sp_loggamma(c) + _sp_loggamma(2j * u) - 2 * _sp_loggamma(0.5 - mu + 1j * u))
        out[conn] = 2 * tb[conn] ** (2 * mu - 1) * (np.exp(2j * u * lntb[conn]) * coef * s).real
    if degen.any():
        out[degen] = _kernel_degenerate(mu, T[degen])
    return out


def gauss2f1_matrix(mu, tau, t):
    """Same kernel on the outer product grid, shape (len(t), len(tau))."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    T, U = np.meshgrid(t, tau, indexing="ij")
    return gauss2f1_pairs(mu, U, T)


def hyp1f2_scaled(a, b1, b2, z):
    """1F2(a; b1, b2; z) for real z >= 0 as (mantissa, log_scale).

    The value is ``mantissa * exp(log_scale)``; rescaling keeps the
    partial sums finite for arguments where the function overflows.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    s = np.ones(z.shape, dtype=complex)
    term = s.copy()
    lsc = np.zeros(z.shape)
    active = np.ones(z.shape, dtype=bool)
    for k in range(MAX_TERMS):
        if not active.any():
            break
        ratio = (a + k) / ((b1 + k) * (b2 + k) * (k + 1)) * z
        term = np.where(active, term * ratio, 0)
        s = s + term
        big = np.abs(s) > RESCALE
        if big.any():
            s[big] /= RESCALE
            term[big] /= RESCALE
            lsc[big] += LOG_RESCALE
        done = (np.abs(term) < 1e-17 * np.abs(s)) & (np.abs(ratio) < 0.5) & (k > 2)
        active = active & ~done
    else:
        raise ArithmeticError("1F2 series did not converge")
    return s, lsc


def bessel_i_series(nu, y):
    """I_nu(y) for complex order nu by the ascending series."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    z = y * y / 4.0
    term = np.exp(nu * np.log(y / 2.0) - _sp_loggamma(nu + 1.0))
    s = term.copy()
    active = np.ones(y.shape, dtype=bool)
    for k in range(MAX_TERMS):
        if not active.any():
            break
        ratio = z / ((k + 1) * (nu + k + 1))
        term = np.where(active, term * ratio, 0)
        s = s + term
        done = (np.abs(term) < 1e-17 * np.abs(s)) & (np.abs(ratio) < 0.5)
        active = active & ~done
    return s
