# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: complex log-gamma, the Gauss 2F1 index kernel, a
rescaled 1F2 series and the imaginary-order Bessel I series.

Signatures match ``itx._fallback``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, fabs, sqrt, NAN

cnp.import_array()

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double complex clog(double complex)
    double cabs(double complex)
    double creal(double complex)
    double cimag(double complex)

cdef double W_SPLIT = 0.5
cdef double W_FLOOR = 0.06
cdef double GROWTH_MAX = 5.0
cdef double TAU_DEGENERATE = 1e-6
cdef int MAX_TERMS = 100000
cdef double RESCALE = 1e150
cdef double EULER = 0.57721566490153286061
cdef double HALF_LOG_2PI = 0.91893853320467274178

cdef double[9] LANCZOS = [
    0.99999999999980993, 676.5203681218851, -1259.1392167224028,
    771.32342877765313, -176.61502916214059, 12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7]


cdef double complex _lgamma_lanczos(double complex z) noexcept nogil:
    # valid for re(z) >= 0.5, g = 7
    cdef double complex x, t
    cdef int i
    z = z - 1.0
    x = LANCZOS[0]
    for i in range(1, 9):
        x = x + LANCZOS[i] / (z + i)
    t = z + 7.5
    return HALF_LOG_2PI + (z + 0.5) * clog(t) - t + clog(x)


cdef double complex c_loggamma(double complex z) noexcept nogil:
    # shift right with lnG(z) = lnG(z+1) - ln z; keeps the standard branch
    cdef double complex acc = 0.0
    while creal(z) < 0.5:
        acc = acc + clog(z)
        z = z + 1.0
    return _lgamma_lanczos(z) - acc


cdef double c_digamma(double x) noexcept nogil:
    cdef double acc = 0.0, x2
    while x < 6.0:
        acc -= 1.0 / x
        x += 1.0
    x2 = 1.0 / (x * x)
    return acc + log(x) - 0.5 / x - x2 * (1.0 / 12 - x2 * (1.0 / 120 - x2 * (1.0 / 252 - x2 * (1.0 / 240 - x2 / 132))))


def loggamma(z):
    """Principal-branch log Gamma (Lanczos, g=7) for complex input."""
    arr = np.asarray(z, dtype=complex)
    flat = np.ascontiguousarray(arr.ravel())
    out = np.empty_like(flat)
    cdef double complex[::1] zin = flat
    cdef double complex[::1] zout = out
    cdef Py_ssize_t i, n = flat.shape[0]
    with nogil:
        for i in range(n):
            zout[i] = c_loggamma(zin[i])
    return out.reshape(arr.shape)


cdef double complex _series_aac(double complex a, double complex c, double x) noexcept nogil:
    cdef double complex s = 1.0, term = 1.0
    cdef int k
    for k in range(MAX_TERMS):
        term = term * (a + k) * (a + k) / ((c + k) * (k + 1)) * x
        s = s + term
        if k > 2 and cabs(term) < 1e-17 * cabs(s):
            return s
    return s * NAN


cdef double _kernel_degenerate(double mu, double t) noexcept nogil:
    cdef double a0 = 0.5 - mu
    cdef double tb = 1.0 + t
    cdef double v = 1.0 / (tb * tb)
    cdef double lnv = log(v)
    cdef double s = 0.0, term = 1.0, contrib
    cdef double psi1 = -EULER, psia = c_digamma(a0)
    cdef int n
    for n in range(MAX_TERMS):
        contrib = term * (2 * psi1 - 2 * psia - lnv)
        s += contrib
        if n > 2 and fabs(contrib) < 1e-17 * fabs(s):
            break
        term = term * (a0 + n) * (a0 + n) / ((n + 1.0) * (n + 1.0)) * v
        psi1 += 1.0 / (n + 1)
        psia += 1.0 / (a0 + n)
    cdef double pref = creal(cexp(c_loggamma(2 * a0) - 2 * c_loggamma(a0)))
    return creal(cexp(-2 * a0 * log(tb))) * pref * s


cdef double c_gauss2f1(double mu, double tau, double t) noexcept nogil:
    cdef double tb = 1.0 + t
    cdef double lntb = log(tb)
    cdef double w = t * (t + 2.0) / (tb * tb)
    cdef double v = 1.0 / (tb * tb)
    cdef double c = 1.0 - 2.0 * mu
    cdef double complex a = 0.5 - mu - 1j * tau
    cdef double complex s, coef
    # the w-series grows like exp(2 tau sqrt(w)) before converging
    if w < W_FLOOR or (w < W_SPLIT and 2 * tau * sqrt(w) < GROWTH_MAX):
        s = _series_aac(a, c, w)
        return creal(cexp(-2 * a * lntb) * s)
    if tau < TAU_DEGENERATE:
        return _kernel_degenerate(mu, t)
    s = _series_aac(a, 1.0 - 2j * tau, v)
    coef = cexp(c_loggamma(c) + c_loggamma(2j * tau) - 2 * c_loggamma(0.5 - mu + 1j * tau))
    return 2 * creal(cexp((2 * mu - 1 + 2j * tau) * lntb) * coef * s)


def gauss2f1_matrix(double mu, tau, t):
    """Kernel 2F1(1/2-mu-i tau, 1/2-mu+i tau; 1-2mu; -t^2-2t), shape (len(t), len(tau))."""
    cdef double[::1] tv = np.ascontiguousarray(np.atleast_1d(np.asarray(t, dtype=float)))
    cdef double[::1] uv = np.ascontiguousarray(np.atleast_1d(np.asarray(tau, dtype=float)))
    out = np.empty((tv.shape[0], uv.shape[0]))
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i, j
    with nogil:
        for i in range(tv.shape[0]):
            for j in range(uv.shape[0]):
                o[i, j] = c_gauss2f1(mu, fabs(uv[j]), tv[i])
    if not np.all(np.isfinite(out)):
        raise ArithmeticError("2F1 series did not converge")
    return out


def gauss2f1_pairs(double mu, tau, t):
    """Kernel 2F1(1/2-mu-i tau, 1/2-mu+i tau; 1-2mu; -t^2-2t), elementwise."""
    U, T = np.broadcast_arrays(np.asarray(tau, dtype=float), np.asarray(t, dtype=float))
    shape = T.shape
    cdef double[::1] tv = np.ascontiguousarray(T.ravel())
    cdef double[::1] uv = np.ascontiguousarray(np.abs(U).ravel())
    out = np.empty(tv.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(tv.shape[0]):
            o[i] = c_gauss2f1(mu, uv[i], tv[i])
    if not np.all(np.isfinite(out)):
        raise ArithmeticError("2F1 series did not converge")
    return out.reshape(shape)


def hyp1f2_scaled(double complex a, double complex b1, double complex b2, z):
    """1F2(a; b1, b2; z) as (mantissa, log_scale), value = mantissa*exp(log_scale)."""
    cdef double[::1] zv = np.ascontiguousarray(np.atleast_1d(np.asarray(z, dtype=float)))
    cdef Py_ssize_t n = zv.shape[0], i
    mant = np.empty(n, dtype=complex)
    lsc = np.zeros(n)
    cdef double complex[::1] m = mant
    cdef double[::1] ls = lsc
    cdef double complex s, term, ratio
    cdef int k
    cdef bint ok
    cdef double log_rescale = log(RESCALE)
    with nogil:
        for i in range(n):
            s = 1.0
            term = 1.0
            ok = False
            for k in range(MAX_TERMS):
                ratio = (a + k) / ((b1 + k) * (b2 + k) * (k + 1)) * zv[i]
                term = term * ratio
                s = s + term
                if cabs(s) > RESCALE:
                    s = s / RESCALE
                    term = term / RESCALE
                    ls[i] += log_rescale
                if k > 2 and cabs(ratio) < 0.5 and cabs(term) < 1e-17 * cabs(s):
                    ok = True
                    break
            m[i] = s if ok else NAN
    if not np.all(np.isfinite(mant)):
        raise ArithmeticError("1F2 series did not converge")
    return mant, lsc


def bessel_i_series(double complex nu, y):
    """I_nu(y) for complex order nu by the ascending series."""
    cdef double[::1] yv = np.ascontiguousarray(np.atleast_1d(np.asarray(y, dtype=float)))
    cdef Py_ssize_t n = yv.shape[0], i
    out = np.empty(n, dtype=complex)
    cdef double complex[::1] o = out
    cdef double complex term, s, ratio, lg = c_loggamma(nu + 1.0)
    cdef double z
    cdef int k
    with nogil:
        for i in range(n):
            z = yv[i] * yv[i] / 4.0
            term = cexp(nu * log(yv[i] / 2.0) - lg)
            s = term
            for k in range(MAX_TERMS):
                ratio = z / ((k + 1) * (nu + k + 1))
                term = term * ratio
                s = s + term
                if cabs(term) < 1e-17 * cabs(s) and cabs(ratio) < 0.5:
                    break
            o[i] = s
    return out


cdef double complex _series_aac_cx(double complex a, double complex c, double complex x) noexcept nogil:
    cdef double complex s = 1.0, term = 1.0
    cdef int k
    for k in range(MAX_TERMS):
        term = term * (a + k) * (a + k) / ((c + k) * (k + 1)) * x
        s = s + term
        if k > 2 and cabs(term) < 1e-17 * cabs(s):
            return s
    return s * NAN


def series_aac(a, c, x):
    """sum_k (a)_k^2 / ((c)_k k!) x^k, elementwise with broadcasting, complex x."""
    A, C, X = np.broadcast_arrays(np.asarray(a, dtype=complex), np.asarray(c, dtype=complex),
                                  np.asarray(x, dtype=complex))
    shape = A.shape
    fa = np.ascontiguousarray(A.ravel())
    fc = np.ascontiguousarray(C.ravel())
    fx = np.ascontiguousarray(X.ravel())
    out = np.empty(fa.shape[0], dtype=complex)
    cdef double complex[::1] va = fa
    cdef double complex[::1] vc = fc
    cdef double complex[::1] vx = fx
    cdef double complex[::1] vo = out
    cdef Py_ssize_t i, n = fa.shape[0]
    with nogil:
        for i in range(n):
            vo[i] = _series_aac_cx(va[i], vc[i], vx[i])
    if np.isnan(out).any():
        raise ArithmeticError("2F1 series did not converge")
    return out.reshape(shape)
