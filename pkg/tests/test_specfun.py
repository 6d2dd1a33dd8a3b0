"""Special functions against mpmath and closed-form oracles."""

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from itx import specfun
from itx.errors import AccuracyLossError, PoleError, PreconditionError
from itx.quadrature import QuadratureConfig

from conftest import rel

mp.mp.dps = 30


# ---------------------------------------------------------------- gamma

def test_log_gamma_trivial():
    assert abs(specfun.log_gamma(1 + 0j)) < 1e-15
    assert abs(specfun.log_gamma(5 + 0j) - np.log(24)) < 1e-14


def test_log_gamma_half_from_integral():
    # Gamma(1/2) from the defining integral, t = u^2
    ref = float(mp.quad(lambda u: 2 * mp.exp(-u * u), [0, mp.inf]))
    assert abs(np.exp(specfun.log_gamma(0.5)) - ref) < 1e-13


def test_log_gamma_reflection():
    tau = 1.0
    prod = np.exp(specfun.log_gamma(2j * tau) + specfun.log_gamma(-2j * tau))
    assert rel(prod.real, np.pi / (2 * tau * np.sinh(2 * np.pi * tau))) < 1e-13
    assert abs(prod.imag) < 1e-15


@given(st.floats(-3.7, 6.0), st.floats(-20.0, 20.0))
@settings(max_examples=60, deadline=None)
def test_log_gamma_matches_mpmath(re, im):
    z = complex(re, im)
    if abs(im) < 1e-3 and re < 0.5 and abs(re - round(re)) < 1e-3:
        return
    ref = complex(mp.loggamma(mp.mpc(re, im)))
    got = specfun.log_gamma(z)
    assert abs(np.exp(got - ref) - 1) < 1e-12


def test_log_gamma_pole():
    with pytest.raises(PoleError):
        specfun.log_gamma(-2 + 0j)
    with pytest.raises(PoleError):
        specfun.log_gamma(0.0)


# ---------------------------------------------------------------- Macdonald

def test_macdonald_k0_at_one():
    # the integrand is below e^{-80000} past t = 12
    ref = float(mp.quad(lambda t: mp.exp(-mp.cosh(t)), [0, 1, 3, 6, 12]))
    assert abs(specfun.macdonald_imag(0.0, 1.0) - ref) < 1e-12
    assert abs(ref - 0.4210244382) < 1e-10


@pytest.mark.parametrize("tau,x", [(0.5, 0.3), (1.0, 1.0), (2.0, 0.5), (3.0, 2.5), (5.0, 4.0), (0.0, 7.0)])
def test_macdonald_vs_mpmath(tau, x):
    ref = float(mp.re(mp.besselk(1j * tau, x)))
    assert abs(specfun.macdonald_imag(tau, x) - ref) <= 1e-10 + 1e-8 * abs(ref)


def test_macdonald_vectorised_shape():
    v = specfun.macdonald_imag(np.array([0.5, 1.0, 2.0]), np.array([1.0, 2.0]))
    assert v.shape == (2, 3)
    assert abs(v[1, 2] - specfun.macdonald_imag(2.0, 2.0)) < 1e-14


def test_macdonald_bound_instance():
    d = 1.0
    assert abs(specfun.macdonald_imag(2.0, 1.0)) <= np.exp(-2 * d) * specfun.macdonald_imag(0.0, np.cos(d))


def test_macdonald_derivative():
    ref = float(mp.re(mp.diff(lambda y: mp.besselk(1.5j, y), 1.3)))
    assert abs(specfun.macdonald_imag_derivative(1.5, 1.3) - ref) < 1e-9


def test_macdonald_accuracy_loss():
    # K_{40i}(0.01) ~ 1e-29 sits far below the rounding floor of the integral
    tight = QuadratureConfig(abs_tol=1e-25, rel_tol=1e-8, tail_tol=1e-26)
    assert abs(specfun.macdonald_imag(40.0, 0.01)) < 1e-10
    with pytest.raises(AccuracyLossError):
        specfun.macdonald_imag(40.0, 0.01, tight)


def test_macdonald_domain():
    with pytest.raises(PreconditionError):
        specfun.macdonald_imag(1.0, 0.0)


# ---------------------------------------------------------------- Bessel I, J

def test_bessel_i0():
    v = specfun.bessel_i_imag(0.0, 1.0)
    assert abs(v.real - 1.2660658777520084) < 1e-14 and v.imag == 0


@pytest.mark.parametrize("tau,y", [(1.0, 0.5), (1.5, 2.0), (0.3, 8.0), (3.0, 20.0)])
def test_bessel_i_vs_mpmath(tau, y):
    ref = complex(mp.besseli(1j * tau, y))
    got = specfun.bessel_i_imag(tau, y)
    assert abs(got - ref) <= 1e-12 * abs(ref)
    ref1 = complex(mp.besseli(1 + 1j * tau, y))
    assert abs(specfun.bessel_i_imag(tau, y, 1) - ref1) <= 1e-12 * abs(ref1)


def test_bessel_i_conjugation_and_product():
    a = specfun.bessel_i_imag(1.5, 2.0)
    b = specfun.bessel_i_imag(-1.5, 2.0)
    assert abs(a - np.conj(b)) < 1e-14
    p = specfun.bessel_i_imag(1.0, 1.0) * specfun.bessel_i_imag(-1.0, 1.0)
    assert abs(p.imag) < 1e-15


def test_bessel_j():
    assert abs(specfun.bessel_j(0.0, 1e-12) - 1) < 1e-15
    assert abs(specfun.bessel_j(0.5, np.pi)) < 1e-15
    assert abs(specfun.bessel_j(0.0, 1.0) - float(mp.besselj(0, 1))) < 1e-14
    with pytest.raises(PreconditionError):
        specfun.bessel_j(-1.5, 1.0)


@pytest.mark.parametrize("nu", [0.0, -0.2, -0.4, 0.5])
def test_bessel_j_bound_constant(nu):
    C = specfun.bessel_j_bound_constant(nu)
    x = np.geomspace(1e-6, 1e4, 200001)
    assert np.all(np.sqrt(x) * np.abs(specfun.bessel_j(nu, x)) <= C * (1 + 1e-9))


# ---------------------------------------------------------------- Gauss kernel

def test_gauss_kernel_at_zero():
    for mu in (-0.3, 0.0, 0.2, 0.45):
        for tau in (0.0, 0.5, 3.0):
            assert abs(specfun.gauss2f1_kernel(mu, tau, 0.0) - 1) < 1e-14


def test_gauss_kernel_conical_oracle():
    # mu = 0: 2F1(1/2-i tau, 1/2+i tau; 1; -t^2-2t) = P_{-1/2+i tau}(2(t+1)^2-1)
    tau, t = 1.0, 0.5
    ref = float(mp.re(mp.legenp(-0.5 + 1j * tau, 0, 2 * (t + 1) ** 2 - 1)))
    assert rel(specfun.gauss2f1_kernel(0.0, tau, t), ref) < 1e-12


@given(st.floats(-0.45, 0.45), st.floats(0.0, 6.0), st.floats(0.0, 200.0))
@settings(max_examples=80, deadline=None)
def test_gauss_kernel_vs_mpmath(mu, tau, t):
    a = mp.mpf(0.5) - mu
    ref = mp.re(mp.hyp2f1(a - 1j * tau, a + 1j * tau, 1 - 2 * mp.mpf(mu), -t * t - 2 * t))
    got = specfun.gauss2f1_kernel(mu, tau, t)
    # the kernel oscillates through zero; compare against its envelope
    env = (1 + t) ** (2 * mu - 1) * (1 + np.log1p(t)) * np.exp(np.pi * tau)
    assert abs(got - float(ref)) <= 1e-9 * env


def test_gauss_kernel_large_t_bound():
    # (1+t)^{2 mu - 1/2} growth bound from the Bessel integral representation
    mu, tau = 0.1, 1.0
    t = np.geomspace(1.0, 1e4, 60)
    v = np.abs(specfun.gauss2f1_kernel(mu, tau, t))
    assert np.all(v <= 5.0 * t ** (2 * mu - 0.5))


def test_gauss_kernel_complex_matches_real_axis():
    t = np.array([0.0, 0.01, 0.3, 2.0, 50.0])
    for mu, tau in ((0.0, 1.0), (0.1, 2.5), (-0.2, 0.3)):
        a = specfun.gauss2f1_kernel_complex(mu, tau, t)
        b = specfun.gauss2f1_kernel(mu, tau, t)
        assert np.max(np.abs(a - b) / (1 + np.abs(b))) < 1e-11


def test_gauss_kernel_complex_vs_mpmath():
    mu, tau, t = 0.1, 1.5, 3.0 * np.exp(-1j)
    a = mp.mpf(0.5) - mu
    z = -t * t - 2 * t
    ref = complex(mp.hyp2f1(a - 1j * tau, a + 1j * tau, 1 - 2 * mp.mpf(mu), mp.mpc(z.real, z.imag)))
    got = complex(specfun.gauss2f1_kernel_complex(mu, tau, t))
    assert abs(got - ref) <= 1e-10 * abs(ref)


# ---------------------------------------------------------------- Tricomi / Whittaker

def test_tricomi_closed_forms():
    assert abs(specfun.tricomi_u(1, 2, 3.0) - 1 / 3) < 1e-12
    ref = np.e * specfun.macdonald_imag(0.0, 1.0) / np.sqrt(np.pi)
    assert abs(specfun.tricomi_u(0.5, 1, 2.0) - ref) < 1e-11


@pytest.mark.parametrize("a,b,x", [(0.7 + 1j, 1 + 2j, 0.8), (1.3 - 0.5j, 0.2, 2.5), (0.4 + 3j, 1 + 6j, 5.0)])
def test_tricomi_vs_mpmath(a, b, x):
    ref = complex(mp.hyperu(a, b, x))
    assert abs(specfun.tricomi_u(a, b, x) - ref) <= 1e-9 * abs(ref)


def test_tricomi_precondition():
    with pytest.raises(PreconditionError):
        specfun.tricomi_u(-0.5, 1, 1.0)


def test_whittaker_mu0_reduction():
    # W_{0, i tau}(x) = sqrt(x/pi) K_{i tau}(x/2)
    got = specfun.whittaker_w(0.0, 1.0, 2.0)
    assert rel(got, np.sqrt(2 / np.pi) * specfun.macdonald_imag(1.0, 1.0)) < 1e-9


@pytest.mark.parametrize("mu,tau,x", [(0.1, 2.0, 1.0), (0.2, 0.5, 1.0), (-0.2, 1.5, 3.0), (0.3, 0.8, 0.4)])
def test_whittaker_vs_mpmath(mu, tau, x):
    ref = float(mp.re(mp.whitw(mu, 1j * tau, x)))
    assert abs(specfun.whittaker_w(mu, tau, x) - ref) <= 1e-9 * max(abs(ref), 1e-3)


@pytest.mark.parametrize("mu", [0.0, 0.1, 0.2, -0.2])
def test_whittaker_square_cross_representation(mu):
    for tau in (0.5, 1.5):
        for x in (0.5, 2.0):
            w = specfun.whittaker_w(mu, tau, x)
            assert rel(w * w, specfun.whittaker_w_sq(mu, tau, x)) < 1e-5


def test_whittaker_sq_mu0_kl():
    assert rel(specfun.whittaker_w_sq(0.0, 1.0, 2.0), 2 / np.pi * specfun.macdonald_imag(1.0, 1.0) ** 2) < 1e-9


def test_whittaker_sq_nonnegative_and_vectorised():
    taus = np.linspace(0.0, 5.0, 11)
    v = specfun.whittaker_w_sq(0.15, taus, 0.7)
    assert v.shape == taus.shape and np.all(v >= 0)
    assert abs(v[3] - specfun.whittaker_w_sq(0.15, taus[3], 0.7)) < 1e-14


def test_whittaker_preconditions():
    with pytest.raises(PreconditionError):
        specfun.whittaker_w(0.5, 1.0, 1.0)
    with pytest.raises(PreconditionError):
        specfun.whittaker_w_sq(0.1, 1.0, -1.0)


# ---------------------------------------------------------------- 1F2 and inversion kernels

def test_hyp1f2_trivial():
    assert specfun.hyp1f2(0.3 + 1j, 1 - 2j, 0.2 - 1j, 0.0) == 1


def test_hyp1f2_bessel_reduction():
    # a = b1: 0F1(;1;y^2/4) = I_0(y)
    assert abs(specfun.hyp1f2(1, 1, 1, 0.25) - 1.2660658777520084) < 1e-14


@pytest.mark.parametrize("z", [0.01, 1.0, 30.0, 400.0])
def test_hyp1f2_vs_mpmath(z):
    a, b1, b2 = 0.6 - 1j, 1 - 2j, 0.1 - 1j
    ref = complex(mp.hyp1f2(a, b1, b2, z))
    assert abs(specfun.hyp1f2(a, b1, b2, z) - ref) <= 1e-11 * abs(ref)


def test_hyp1f2_pole():
    with pytest.raises(PoleError):
        specfun.hyp1f2(0.5, -2.0, 1.0, 1.0)


def _phi_mp(mu, tau, x):
    a, b1, b2 = 0.5 + mu - 1j * tau, 1 - 2j * tau, mu - 1j * tau
    c = mp.gamma(2j * tau) / (mp.gamma(0.5 - mu + 1j * tau) ** 2 * mp.gamma(2 * (mu - 1j * tau)))
    return float(-2 * mp.exp(-x) * mp.mpf(x) ** (2 * mu - 1)
                 * mp.re(mp.mpf(x) ** (-2j * tau) * c * (mp.hyp1f2(a, b1, b2, mp.mpf(x) ** 2 / 4) - 1)))


@pytest.mark.parametrize("mu,tau,x", [(0.1, 1.0, 0.05), (0.1, 1.0, 1.5), (-0.3, 2.0, 6.0), (0.2, 0.5, 25.0)])
def test_phi_kernel_vs_mpmath(mu, tau, x):
    ref = _phi_mp(mu, tau, x)
    assert abs(specfun.phi_kernel(mu, tau, x) - ref) <= 1e-10 * max(abs(ref), 1e-8)


def test_phi_kernel_small_x_envelope():
    mu, tau = 0.1, 1.0
    x = np.geomspace(1e-3, 0.1, 40)
    r = np.abs(specfun.phi_kernel(mu, tau, x)) / x ** (2 * mu + 1)
    assert np.all(np.isfinite(r)) and r.max() < 10 * r.min() + 1.0


def test_phi_kernel_range():
    with pytest.raises(PreconditionError):
        specfun.phi_kernel(0.3, 1.0, 1.0)


def _psi_fd(tau, y, h=1e-7):
    def g(yy):
        return complex(-2j * tau * (mp.besseli(-1j * tau, yy) ** 2 - mp.besseli(1j * tau, yy) ** 2))
    return ((g(y + h) - g(y - h)) / (2 * h)).real


def test_inversion_kernel_mu0_tau0():
    assert np.all(specfun.inversion_kernel_mu0(0.0, np.array([0.1, 1.0, 5.0])) == 0)


def test_inversion_kernel_mu0_fd_oracle():
    for tau in np.linspace(0.25, 2.0, 4):
        for y in np.linspace(0.25, 2.0, 4):
            assert abs(specfun.inversion_kernel_mu0(tau, y) - _psi_fd(tau, y)) < 1e-6


def test_inversion_kernel_mu0_spec_point():
    assert abs(specfun.inversion_kernel_mu0(1.0, 0.5) - _psi_fd(1.0, 0.5)) < 1e-6


def test_general_kernel_reduces_at_mu0():
    # at mu = 0 the 1F2 kernel equals psi(tau, y/2) e^{-y} / 2
    for tau, y in ((1.0, 0.5), (0.5, 0.2), (2.0, 3.0), (1.0, 8.0)):
        lhs = specfun.inversion_kernel_general(0.0, tau, y)
        rhs = 0.5 * specfun.inversion_kernel_mu0(tau, y / 2) * np.exp(-y)
        assert abs(lhs - rhs) <= 1e-6 * max(abs(rhs), 1e-3)


def test_general_kernel_asymptote():
    mu, tau = 0.1, 1.2
    y = 60.0
    assert rel(y ** (1 - 2 * mu) * specfun.inversion_kernel_general(mu, tau, y),
               specfun.inversion_kernel_asymptote(mu, tau)) < 5e-2
    assert specfun.inversion_kernel_asymptote(0.0, tau) == 0
