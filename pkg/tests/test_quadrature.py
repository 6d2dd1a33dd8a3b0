"""Adaptive quadrature and differentiation against closed forms."""

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma, k0

from itx.errors import DomainError, EnvelopeError
from itx.quadrature import (
    KERNEL_CFG,
    OUTER_CFG,
    QuadratureConfig,
    differentiate,
    gauss_legendre_panels,
    integrate_finite,
    integrate_semi_infinite,
)
from itx.curves import SampledCurve


def test_config_invariants():
    with pytest.raises(ValueError):
        QuadratureConfig(abs_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureConfig(max_subdivisions=0)
    with pytest.raises(ValueError):
        QuadratureConfig(abs_tol=1e-8, tail_tol=1e-6)
    assert OUTER_CFG.abs_tol == 1e-7 and OUTER_CFG.rel_tol == 1e-6
    assert KERNEL_CFG.abs_tol == 1e-10 and KERNEL_CFG.rel_tol == 1e-8
    t = KERNEL_CFG.tightened(0.1)
    assert t.abs_tol == pytest.approx(1e-11) and t.tail_tol == pytest.approx(1e-12)


def test_polynomial():
    r = integrate_finite(lambda x: x * x, 0.0, 1.0)
    assert r.converged and abs(r.value - 1 / 3) < 1e-15


def test_endpoint_singularity():
    r = integrate_finite(lambda x: x ** -0.5, 0.0, 1.0)
    assert r.converged and abs(r.value - 2) < 1e-9


def test_brute_force_refinement():
    f = lambda t: t ** -0.2 * (t + 2) ** -0.1
    # 10^6-node midpoint rule after t = u^{1/0.8} removes the singularity
    n = 10 ** 6
    u = (np.arange(n) + 0.5) / n
    t = u ** 1.25
    ref = np.sum(f(t) * 1.25 * u ** 0.25) / n
    r = integrate_finite(f, 0.0, 1.0)
    assert abs(r.value - ref) < 1e-8


def test_vector_valued():
    r = integrate_finite(lambda x: np.stack([x, x * x], axis=-1), 0.0, 2.0)
    assert np.allclose(r.value, [2.0, 8 / 3], rtol=1e-13)


def test_nonconvergence_is_reported():
    r = integrate_finite(lambda x: np.sign(x - 1 / 3), 0.0, 1.0, QuadratureConfig(max_subdivisions=3))
    assert not r.converged and r.worst_interval is not None


def test_bad_interval():
    with pytest.raises(ValueError):
        integrate_finite(np.sin, 1.0, 0.0)


def test_semi_infinite_exponential():
    r = integrate_semi_infinite(lambda x: np.exp(-x), 0.0, 1.0)
    assert r.converged and abs(r.value - 1) < 1e-10


def test_semi_infinite_bessel_k0():
    # int y^{-1/2} K_0(y) dy = 2^{-3/2} Gamma(1/4)^2; the singular head is split off
    head = integrate_finite(lambda y: y ** -0.5 * k0(y), 0.0, 1.0)
    tail = integrate_semi_infinite(lambda y: y ** -0.5 * k0(y), 1.0, 0.99)
    assert abs(head.value + tail.value - 2 ** -1.5 * gamma(0.25) ** 2) < 1e-7


def test_semi_infinite_macdonald():
    r = integrate_semi_infinite(lambda t: np.exp(-np.cosh(t)), 0.0, 1.0)
    assert abs(r.value - k0(1.0)) < 1e-10


def test_envelope_violation():
    # the declared rate is far faster than the actual decay
    with pytest.raises(EnvelopeError):
        integrate_semi_infinite(lambda x: np.exp(-0.01 * x) * (1 + x) ** 3, 0.0, 5.0)


def test_differentiate():
    assert abs(differentiate(lambda x: x * x, 3.0) - 6) < 1e-9
    assert abs(differentiate(lambda x: np.exp(-2 * x), 1.0) + 2 * np.exp(-2)) < 1e-10


def test_differentiate_curve():
    x = np.linspace(0.0, 1.5, 301)
    c = SampledCurve(x, np.sin(x), coord="linear")
    assert abs(differentiate(c, 0.7) - np.cos(0.7)) < 1e-6
    assert abs(c.derivative(0.7) - np.cos(0.7)) < 1e-6


def test_differentiate_domain():
    c = SampledCurve(np.linspace(1.0, 2.0, 20), np.ones(20), coord="linear")
    with pytest.raises(DomainError):
        differentiate(c, 1.0)


def test_gauss_legendre_panels():
    x, w = gauss_legendre_panels(0.0, np.pi, 4)
    assert abs(np.sum(w * np.sin(x)) - 2) < 1e-14


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=6), st.lists(st.floats(-5, 5), min_size=1, max_size=6),
       st.floats(-3, 3), st.floats(-3, 3))
@settings(max_examples=50, deadline=None)
def test_linearity(p, q, alpha, beta):
    f = np.polynomial.Polynomial(p)
    g = np.polynomial.Polynomial(q)
    rf = integrate_finite(f, -1.0, 2.0)
    rg = integrate_finite(g, -1.0, 2.0)
    rh = integrate_finite(lambda x: alpha * f(x) + beta * g(x), -1.0, 2.0)
    slack = abs(alpha) * rf.error_estimate + abs(beta) * rg.error_estimate + rh.error_estimate
    assert abs(rh.value - alpha * rf.value - beta * rg.value) <= slack + 1e-12 * (1 + abs(rh.value))


# 20 integrands with closed forms: (f, a, b or None for [a, inf), decay, exact)
CORPUS = [
    (lambda x: x ** 3, 0, 2, None, 4.0),
    (np.sin, 0, np.pi, None, 2.0),
    (np.cos, 0, 10, None, np.sin(10)),
    (lambda x: 1 / (1 + x * x), 0, 1, None, np.pi / 4),
    (np.exp, -1, 1, None, np.e - 1 / np.e),
    (lambda x: np.log(x), 0, 1, None, -1.0),
    (lambda x: x ** -0.7, 0, 1, None, 1 / 0.3),
    (lambda x: np.sqrt(x), 0, 4, None, 16 / 3),
    (lambda x: np.sqrt(1 - x * x), -1, 1, None, np.pi / 2),
    (lambda x: 1 / np.sqrt(1 - x * x), -1, 1, None, np.pi),
    (lambda x: np.sin(30 * x), 0, 1, None, (1 - np.cos(30)) / 30),
    (lambda x: np.exp(-x * x), -6, 6, None, float(mp.sqrt(mp.pi) * mp.erf(6))),
    (lambda x: x * np.exp(-x), 0, None, 0.9, 1.0),
    (lambda x: np.exp(-2 * x) * np.cos(x), 0, None, 2.0, 0.4),
    (lambda x: x ** -0.5 * np.exp(-x), 1e-300, None, 1.0, float(mp.sqrt(mp.pi))),
    (lambda x: 1 / np.cosh(x), 0, None, 1.0, np.pi / 2),
    (lambda x: np.exp(-x) * np.sin(x) ** 2, 0, None, 1.0, 0.4),
    (lambda x: x * x * np.exp(-3 * x), 0, None, 2.9, 2 / 27),
    (lambda x: np.abs(x - 0.3), 0, 1, None, 0.29),
    (lambda x: np.log1p(x) / (1 + x * x), 0, 1, None, np.pi * np.log(2) / 8),
]


def _run(case, cfg):
    f, a, b, r, _ = case
    if b is None:
        return integrate_semi_infinite(f, a, r, cfg)
    return integrate_finite(f, a, b, cfg)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_error_estimate_honesty():
    cfg = QuadratureConfig(abs_tol=1e-8, rel_tol=1e-8, tail_tol=1e-9)
    ok = 0
    for case in CORPUS:
        res = _run(case, cfg)
        ok += abs(res.value - case[4]) <= 3 * res.error_estimate + 1e-15 * abs(case[4])
    assert ok >= 19


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_refinement_monotonicity():
    coarse = QuadratureConfig(abs_tol=1e-6, rel_tol=1e-6, tail_tol=1e-7)
    fine = coarse.replace(abs_tol=5e-7, tail_tol=5e-8)
    for case in CORPUS:
        r0 = _run(case, coarse)
        r1 = _run(case, fine)
        assert abs(r1.value - case[4]) <= abs(r0.value - case[4]) + r0.error_estimate + 1e-15
