"""Compiled and numpy kernels agree; the fallback is selected when asked."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from itx import _fallback, _kernels, backend


def test_backend_name():
    assert backend() in ("cython", "python")
    assert backend() == _kernels.BACKEND


def test_env_forces_fallback():
    env = dict(os.environ, ITX_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", "import itx; print(itx.backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@given(st.floats(-0.45, 0.45), st.lists(st.floats(0.0, 8.0), min_size=1, max_size=5),
       st.lists(st.floats(0.0, 1e3), min_size=1, max_size=6))
@settings(max_examples=40, deadline=None)
def test_gauss_matrix_agree(mu, tau, t):
    core = pytest.importorskip("itx._core")
    tau = np.array(tau)
    t = np.array(t)
    a = core.gauss2f1_matrix(mu, tau, t)
    b = _fallback.gauss2f1_matrix(mu, tau, t)
    assert a.shape == b.shape
    assert np.allclose(a, b, rtol=1e-11, atol=1e-13 * np.exp(np.pi * tau.max()))


def test_gauss_pairs_agree(core, fallback):
    tau = np.linspace(0.0, 5.0, 9)
    t = np.geomspace(1e-6, 1e4, 9)
    assert np.allclose(core.gauss2f1_pairs(0.1, tau, t), fallback.gauss2f1_pairs(0.1, tau, t), rtol=1e-11, atol=1e-14)


def test_loggamma_agree(core, fallback):
    z = np.array([0.5 + 3j, 2.0 - 1j, -0.7 + 0.2j, 10 + 40j])
    assert np.allclose(core.loggamma(z), fallback.loggamma(z), rtol=1e-13)


def test_series_aac_agree(core, fallback):
    a = 0.4 - 1.3j
    x = np.array([0.0, 0.1 + 0.05j, 0.45 - 0.2j, 0.8j])
    assert np.allclose(core.series_aac(a, 0.8, x), fallback.series_aac(a, 0.8, x), rtol=1e-12)


def test_hyp1f2_scaled_agree(core, fallback):
    z = np.array([0.0, 0.3, 12.0, 900.0])
    m1, l1 = core.hyp1f2_scaled(0.6 - 1j, 1 - 2j, 0.1 - 1j, z)
    m0, l0 = fallback.hyp1f2_scaled(0.6 - 1j, 1 - 2j, 0.1 - 1j, z)
    assert np.allclose(m1 * np.exp(l1 - l0), m0, rtol=1e-11)


def test_bessel_series_agree(core, fallback):
    y = np.array([0.01, 0.5, 3.0, 40.0])
    assert np.allclose(core.bessel_i_series(1 + 0.7j, y), fallback.bessel_i_series(1 + 0.7j, y), rtol=1e-12)
