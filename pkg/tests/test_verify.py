"""Verification harness: report structure, bound checks and suites."""

import json

import numpy as np
import pytest

from itx import verify
from itx.errors import PreconditionError
from itx.functions import f1, f2, zero
from itx.transforms import TransformParams
from itx.verify import Case, VerifyReport

P0 = TransformParams(0.0)
P1 = TransformParams(0.1)


def test_residual_floor():
    assert verify.residual(0.0, 0.0) == 0.0
    assert verify.residual(1.0, 3.0) == 0.5
    assert verify.residual(1e-40, 0.0) == pytest.approx(1e-10)


def test_case_kinds():
    assert Case.equality("a", 1.0, 1.0 + 1e-9, 1e-8).passed
    assert not Case.equality("a", 1.0, 1.1, 1e-8).passed
    assert Case.bound("b", 1.0, 1.0).passed
    assert Case.bound("b", 1.0 + 1e-11, 1.0).passed
    assert not Case.bound("b", 1.0 + 1e-9, 1.0).passed
    assert Case.diagnostic("c", 1.0, 5.0).passed


def test_report_conjunction_and_merge():
    good = VerifyReport("one", (Case.equality("x", 1, 1, 1e-6),), 1e-6)
    bad = VerifyReport("two", (Case.bound("y=3", 2.0, 1.0),), 0.0)
    assert good.passed and not bad.passed
    m = VerifyReport.merge("both", [good, bad])
    assert not m.passed and m.tolerance == 1e-6
    assert [c.description for c in m.failures] == ["two: y=3"]


def test_failure_names_point_and_sides():
    rep = verify.check_macdonald_bound([(2.0, 1.0, 1.4)])
    assert rep.cases[0].description == "tau=2 x=1 delta=1.4"
    rep = VerifyReport("b", (Case.bound("tau=2 x=1", 0.3, 0.2),), 0.0)
    d = json.loads(rep.to_json())
    assert d["passed"] is False
    assert d["cases"][0]["description"] == "tau=2 x=1"
    assert d["cases"][0]["lhs"] == 0.3 and d["cases"][0]["rhs"] == 0.2


def test_json_schema_and_digits():
    rep = VerifyReport("s", (Case.equality("p", 1 / 3, 1 / 3, 1e-6),), 1e-6,
                       metrics={"m": 2 / 3}, identities={"s": "an identity"})
    text = rep.to_json()
    d = json.loads(text)
    assert {"suite_name", "tolerance", "passed", "cases", "identities"} <= set(d)
    assert set(d["cases"][0]) >= {"description", "lhs", "rhs", "residual", "passed"}
    assert "0.33333333333333331" in text
    assert d["cases"][0]["lhs"] == 1 / 3


def test_macdonald_bound_default_grid():
    rep = verify.check_macdonald_bound()
    assert len(rep.cases) == 24 and rep.passed


def test_macdonald_bound_delta_zero_and_tau_zero():
    rep = verify.check_macdonald_bound([(t, x, 0.0) for t in (0.5, 2.0) for x in (0.5, 2.0)])
    assert rep.passed
    eq = verify.check_macdonald_bound([(0.0, 1.3, 0.0)])
    assert eq.cases[0].residual == 0.0 and eq.passed


def test_macdonald_bound_preconditions():
    with pytest.raises(PreconditionError):
        verify.check_macdonald_bound([(1.0, 1.0, 2.0)])


@pytest.mark.parametrize("mu", [0.0, 0.1, -0.2, 0.25])
def test_whittaker_bound(mu):
    rep = verify.check_whittaker_bound(mu)
    assert rep.passed, rep.failures
    assert rep.metrics["C_bessel"] > 0


def test_whittaker_bound_rejects_large_mu():
    with pytest.raises(PreconditionError):
        verify.check_whittaker_bound(0.3)


def test_operator_norm():
    assert verify.check_operator_norm(zero, P0, 0.5).passed
    assert verify.operator_norm_bound(zero, P0, 0.5) == 0.0
    assert verify.check_operator_norm(f1, P0, 0.5).passed
    assert verify.check_operator_norm(f2, P1, 1.0).passed
    with pytest.raises(PreconditionError):
        verify.check_operator_norm(f1, P0, 0.5, x_grid=[0.1, 1.0])


def test_operator_norm_requires_admissible_delta():
    with pytest.raises(PreconditionError):
        verify.operator_norm_bound(f1, TransformParams(0.0, delta=0.0), 1.0)


def test_bounds_suite():
    rep = verify.run_suite("bounds", P0)
    assert rep.passed and rep.suite_name == "bounds"
    assert set(rep.identities) == {"macdonald_bound", "whittaker_bound", "operator_norm"}


def test_parseval_suite_corpus():
    rep = verify.corpus_parseval(P0)
    assert rep.passed and len(rep.cases) == 3


def test_kernel_and_kl_reductions():
    assert verify.check_kernel_reduction().passed
    rep = verify.check_kl_reduction()
    assert rep.passed and len(rep.cases) == 25


def test_dual_route_check():
    rep = verify.check_dual_route(f1, TransformParams(-0.2), xs=(0.5, 2.0))
    assert rep.passed


def test_frac_check_rejects_negative_mu():
    with pytest.raises(PreconditionError):
        verify.check_frac_derivative(f1, TransformParams(-0.1))


def test_roundtrip_zero():
    rep = verify.run_roundtrip_suite(zero, P0)
    assert rep.passed
    assert all(c.residual == 0 for c in rep.cases if c.kind != "bound")
    assert all(c.lhs == 0 for c in rep.cases)


def test_roundtrip_mu0():
    rep = verify.run_roundtrip_suite(f1, P0)
    assert rep.passed
    assert rep.metrics["l2_error_general"] <= 1e-2 and rep.metrics["l2_error_mu0"] <= 1e-2


def test_roundtrip_rejects_negative_mu():
    with pytest.raises(PreconditionError):
        verify.run_roundtrip_suite(f1, TransformParams(-0.1))


def test_unknown_suite():
    with pytest.raises(PreconditionError):
        verify.run_suite("nope", P0)


def test_determinism():
    a = verify.run_suite("parseval", P1, f2).to_json()
    b = verify.run_suite("parseval", P1, f2).to_json()
    assert a == b


def test_thread_count(monkeypatch):
    from itx._parallel import pmap, thread_count

    monkeypatch.setenv("ITX_THREADS", "3")
    assert thread_count() == 3
    assert pmap(lambda i: i * i, range(7)) == [i * i for i in range(7)]
    monkeypatch.setenv("ITX_THREADS", "0")
    assert thread_count() >= 1
    monkeypatch.setenv("ITX_THREADS", "many")
    with pytest.raises(PreconditionError):
        thread_count()


def test_parallel_report_matches_serial(monkeypatch):
    monkeypatch.setenv("ITX_THREADS", "1")
    serial = verify.check_kl_reduction().to_json()
    monkeypatch.setenv("ITX_THREADS", "4")
    assert verify.check_kl_reduction().to_json() == serial
