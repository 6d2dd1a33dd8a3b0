"""Acceptance criteria, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line with the worst
residual and the wall time, and asserts both the tolerance and the time
budget.
"""

import time

import numpy as np
import pytest

from itx import verify
from itx.cli import EXIT_NUMERIC, EXIT_USAGE, main
from itx.functions import f1, f2
from itx.transforms import TransformParams
from itx.verify import VerifyReport

pytestmark = pytest.mark.acceptance


def _report(capsys, n, title, ok, detail, t0, budget):
    dt = time.perf_counter() - t0
    ok = bool(ok) and dt <= budget
    with capsys.disabled():
        print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  {title}  {detail}  ({dt:.1f}s of {budget:g}s)")
    return ok


def _worst(rep: VerifyReport, kind=None):
    cases = [c for c in rep.cases if kind is None or c.kind == kind]
    return max(c.residual for c in cases)


def _fail_text(rep):
    return "; ".join(f"{c.description} lhs={c.lhs:.6g} rhs={c.rhs:.6g}" for c in rep.failures)


def test_01_dual_route(capsys):
    t0 = time.perf_counter()
    reps = [verify.check_dual_route(f, TransformParams(mu), xs=(0.5, 1.0, 2.0, 4.0), tol=1e-5)
            for f in (f1, f2) for mu in (-0.2, 0.0, 0.1, 0.2)]
    rep = VerifyReport.merge("dual_route", reps)
    assert len(rep.cases) == 32
    ok = _report(capsys, 1, "direct vs composed forward", rep.passed,
                 f"max rel {_worst(rep):.2e} <= 1e-5", t0, 120)
    assert ok, _fail_text(rep)


def test_02_kl_reduction(capsys):
    t0 = time.perf_counter()
    rep = verify.check_kl_reduction(tol=1e-6)
    assert len(rep.cases) == 25
    ok = _report(capsys, 2, "squared Whittaker vs squared Macdonald at mu=0", rep.passed,
                 f"max rel {_worst(rep):.2e} <= 1e-6", t0, 30)
    assert ok, _fail_text(rep)


def test_03_macdonald_bound(capsys):
    t0 = time.perf_counter()
    rep = verify.check_macdonald_bound()
    assert len(rep.cases) == 24
    ok = _report(capsys, 3, "Macdonald bound", rep.passed,
                 f"{len(rep.cases)} points, slack 1e-10", t0, 10)
    assert ok, _fail_text(rep)


def test_04_whittaker_bound_and_operator_norm(capsys):
    t0 = time.perf_counter()
    reps = [verify.check_whittaker_bound(mu) for mu in (-0.2, 0.0, 0.1, 0.2)]
    reps.append(verify.check_operator_norm(f1, TransformParams(0.0), 0.5))
    reps.append(verify.check_operator_norm(f2, TransformParams(0.1), 1.0))
    reps.append(verify.check_operator_norm(f1, TransformParams(-0.2), 1.0))
    rep = VerifyReport.merge("bounds", reps)
    cs = ", ".join(f"{r.metrics['C_bessel']:.4g}" for r in reps[:4])
    ok = _report(capsys, 4, "Whittaker bound and operator norm", rep.passed,
                 f"{len(rep.cases)} cases, C = [{cs}]", t0, 60)
    assert ok, _fail_text(rep)


def test_05_mellin(capsys):
    t0 = time.perf_counter()
    rep = VerifyReport.merge("mellin", [verify.check_mellin(f1, TransformParams(mu), tol=1e-4)
                                        for mu in (0.0, 0.1)])
    assert len(rep.cases) == 10
    ok = _report(capsys, 5, "Mellin factorisation", rep.passed,
                 f"max rel {_worst(rep):.2e} <= 1e-4", t0, 120)
    assert ok, _fail_text(rep)


def test_06_frac_derivative(capsys):
    t0 = time.perf_counter()
    rep = VerifyReport.merge("frac", [verify.check_frac_derivative(f1, TransformParams(mu), tol=1e-4)
                                      for mu in (0.05, 0.1, 0.2)])
    assert len(rep.cases) == 24
    ok = _report(capsys, 6, "fractional derivative of F vs Laplace of G", rep.passed,
                 f"max rel {_worst(rep):.2e} <= 1e-4", t0, 120)
    assert ok, _fail_text(rep)


def _roundtrip_l2(rep, route):
    return rep.metrics[f"l2_error_{route}"]


def test_07_roundtrip_mu0(capsys):
    t0 = time.perf_counter()
    rep = verify.run_roundtrip_suite(f1, TransformParams(0.0), tol=1e-2)
    err = _roundtrip_l2(rep, "mu0")
    ok = _report(capsys, 7, "inversion round trip mu=0", rep.passed and err <= 1e-2,
                 f"L2 rel {err:.2e} <= 1e-2 (general kernel {_roundtrip_l2(rep, 'general'):.2e})", t0, 300)
    assert ok, _fail_text(rep)


def test_08_roundtrip_general(capsys):
    t0 = time.perf_counter()
    rep = verify.run_roundtrip_suite(f1, TransformParams(0.1), tol=5e-2)
    err = _roundtrip_l2(rep, "general")
    kern = verify.check_kernel_reduction(tol=1e-6)
    ok = _report(capsys, 8, "inversion round trip mu=0.1 and kernel reduction",
                 rep.passed and err <= 5e-2 and kern.passed,
                 f"L2 rel {err:.2e} <= 5e-2, kernel max rel {_worst(kern):.2e} <= 1e-6", t0, 600)
    assert ok, _fail_text(rep) + _fail_text(kern)


def test_09_parseval(capsys):
    t0 = time.perf_counter()
    rep = VerifyReport.merge("parseval", [verify.corpus_parseval(TransformParams(mu)) for mu in (0.0, 0.1)])
    worst = max(c.residual for c in rep.cases if c.kind == "equality")
    ok = _report(capsys, 9, "Parseval identities over the corpus", rep.passed and worst <= 1e-2,
                 f"{len(rep.cases)} cases, max rel {worst:.2e} <= 1e-2", t0, 180)
    assert ok, _fail_text(rep)


def test_10_cli_determinism_and_exit_codes(capsys, tmp_path):
    t0 = time.perf_counter()
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    rc_a = main(["verify", "--suite", "all", "--out", str(a)])
    rc_b = main(["verify", "--suite", "all", "--out", str(b)])
    same = a.read_bytes() == b.read_bytes()

    bad_table = tmp_path / "bad.csv"
    bad_table.write_text("x,value\n2,1\n1,1\n")
    crafted = [
        (["forward", "--f", str(tmp_path / "missing.csv")], EXIT_USAGE),
        (["eval-kernel", "--kind", "macdonald", "--grid", "1:0:5:linear"], EXIT_USAGE),
        (["invert", "--input", str(bad_table)], EXIT_USAGE),
        (["invert", "--input", str(bad_table), "--mu", "0.3"], EXIT_USAGE),
        (["forward", "--f", "f1", "--grid", "1:2:2:linear", "--max-subdivisions", "1", "--rel-tol", "1e-14"],
         EXIT_NUMERIC),
    ]
    got = [main(argv) for argv, _ in crafted]
    capsys.readouterr()
    codes_ok = got == [want for _, want in crafted]
    ok = _report(capsys, 10, "CLI determinism and exit codes", rc_a == rc_b == 0 and same and codes_ok,
                 f"identical={same}, exit codes {got}", t0, 60)
    assert ok
