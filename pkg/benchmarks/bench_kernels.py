"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Both backends are imported directly, so one process compares them. Each
row reports the best of N runs and checks the two results agree.
"""

import argparse
import timeit

import numpy as np

from itx import _fallback

try:
    from itx import _core
except ImportError:  # extension not built
    _core = None


def cases():
    rng = np.random.default_rng(7)
    tau = np.linspace(0.0, 6.0, 64)
    t = np.geomspace(1e-6, 1e5, 512)
    z = rng.uniform(0.0, 0.9, 4096) * np.exp(1j * rng.uniform(-0.6, 0.6, 4096))
    y = np.geomspace(1e-3, 200.0, 4096)
    zz = np.geomspace(1e-4, 1e4, 4096)
    return {
        "gauss2f1_matrix 64x512": lambda m: m.gauss2f1_matrix(0.1, tau, t),
        "gauss2f1_pairs 4096": lambda m: m.gauss2f1_pairs(0.1, np.resize(tau, 4096), np.resize(t, 4096)),
        "series_aac 4096": lambda m: m.series_aac(0.4 - 1.5j, 0.8, z),
        "hyp1f2_scaled 4096": lambda m: m.hyp1f2_scaled(0.6 - 1j, 1 - 2j, 0.1 - 1j, zz)[0],
        "bessel_i_series 4096": lambda m: m.bessel_i_series(1.3j, y),
        "loggamma 4096": lambda m: m.loggamma(z * 20 + 0.5),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _core is None:
        print("compiled extension not available; nothing to compare")
        return 1
    print(f"{'kernel':26s} {'python ms':>10s} {'cython ms':>10s} {'speedup':>8s} {'max rel diff':>13s}")
    for name, fn in cases().items():
        a, b = np.asarray(fn(_fallback)), np.asarray(fn(_core))
        diff = np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300))
        tp = min(timeit.repeat(lambda: fn(_fallback), number=1, repeat=args.repeat)) * 1e3
        tc = min(timeit.repeat(lambda: fn(_core), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:26s} {tp:10.2f} {tc:10.2f} {tp / tc:8.1f} {diff:13.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
