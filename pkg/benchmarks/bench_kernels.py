"""Numba vs numpy backends on the hot kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

The backend is fixed at import time by STARK_DISABLE_JIT, so each backend runs
in its own subprocess. Numba compile time is excluded (one warm-up call).
"""
import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def _best(fn, repeat):
    fn()
    ts = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        ts.append(time.perf_counter() - t0)
    return min(ts)


def worker(repeat):
    from starklp import kernels
    from starklp.evolution import oracle_spectrum
    from starklp.model import ModelParams

    rng = np.random.default_rng(7)
    z = (rng.uniform(-12, 12, 200_000) + 1j * rng.uniform(-3, 12, 200_000)).astype(np.complex128)
    spec = oracle_spectrum(ModelParams(1.0, 2.0))
    t = np.linspace(0.0, 10.0, 2001)
    hm = (rng.standard_normal((400, 600)) + 0j).astype(np.complex128)
    hp = (rng.standard_normal((400, 600)) + 0j).astype(np.complex128)
    u = rng.uniform(0.01, 5.0, (400, 600))
    wts = rng.uniform(0.0, 0.01, (400, 600))
    out = {
        "backend": kernels.BACKEND,
        "faddeeva_200k": _best(lambda: kernels.faddeeva(z), repeat),
        "spectral_sum_801x2001": _best(lambda: kernels.spectral_sum(spec.weights, spec.eigenvalues, t), repeat),
        "pv_pair_sum_400x600": _best(lambda: kernels.pv_pair_sum(hm, hp, u, wts), repeat),
    }
    print(json.dumps(out))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--worker", action="store_true")
    args = ap.parse_args()
    if args.worker:
        worker(args.repeat)
        return
    rows = []
    for flag in ("0", "1"):
        env = dict(os.environ, STARK_DISABLE_JIT=flag, PYTHONWARNINGS="ignore")
        res = subprocess.run([sys.executable, __file__, "--worker", "--repeat", str(args.repeat)],
                             env=env, capture_output=True, text=True, check=True)
        rows.append(json.loads(res.stdout.strip().splitlines()[-1]))
    keys = [k for k in rows[0] if k != "backend"]
    print(f"{'kernel':26s}" + "".join(f"{r['backend']:>12s}" for r in rows) + f"{'speedup':>10s}")
    for k in keys:
        a, b = rows[0][k], rows[1][k]
        print(f"{k:26s}{a * 1e3:10.2f}ms{b * 1e3:10.2f}ms{b / a:9.1f}x")


if __name__ == "__main__":
    main()
