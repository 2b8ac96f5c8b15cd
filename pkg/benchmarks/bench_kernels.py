"""Timing harness comparing the numba kernels against the numpy fallback.

The kernel module is chosen once at import time from FEDUNLEARN_BACKEND,
so each backend is measured in its own subprocess and the parent prints
a side-by-side table:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --repeats 7 --target-ms 100

Pass --backend to time a single backend in-process instead (handy when
numba is not installed).
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def build_workloads(seed=7):
    """Named closures over fixed inputs; sizes echo the reference scenario
    (batch 64, layers 20-64-32-4) plus square tiles that stress the GEMMs."""
    from fedunlearn.numcore import MlpArch, MlpModel, ce_grad, forward, gaussian_init
    from fedunlearn.numcore.backend import kernels
    from fedunlearn.rng import derive_rng

    rng = derive_rng(seed, "bench")
    arch = MlpArch((20, 64, 32, 4))
    model = MlpModel(arch, gaussian_init(arch, rng))
    x = rng.normal(size=(64, 20))
    y = rng.integers(0, 4, 64)

    a = rng.normal(size=(256, 256))
    b = rng.normal(size=(256, 256))
    bias = rng.normal(size=256)
    logits = rng.normal(size=(1024, 16))
    labels = rng.integers(0, 16, 1024)
    params = rng.normal(size=100_000)
    grad = rng.normal(size=100_000)
    moment = np.zeros(100_000)
    p_small = rng.normal(size=arch.param_count())
    g_small = rng.normal(size=arch.param_count())
    m_small = np.zeros(arch.param_count())

    return [
        ("forward 64x(20-64-32-4)", lambda: forward(model, x)),
        ("ce_grad 64x(20-64-32-4)", lambda: ce_grad(model, x, y)),
        ("affine_relu 256^2", lambda: kernels.affine_relu(a, b, bias)),
        ("matmul_tn 256^2", lambda: kernels.matmul_tn(a, b)),
        ("softmax_xent 1024x16", lambda: kernels.softmax_xent(logits, labels)),
        ("adam_update scenario-size", lambda: kernels.adam_update(
            p_small, g_small, m_small, m_small, 3, 1e-3, 0.9, 0.99, 1e-8)),
        ("adam_update 1e5", lambda: kernels.adam_update(
            params, grad, moment, moment, 3, 1e-3, 0.9, 0.99, 1e-8)),
    ]


def time_workload(fn, repeats, target_ms):
    """Best-of-repeats microseconds per call, with the loop count calibrated
    so one measurement lasts about target_ms."""
    fn()  # warmup; first numba call pays JIT compilation here
    started = time.perf_counter()
    fn()
    single = max(time.perf_counter() - started, 1e-9)
    iters = max(1, int(target_ms / 1000.0 / single))

    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        for _ in range(iters):
            fn()
        best = min(best, (time.perf_counter() - started) / iters)
    return best * 1e6


def run_child(backend, repeats, target_ms):
    from fedunlearn.numcore.backend import BACKEND_NAME

    if BACKEND_NAME != backend:
        raise SystemExit(f"asked for backend {backend!r} but loaded {BACKEND_NAME!r}")
    results = [(name, time_workload(fn, repeats, target_ms))
               for name, fn in build_workloads()]
    print(json.dumps({"backend": backend, "results": results}))


def spawn(backend, repeats, target_ms):
    env = dict(os.environ, FEDUNLEARN_BACKEND=backend)
    proc = subprocess.run(
        [sys.executable, __file__, "--child", "--backend", backend,
         "--repeats", str(repeats), "--target-ms", str(target_ms)],
        env=env, capture_output=True, text=True)
    if proc.returncode != 0:
        raise SystemExit(f"{backend} child failed:\n{proc.stderr}")
    return json.loads(proc.stdout)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--target-ms", type=float, default=50.0)
    parser.add_argument("--backend", choices=("numba", "numpy"))
    parser.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args(argv)

    if args.backend and args.child:
        run_child(args.backend, args.repeats, args.target_ms)
        return
    if args.backend:
        os.environ.setdefault("FEDUNLEARN_BACKEND", args.backend)
        for name, us in spawn(args.backend, args.repeats, args.target_ms)["results"]:
            print(f"{name:<28} {us:>10.1f} us")
        return

    numba = spawn("numba", args.repeats, args.target_ms)
    numpy_ = spawn("numpy", args.repeats, args.target_ms)
    print(f"{'workload':<28} {'numba':>12} {'numpy':>12} {'speedup':>9}")
    for (name, us_nb), (_, us_np) in zip(numba["results"], numpy_["results"]):
        print(f"{name:<28} {us_nb:>9.1f} us {us_np:>9.1f} us {us_np / us_nb:>8.2f}x")


if __name__ == "__main__":
    main()
