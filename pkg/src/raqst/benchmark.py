"""Timing comparison between the pure-numpy kernels and their numba builds.

Run with ``python -m raqst.benchmark``.  The numba path is compiled
unconditionally here (independent of ``RAQST_NUMBA``) so both sides can be
measured; a warm-up call keeps compilation time out of the numbers.  The
closing full-trial timing uses whatever backend the environment selected.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from . import kernels
from .backend import USE_NUMBA
from .simulator import ProtocolKind, TrialConfig, run_protocol, singlet_state


def _time(fn, repeat: int) -> float:
    start = time.perf_counter()
    for _ in range(repeat):
        fn()
    return time.perf_counter() - start


def _bench_recursive(scale: int, rng) -> tuple[int, dict]:
    n_params = 15
    reps = 2000 * scale
    theta = rng.normal(size=n_params)
    q = np.eye(n_params) * 1e8
    gammas = rng.normal(size=(64, n_params)) / 4.0
    timings = {}
    for name, fn in _paths(kernels.recursive_update_numpy):
        def run(fn=fn):
            t, qq = theta.copy(), q.copy()
            for i in range(reps):
                g = gammas[i % 64]
                t, qq = fn(t, qq, 0.5, g, 0.3, 1000.0, 4.0)
        run()  # warm-up (jit compile)
        timings[name] = _time(run, 1)
    return reps, timings


def _bench_minp(scale: int, rng) -> tuple[int, dict]:
    reps = 100 * scale
    starts = rng.normal(size=(reps, 2, 3))
    starts /= np.linalg.norm(starts, axis=2, keepdims=True) * np.sqrt(2.0)
    pa = rng.normal(size=3) / 4.0
    pb = rng.normal(size=3) / 4.0
    pd = rng.normal(size=(3, 3)) / 4.0
    timings = {}
    for name, fn in _paths(kernels.minp_search_numpy):
        def run(fn=fn):
            for i in range(reps):
                fn(pa, pb, pd, starts[i, 0], starts[i, 1], 1e-10, 1000)
        run()
        timings[name] = _time(run, 1)
    return reps, timings


def _bench_simplex(scale: int, rng) -> tuple[int, dict]:
    reps = 5000 * scale
    vecs = rng.normal(size=(reps, 4)) * 0.5 + 0.25
    timings = {}
    for name, fn in _paths(kernels.simplex_project_numpy):
        def run(fn=fn):
            for i in range(reps):
                fn(vecs[i])
        run()
        timings[name] = _time(run, 1)
    return reps, timings


def _paths(numpy_fn):
    yield "numpy", numpy_fn
    try:
        from .backend import jit_always

        yield "numba", jit_always(numpy_fn)
    except ImportError:
        pass


def _report(label: str, reps: int, timings: dict) -> None:
    np_t = timings["numpy"]
    line = f"{label} ({reps}x): numpy {np_t:.3f} s"
    if "numba" in timings:
        nb_t = timings["numba"]
        ratio = np_t / nb_t if nb_t > 0 else float("inf")
        line += f", numba {nb_t:.3f} s, speedup {ratio:.1f}x"
    else:
        line += ", numba unavailable"
    print(line)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m raqst.benchmark",
        description="Time the numpy and numba kernel paths.",
    )
    parser.add_argument(
        "--scale", type=int, default=1, help="multiply the per-kernel repetition counts"
    )
    args = parser.parse_args(argv)
    if args.scale < 1:
        parser.error("--scale must be >= 1")
    rng = np.random.default_rng(0)
    print(f"active backend: {'numba' if USE_NUMBA else 'numpy'}")
    _report("recursive_update", *_bench_recursive(args.scale, rng))
    _report("minp_search", *_bench_minp(args.scale, rng))
    _report("simplex_project", *_bench_simplex(args.scale, rng))

    cfg = TrialConfig(
        protocol=ProtocolKind.RAQST2, n_copies=10000, seed=0, true_state=singlet_state()
    )
    run_protocol(cfg)  # warm-up
    start = time.perf_counter()
    result = run_protocol(cfg)
    elapsed = time.perf_counter() - start
    print(
        f"full raqst2 trial (N=10000, active backend): {elapsed:.3f} s, "
        f"infidelity {result.infidelity:.3e}"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
