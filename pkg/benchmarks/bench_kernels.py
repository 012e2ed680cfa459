#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Times the raw per-block sweep kernels and a composite workload (one
de-interleaver extinction objective evaluation, the tuner's inner loop)
with each backend and prints a comparison table.

Usage: python benchmarks/bench_kernels.py [--points N] [--repeats N]
"""

import argparse
import time

import numpy as np

import rfshaper.kernels as kernels
from rfshaper.kernels import _ref

try:
    from rfshaper.kernels import _core
except ImportError:
    _core = None


def timeit(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(5):
        t0 = time.perf_counter()
        for _ in range(repeats):
            fn()
        best = min(best, (time.perf_counter() - t0) / repeats)
    return best


def bench_raw(offsets: np.ndarray, repeats: int):
    cases = {
        "waveguide_grid": lambda mod: mod.waveguide_grid(offsets, 0.87, 55.0),
        "ring_allpass_grid": lambda mod: mod.ring_allpass_grid(
            offsets, 0.915, 0.93, 50.0, 2.5),
        "ring_adddrop_grid": lambda mod: mod.ring_adddrop_grid(
            offsets, 0.95, 0.95, 0.915, 50.0, -3.0),
    }
    rows = []
    for name, call in cases.items():
        t_ref = timeit(lambda: call(_ref), repeats)
        t_core = timeit(lambda: call(_core), repeats) if _core else float("nan")
        rows.append((name, t_ref, t_core))
    return rows


def bench_objective(repeats: int):
    from rfshaper.topologies import DeinterleaverSpec, build_deinterleaver
    from rfshaper.tuner import Objective

    graph = build_deinterleaver(DeinterleaverSpec.designed())
    fn = Objective("deinterleaver_extinction").build(graph)
    heaters = {"ps_trim.phase": 4.71}

    def with_backend(mod):
        saved = {n: getattr(kernels, n) for n in
                 ("waveguide_grid", "ring_allpass_grid", "ring_adddrop_grid")}
        for n in saved:
            setattr(kernels, n, getattr(mod, n))
        try:
            return timeit(lambda: fn(heaters), repeats)
        finally:
            for n, f in saved.items():
                setattr(kernels, n, f)

    t_ref = with_backend(_ref)
    t_core = with_backend(_core) if _core else float("nan")
    return [("deinterleaver objective", t_ref, t_core)]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=401)
    parser.add_argument("--repeats", type=int, default=2000)
    args = parser.parse_args()

    print(f"active backend: {kernels.backend_name()}")
    if _core is None:
        print("compiled backend unavailable; timing the fallback only")
    offsets = np.linspace(-30.0, 30.0, args.points)

    rows = bench_raw(offsets, args.repeats)
    rows += bench_objective(max(args.repeats // 10, 50))
    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'python':>10}  {'compiled':>10}  {'speedup':>8}")
    for name, t_ref, t_core in rows:
        speed = t_ref / t_core if t_core == t_core else float("nan")
        print(f"{name:<{width}}  {t_ref * 1e6:>8.1f}us  {t_core * 1e6:>8.1f}us"
              f"  {speed:>7.2f}x")


if __name__ == "__main__":
    main()
