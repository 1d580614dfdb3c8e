"""Benchmark the numba kernels against the pure-numpy fallback.

Run both backends:

    python3 benchmarks/bench_kernels.py
    OPERTAIL_NUMBA=0 python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from opertail import kernels


def bench(fn, *args, repeat=5):
    fn(*args)  # warm-up (includes jit compilation on the numba path)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    rng = np.random.default_rng(0)
    x = rng.pareto(1.0, size=(10 ** 6, 3)) + 1.0
    w = np.array([2.0, 2.0, 2.0])
    print(f"backend: {kernels.BACKEND}")
    for kind, label in [(kernels.REGION_BOX, "box"),
                        (kernels.REGION_UPPER_ORTHANT, "upper_orthant"),
                        (kernels.REGION_LOWER_UNION, "lower_union"),
                        (kernels.REGION_BOX_COMPLEMENT, "box_complement")]:
        t = bench(kernels.count_in_region, x, w, kind)
        print(f"count_in_region[{label:>14}]  n=1e6 d=3: {t * 1e3:8.2f} ms")
    tail = np.sort(rng.pareto(1.0, size=10 ** 6) + 1.0)[-10 ** 5:]
    t = bench(kernels.hill_log_sum, tail, float(tail[0]))
    print(f"hill_log_sum               k=1e5:      {t * 1e3:8.2f} ms")


if __name__ == "__main__":
    main()
