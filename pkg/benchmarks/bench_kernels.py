"""Timing comparison of the compiled and pure-numpy sweep kernels.

Runs the mixture and classical chains at several problem sizes on both
backends and reports sweep throughput.  The two backends are
bit-identical in output (enforced by the test suite), so this is purely
a speed comparison.

Usage: python benchmarks/bench_kernels.py [--iterations N]
"""

import argparse
import time

import numpy as np

from fhmix import ChainConfig, Dataset, PriorConfig, run_fh_chain, run_mixture_chain
from fhmix.backends import available_backends
from fhmix.simstudy import make_acs_like


def make_case(m: int) -> Dataset:
    if m >= 500:
        data, _ = make_acs_like(m=m, seed=0)
        return data
    rng = np.random.default_rng(0)
    X = np.column_stack([np.ones(m), rng.normal(10.0, 1.4, m)])
    d = rng.uniform(0.5, 5.0, m)
    y = X @ np.array([20.0, 1.0]) + rng.normal(0.0, 1.0, m) + rng.standard_normal(m) * np.sqrt(d)
    return Dataset(y=y, d_var=d, X=X)


def bench(label, fn, iterations):
    t0 = time.perf_counter()
    fn()
    dt = time.perf_counter() - t0
    rate = iterations / dt
    print(f"  {label:<28} {dt:8.3f} s   {rate:10.0f} sweeps/s")
    return dt


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--iterations", type=int, default=2000)
    args = ap.parse_args()
    iters = args.iterations
    cfg = ChainConfig(iterations=iters, burn_in=iters // 4, chains=1, seed=1)
    prior = PriorConfig(alpha1=0.3, alpha2=1.3)
    backends = available_backends()
    print(f"backends: {', '.join(backends)}   iterations per chain: {iters}")
    for m in (100, 1000, 3141):
        data = make_case(m)
        print(f"\nm = {m}")
        times = {}
        for backend in backends:
            times[backend] = bench(
                f"mixture [{backend}]",
                lambda b=backend: run_mixture_chain(data, prior, cfg, backend=b),
                iters)
            bench(f"classical [{backend}]",
                  lambda b=backend: run_fh_chain(data, cfg, backend=b), iters)
        if "compiled" in times and "python" in times:
            print(f"  mixture speedup: {times['python'] / times['compiled']:.2f}x")


if __name__ == "__main__":
    main()
