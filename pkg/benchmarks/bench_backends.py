#!/usr/bin/env python3
"""Compare the compiled contraction kernel against the pure-Python fallback.

Times the raw contract_axis kernel and a full projection pass on a ladder of
cube shapes, printing one row per (shape, backend). Run from the repo root:

    python3 benchmarks/bench_backends.py [--n 100] [--repeat 20]
"""

import argparse
import time

import numpy as np

from fastr import _backend
from fastr.simulate import SimSpec, gen_dataset
from fastr.tensor import projection


def time_call(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--shapes", nargs="+", type=int, default=[5, 10, 15, 20, 25],
                        help="cube edge lengths")
    parser.add_argument("--n", type=int, default=100, help="samples per dataset")
    parser.add_argument("--repeat", type=int, default=20,
                        help="repetitions per timing (best is reported)")
    args = parser.parse_args()

    backends = _backend.available_backends()
    print(f"backends: {', '.join(backends)}")
    print(f"{'shape':>12} {'backend':>10} {'contract_s':>12} {'projection_s':>14}")

    original = _backend.active_backend()
    try:
        for edge in args.shapes:
            dims = (edge, edge, edge)
            data = gen_dataset(SimSpec(dims=dims, n_samples=args.n,
                                       sparsity_pct=20, noise_alpha=0.1, seed=0))
            rng = np.random.Generator(np.random.PCG64(1))
            factors = [rng.standard_normal(p) for p in dims]
            for name in backends:
                _backend.use(name)
                t_contract = time_call(
                    lambda: _backend.contract_axis(data.samples, 1, factors[0]),
                    args.repeat,
                )
                t_proj = time_call(
                    lambda: projection(data.samples, factors, 0), args.repeat
                )
                label = "x".join(str(d) for d in dims)
                print(f"{label:>12} {name:>10} {t_contract:>12.6f} {t_proj:>14.6f}")
    finally:
        _backend.use(original)


if __name__ == "__main__":
    main()
