"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--sizes 8,32,128]

Prints one row per (kernel, N) with the best-of-``repeat`` time for each
backend and the speedup. Both backends are fed the same inputs and their
outputs are compared before timing (loosely for the iterative kernels,
where rounding differences accumulate over iterations).
"""

import argparse
import sys
import timeit

import numpy as np

from framelab import kernels


def workloads(N, d, rng):
    V = rng.standard_normal((N, d))
    V /= np.linalg.norm(V, axis=1)[:, None]
    return {
        "ratio_terms": lambda k: k.ratio_terms(V, 0.1),
        "softmin_value_grad": lambda k: k.softmin_value_grad(V, 0.1, 100.0),
        "ascend(200 it)": lambda k: k.ascend(V.copy(), 1.0, 2.0, 0.1, 100.0, 1e-2, 200, 0.0, 10**9),
        "fp_descent(200 it)": lambda k: k.fp_descent(V.copy(), 1.0, 1.0 / (4 * N), 200, 0.0, 10),
    }


def _flat(result):
    if isinstance(result, tuple):
        return np.concatenate([np.ravel(np.asarray(r, dtype=float)) for r in result])
    return np.ravel(np.asarray(result, dtype=float))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--sizes", default="8,32,128")
    parser.add_argument("--dim", type=int, default=4)
    args = parser.parse_args(argv)

    py = kernels.get_backend("python")
    try:
        cy = kernels.get_backend("cython")
    except ImportError:
        print("compiled kernels are not built; nothing to compare", file=sys.stderr)
        return 1

    rng = np.random.default_rng(0)
    print(f"{'kernel':<22}{'N':>6}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    for N in (int(s) for s in args.sizes.split(",")):
        for name, call in workloads(N, args.dim, rng).items():
            a, b = _flat(call(py)), _flat(call(cy))
            tol = 1e-6 if "it)" in name else 1e-12
            if not np.allclose(a, b, rtol=tol, atol=tol):
                print(f"{name}: backends disagree (max diff {np.max(np.abs(a - b)):.3e})", file=sys.stderr)
                return 1
            t_py = min(timeit.repeat(lambda: call(py), number=1, repeat=args.repeat))
            t_cy = min(timeit.repeat(lambda: call(cy), number=1, repeat=args.repeat))
            print(f"{name:<22}{N:>6}{1e3 * t_py:>14.3f}{1e3 * t_cy:>14.3f}{t_py / t_cy:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
