"""Compare the compiled and pure-Python kernel backends.

Usage: ``python benchmarks/bench_kernels.py [--repeat N]``
"""

import argparse
import timeit

import numpy as np

from miso_wiretap import fixed_point_solve, jakes_covariance, kernels, Scenario


def cases():
    rng = np.random.default_rng(0)
    xs = 10 ** rng.uniform(-3, 3, 2000)
    js = rng.uniform(0, 40, 2000)
    d = np.sort(rng.uniform(0.05, 1.0, 4))[::-1]
    s = Scenario.statistical(jakes_covariance(4, 0.5), jakes_covariance(4, 0.3, scale=0.3), 10.0)
    k = lambda: kernels.impl  # noqa: E731 - resolve the backend at call time
    return {
        "f1 x2000": lambda: [k().f1(x) for x in xs],
        "f2 x2000": lambda: [k().f2(x) for x in xs],
        "j0 x2000": lambda: [k().bessel_j0(x) for x in js],
        "f1_array 2000": lambda: k().f1_array(xs),
        "expected_log_eigs n=4 x500": lambda: [k().expected_log_eigs(d, 10.0) for _ in range(500)],
        "resolvent_weights n=4 x500": lambda: [k().resolvent_weights(d, 4, 10.0) for _ in range(500)],
        "fixed_point_solve 100 iters": lambda: fixed_point_solve(s, max_iters=100, tol=0),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    backends = kernels.available_backends()
    prev = kernels.BACKEND
    results = {}
    for name, fn in cases().items():
        for b in backends:
            kernels.use_backend(b)
            results[name, b] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
    kernels.use_backend(prev)
    header = f"{'case':32s}" + "".join(f"{b:>12s}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    for name in cases():
        row = f"{name:32s}" + "".join(f"{results[name, b] * 1e3:10.2f}ms" for b in backends)
        if len(backends) == 2:
            row += f"{results[name, 'python'] / results[name, 'cython']:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
