"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--sizes 1 100 10000] [--repeat 5]

Prints one CSV row per (kernel, batch size, backend) with the best wall time
per call and the speedup of the compiled backend.
"""
import argparse
import sys
import timeit

import numpy as np

from finsleroid import kernels
from finsleroid.metric import cartan_tensor
from finsleroid.verify import sample_timelike

G = 1.5


def _batch(n):
    pts = sample_timelike(G, min(n, 1000), seed=0)
    X = np.array([R.components for R in pts])
    return np.resize(X, (n, 4)).copy()


def _time(fn, repeat):
    number = 1
    while timeit.timeit(fn, number=number) < 0.05:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[1, 100, 10000])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled kernels not built; only the numpy fallback is available", file=sys.stderr)
    print("kernel,n,backend,seconds_per_call,speedup")
    for name in ("fmf", "sigma", "sigma_jacobian", "metric"):
        for n in args.sizes:
            X = _batch(n)
            times = {}
            for label, mod in sorted(backends.items()):
                fn = getattr(mod, name)
                times[label] = _time(lambda: fn(G, X), args.repeat)
            base = times["python"]
            for label, t in sorted(times.items()):
                print(f"{name},{n},{label},{t:.3e},{base / t:.2f}")

    # end-to-end: one Cartan tensor = 2*N*(levels+1) batched metric calls
    R = _batch(1)[0]
    for label, mod in sorted(backends.items()):
        saved = kernels.metric
        kernels.metric = mod.metric
        try:
            t = _time(lambda: cartan_tensor(G, R), args.repeat)
        finally:
            kernels.metric = saved
        print(f"cartan_tensor,1,{label},{t:.3e},")


if __name__ == "__main__":
    main()
