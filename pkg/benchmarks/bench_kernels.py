"""Time the compiled and numpy kernel backends on the two hot paths.

    python benchmarks/bench_kernels.py --n 100000 1000000 --repeat 3

Reports the best-of-``repeat`` wall time of the two raw kernels
(``window_bounds``, ``coverage_sweep``) and of the operations built on them
(``pair_aggregate``, ``i2_sweep``) for every available backend, and checks
that the backends agree exactly.
"""
import argparse
import time

import numpy as np

from weakppc import _backend, gen_uniform, i2_sweep, pair_aggregate


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def _key(out):
    if isinstance(out, tuple) and all(isinstance(a, np.ndarray) for a in out):
        return tuple(a.tobytes() for a in out)
    return repr(out)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[100_000, 1_000_000])
    ap.add_argument("--beta", type=float, default=0.5)
    ap.add_argument("--s", type=float, default=5.0)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    backends = sorted(_backend.BACKENDS)
    print(f"backends: {', '.join(backends)} (default {_backend.DEFAULT})")
    print(f"{'N':>9} {'kernel':<15} " + " ".join(f"{b:>10}" for b in backends) + "   speedup")
    for n in args.n:
        ps = gen_uniform(n, args.seed)
        w = args.s / float(n) ** args.beta
        xs = ps.sorted
        h = 0.5 * w
        starts, ends = np.sort((xs - h) % 1.0), np.sort((xs + h) % 1.0)
        jobs = {
            "window_bounds": lambda b: _backend.get(b).window_bounds(xs, w),
            "coverage_sweep": lambda b: _backend.get(b).coverage_sweep(starts, ends, 1),
            "pair_aggregate": lambda b: pair_aggregate(ps, w, backend=b),
            "i2_sweep": lambda b: i2_sweep(ps, args.beta, args.s, backend=b),
        }
        for name, job in jobs.items():
            results = {b: best_of(lambda: job(b), args.repeat) for b in backends}
            if len({_key(out) for _, out in results.values()}) != 1:
                raise SystemExit(f"backends disagree on {name} at N={n}")
            cells = " ".join(f"{results[b][0] * 1e3:8.1f}ms" for b in backends)
            speed = ""
            if "cython" in results:
                speed = f"{results['python'][0] / results['cython'][0]:8.1f}x"
            print(f"{n:>9} {name:<15} {cells} {speed}")


if __name__ == "__main__":
    main()
