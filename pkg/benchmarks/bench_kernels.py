"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--m 5000] [--dirs 256] [--repeat 5]
"""

import argparse
import time

import numpy as np

from riskgeom._kernels import IMPLEMENTATIONS


def best_of(fn, args, repeat):
    fn(*args)  # compile / warm caches
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, default=5000, help="atoms")
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--dirs", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    pts = rng.normal(size=(args.m, args.d))
    w = rng.uniform(0.1, 1, args.m)
    w /= w.sum()
    dirs = rng.normal(size=(args.dirs, args.d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    order = np.argsort(pts[:, 0], kind="stable")
    y, wy = np.ascontiguousarray(pts[order, 0]), np.ascontiguousarray(w[order])

    cases = {
        "lower_tail_mean": (y, wy, 0.1),
        "spectral_lower": (y, wy, 3.0),
        "zonoid_support_batch": (pts, w, dirs, 0.1),
        "ech_support_batch": (pts, w, dirs, 3.0),
    }
    names = [k for k in ("numpy", "numba") if k in IMPLEMENTATIONS]
    print(f"m={args.m} d={args.d} directions={args.dirs} (best of {args.repeat})")
    print(f"{'kernel':24s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for kernel, a in cases.items():
        t = [best_of(IMPLEMENTATIONS[n][kernel], a, args.repeat) for n in names]
        ref = IMPLEMENTATIONS["numpy"][kernel](*a)
        for n in names[1:]:
            np.testing.assert_allclose(IMPLEMENTATIONS[n][kernel](*a), ref, atol=1e-9)
        row = f"{kernel:24s}" + "".join(f"{x * 1e3:10.3f}ms" for x in t)
        if len(t) == 2:
            row += f"{t[0] / t[1]:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
