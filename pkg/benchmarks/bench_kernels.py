"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5]

Both paths are called explicitly (``use_numba=True/False``) so the
``GNGSTREAM_DISABLE_NUMBA`` flag does not matter here.  The first numba
call is made before timing so compilation is excluded.
"""
import argparse
import time

import numpy as np

from gngstream import _accel
from gngstream.geometry import alpha_shape, intersection_area
from gngstream.gng import GngParams, gng_fit


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(seed=0):
    rng = np.random.default_rng(seed)
    batch = rng.normal(size=(400, 2))
    big = rng.normal(size=(5000, 2))
    a = alpha_shape(rng.normal(size=(400, 2)))
    b = alpha_shape(rng.normal(size=(400, 2)) + 0.3)
    return {
        "gng batch (400 x 2)": lambda nb: gng_fit(batch, GngParams(), use_numba=nb),
        "gng prefix (5000 x 2)": lambda nb: gng_fit(big, GngParams(), use_numba=nb),
        f"alpha-shape intersection ({len(a.triangles)} x {len(b.triangles)} tri)":
            lambda nb: intersection_area(a, b, use_numba=nb),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    print(f"{'kernel':<48} {'numpy [s]':>10} {'numba [s]':>10} {'speedup':>8}")
    for name, fn in cases().items():
        fn(True)
        t_np = _best(lambda: fn(False), args.repeat)
        t_nb = _best(lambda: fn(True), args.repeat)
        print(f"{name:<48} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
