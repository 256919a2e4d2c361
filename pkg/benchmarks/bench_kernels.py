"""Time the numba kernels against their numpy/Python fallbacks.

    python benchmarks/bench_kernels.py [--px 400] [--repeat 3]

With ESCAPE_ATLAS_JIT=0 only the fallback column is measured.
"""
import argparse
import time

import numpy as np

from escape_atlas import _jit
from escape_atlas._kernels import label_mask, native_orbits
from escape_atlas.efun import parse_spec
from escape_atlas.mmod import iterate_M
from escape_atlas.topology import Window, _mlog_floats


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--px", type=int, default=400, help="raster side in pixels")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    rows = []
    for desc in ("exp", "coshsq", "fatou"):
        f = parse_spec(desc)
        zs = Window(0, 50, -25, 25, args.px, args.px).centers().ravel()
        mlog = _mlog_floats(iterate_M(f, 10.0 if desc == "exp" else 2.0, 30).logs)
        run = lambda jit: native_orbits(f, zs, 30, mlog, stop_fail=True, use_jit=jit)
        slow = best_of(lambda: run(False), args.repeat)
        fast = None
        if _jit.JIT_ENABLED:
            run(True)  # compile
            fast = best_of(lambda: run(True), args.repeat)
        rows.append((f"native_orbits[{desc}]", zs.size, slow, fast))

    rng = np.random.default_rng(0)
    mask = np.ascontiguousarray(rng.random((args.px, args.px)) < 0.55)
    py = getattr(label_mask, "py_func", label_mask)
    slow = best_of(lambda: py(mask, False), args.repeat)
    fast = None
    if _jit.JIT_ENABLED:
        label_mask(mask, False)
        fast = best_of(lambda: label_mask(mask, False), args.repeat)
    rows.append(("label_mask", mask.size, slow, fast))

    print(f"{'kernel':<24}{'points':>10}{'fallback s':>12}{'numba s':>10}{'speedup':>9}")
    for name, n, slow, fast in rows:
        if fast is None:
            print(f"{name:<24}{n:>10}{slow:>12.4f}{'-':>10}{'-':>9}")
        else:
            print(f"{name:<24}{n:>10}{slow:>12.4f}{fast:>10.4f}{slow / fast:>8.1f}x")


if __name__ == "__main__":
    main()
