"""Compare the compiled and pure-Python tally kernels.

    python3 benchmarks/bench_tally.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from ppchoice import _tally_py
from ppchoice.construct import construct, plan_minimum_N

try:
    from ppchoice import _tally_ext
except ImportError:
    _tally_ext = None

CASES = [
    ("D(20,10,2,3)", lambda: plan_minimum_N(10, 3).build()),
    ("D(40,10,4,3)", lambda: construct(10, 3, 4, model="broader")),
    ("D(104,13,2,6)", lambda: plan_minimum_N(13, 6).build()),
    ("D(16,8,5,6) broader", lambda: construct(8, 6, 5, model="broader", generators=["11100000", "00111100"])),
]


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _tally_ext is None:
        print("compiled kernel not built; only the Python kernel is timed")
    print(f"{'design':<22}{'mode':<9}{'python ms':>11}{'cython ms':>11}{'speedup':>9}")
    for name, build in CASES:
        levels = build().levels
        for broader in (False, True):
            py = best_time(lambda: _tally_py.tally(levels, broader), args.repeat)
            mode = "broader" if broader else "main"
            if _tally_ext is None:
                print(f"{name:<22}{mode:<9}{py * 1e3:>11.3f}{'-':>11}{'-':>9}")
                continue
            ext = _tally_ext.tally(levels, broader)
            ref = _tally_py.tally(levels, broader)
            assert all(np.array_equal(ext[k], ref[k]) for k in ref)
            cy = best_time(lambda: _tally_ext.tally(levels, broader), args.repeat)
            print(f"{name:<22}{mode:<9}{py * 1e3:>11.3f}{cy * 1e3:>11.3f}{py / cy:>8.1f}x")


if __name__ == "__main__":
    main()
