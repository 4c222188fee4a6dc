"""Compare the compiled and pure-Python character-sum kernels.

    python benchmarks/bench_kernels.py [--cases 11:1,13:2,23:2] [--repeat 3]

Each case is timed for both backends on the straight and twisted counts, and
the two backends must return identical counts.
"""

from __future__ import annotations

import argparse
import statistics
import time

from rank3frob import _kernels
from rank3frob.counting import SurfaceModel, count_straight, count_twisted


def _time(fn, repeat):
    out, ts = None, []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        ts.append(time.perf_counter() - t0)
    return out, statistics.median(ts)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cases", default="11:1,31:1,13:2,23:2")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _kernels.compiled is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e .` first")

    model = SurfaceModel()
    cases = [tuple(int(v) for v in c.split(":")) for c in args.cases.split(",")]
    print(f"{'p':>4} {'k':>2} {'kind':<9} {'cells':>10} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for p, k in cases:
        for kind, fn in (("straight", count_straight), ("twisted", count_twisted)):
            res = {}
            for backend in ("python", "compiled"):
                rec, t = _time(lambda: fn(model, p, k, workers=1, backend=backend), args.repeat)
                res[backend] = (rec.count, t)
            if res["python"][0] != res["compiled"][0]:
                raise SystemExit(f"backends disagree at p={p} k={k} {kind}: {res}")
            tp, tc = res["python"][1], res["compiled"][1]
            print(f"{p:>4} {k:>2} {kind:<9} {p ** (2 * k):>10} {tp:>10.4f} {tc:>11.4f} {tp / tc:>7.1f}x")


if __name__ == "__main__":
    main()
