"""Compare the numba and numpy ML-decoding kernels on identical noisy batches.

    python benchmarks/bench_decode.py [--blocks 21846] [--repeat 3]
"""
import argparse
import time

import numpy as np

from baker_aecc import _accel
from baker_aecc.codec import CodeParams, ReceivedCodeword, encode, ml_decode


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--blocks", type=int, default=21846, help="default: one 256x256 image")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = ["numpy"] + (["numba"] if _accel.HAVE_NUMBA else [])
    rng = np.random.default_rng(0)
    print(f"{'code':>8} {'blocks':>7} " + " ".join(f"{b + ' [s]':>12}" for b in backends) + f" {'speedup':>8}")
    for n in (2, 3, 4):
        p = CodeParams(3, n)
        cw = encode(rng.uniform(-1, 1, (args.blocks, 3)), p)
        r = ReceivedCodeword(cw.x + 0.1 * rng.standard_normal(cw.x.shape), cw.y + 0.1 * rng.standard_normal(cw.y.shape))
        if "numba" in backends:
            ml_decode(ReceivedCodeword(r.rx[:2], r.ry[:2]), p, backend="numba")  # compile
        times, outs = {}, {}
        for b in backends:
            times[b], outs[b] = timed(lambda: ml_decode(r, p, backend=b), args.repeat)
        if len(outs) == 2:
            assert np.array_equal(outs["numpy"].estimates, outs["numba"].estimates)
        speed = times["numpy"] / times["numba"] if "numba" in times else float("nan")
        label = f"({p.length},3)"
        print(f"{label:>8} {args.blocks:>7} " + " ".join(f"{times[b]:12.4f}" for b in backends) + f" {speed:8.1f}x")


if __name__ == "__main__":
    main()
