"""Time the compiled kernels against the numpy fallback on random digit batches.

    python3 benchmarks/bench_kernels.py [--rows 20000] [--width 8] [--q 9] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from rtflab import _pykernels
from rtflab.fields import residue_field

try:
    from rtflab import _ckernels
except ImportError:
    _ckernels = None


def batches(q, rows, width, seed):
    rng = np.random.default_rng(seed)
    A = rng.integers(0, q, size=(rows, width), dtype=np.int64)
    B = rng.integers(0, q, size=(rows, width), dtype=np.int64)
    A[:, 0] = rng.integers(1, q, size=rows)
    return A, B


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rows", type=int, default=20000)
    ap.add_argument("--width", type=int, default=8)
    ap.add_argument("--q", type=int, default=9)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    F = residue_field(args.q)
    A, B = batches(args.q, args.rows, args.width, args.seed)
    Z = A.copy()
    Z[:, : args.width // 2] = 0
    cases = {
        "conv": lambda k: k.conv(A, B, args.width, F.add_t, F.mul_t),
        "first_nonzero": lambda k: k.first_nonzero(Z),
        "inv_units": lambda k: k.inv_units(A, F.add_t, F.mul_t, F.neg_t, F.inv_t),
    }
    impls = [("numpy", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"q={args.q} rows={args.rows} width={args.width} (best of {args.repeat})")
    for name, run in cases.items():
        ref = run(_pykernels)
        line = [f"{name:<14}"]
        times = {}
        for label, impl in impls:
            out = run(impl)
            if not np.array_equal(out, ref):
                raise SystemExit(f"{label} disagrees with numpy on {name}")
            times[label] = min(timeit.repeat(lambda: run(impl), number=1, repeat=args.repeat))
            line.append(f"{label} {times[label] * 1e3:9.2f} ms")
        if "cython" in times:
            line.append(f"speedup x{times['numpy'] / times['cython']:.1f}")
        print("  ".join(line))
    if _ckernels is None:
        print("compiled extension not built; only the numpy path was timed")


if __name__ == "__main__":
    main()
