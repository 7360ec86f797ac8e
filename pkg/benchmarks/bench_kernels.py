"""Time the compiled and pure-Python kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--n 2000] [--repeat 5] [--reps 2000]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from successodds import _pykernels, kernels
from successodds.inference import bootstrap_win_ratios
from successodds.values import NumericScale, Sample

try:
    from successodds import _ckernels
except ImportError:
    _ckernels = None


def best(fn, repeat: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000, help="observations per group")
    ap.add_argument("--support", type=int, default=50, help="distinct values (controls ties)")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--reps", type=int, default=2000, help="bootstrap replicates")
    args = ap.parse_args(argv)

    rng = np.random.default_rng(1)
    a = rng.integers(0, args.support, args.n).astype(np.int64)
    b = rng.integers(0, args.support, args.n).astype(np.int64)
    la, lb = a.tolist(), b.tolist()
    pooled = np.concatenate([a, b])

    rows = []
    for name, py, cy in (
        ("count_pairs_merge", lambda: _pykernels.count_pairs_merge(la, lb), lambda: _ckernels.count_pairs_merge(a, b)),
        ("count_pairs_brute", lambda: _pykernels.count_pairs_brute(la, lb), lambda: _ckernels.count_pairs_brute(a, b)),
        ("midranks2", lambda: _pykernels.midranks2(pooled.tolist()), lambda: _ckernels.midranks2(pooled)),
    ):
        t_py = best(py, args.repeat)
        t_cy = best(cy, args.repeat) if _ckernels is not None else float("nan")
        rows.append((name, t_py, t_cy))

    sa = Sample(tuple(la[:200]), NumericScale(0))
    sb = Sample(tuple(lb[:200]), NumericScale(0))
    saved = kernels._ckernels
    try:
        kernels._ckernels = None
        t_py = best(lambda: bootstrap_win_ratios(sa, sb, args.reps, 0), 1)
    finally:
        kernels._ckernels = saved
    t_cy = best(lambda: bootstrap_win_ratios(sa, sb, args.reps, 0), 1) if saved is not None else float("nan")
    rows.append((f"bootstrap ({args.reps} reps, n=200)", t_py, t_cy))

    print(f"n = {args.n} per group, {args.support} support points, best of {args.repeat}")
    print(f"{'kernel':36s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}")
    for name, t_py, t_cy in rows:
        print(f"{name:36s} {t_py:10.5f} {t_cy:10.5f} {t_py / t_cy:8.1f}x")


if __name__ == "__main__":
    main()
