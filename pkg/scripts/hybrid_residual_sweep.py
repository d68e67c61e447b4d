#!/usr/bin/env python3
"""Sweep the hybrid-product residual over truncation points X.

For each X the relative residual |zeta_K - P*Z| / |zeta_K| is sampled at
random heights t in [t_lo, t_hi] and summarized by median / p95 / max.
Zeros are read from (or computed into) the cache directory.
"""

import argparse
import random
import statistics

from dedm import hybrid, lfun
from dedm.fields import build_field


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dk", type=int, default=-4)
    ap.add_argument("--X", type=lambda s: [float(x) for x in s.split(",")],
                    default=[10.0, 16.0, 25.0])
    ap.add_argument("--t-lo", type=float, default=1000.0)
    ap.add_argument("--t-hi", type=float, default=2000.0)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=101)
    ap.add_argument("--cache-dir", default=".zero-cache")
    args = ap.parse_args()

    F = build_field(args.dk)
    w = max(hybrid.recommended_window(X) for X in args.X)
    tz, tl = lfun.ensure_zero_cache(F, args.t_hi + w + 1.0, args.cache_dir)
    zeros = lfun.merge_tables(tz, tl)

    rng = random.Random(args.seed)
    ts = [args.t_lo + (args.t_hi - args.t_lo) * rng.random()
          for _ in range(args.samples)]
    print(f"d_K={args.dk}  {args.samples} samples, "
          f"t in [{args.t_lo:g}, {args.t_hi:g}]")
    print("X      window   median     p95        max")
    for X in args.X:
        cfg = hybrid.HybridConfig(X=X,
                                  zero_window=hybrid.recommended_window(X))
        K = hybrid.kernel_build(X)
        res = sorted(hybrid.hybrid_residual(t, F, cfg, zeros, K) for t in ts)
        med = statistics.median(res)
        p95 = res[max(0, int(0.95 * len(res)) - 1)]
        print(f"{X:<6g} {cfg.W:<8.3f} {med:<10.5f} {p95:<10.5f} {res[-1]:.5f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
