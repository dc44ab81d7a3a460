#!/usr/bin/env python3
"""
Grid evaluation benchmark for digitdim
Times F_L over verification grids and records memory use per worker count.
"""

import argparse
import gc
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

import psutil

sys.path.insert(0, str(Path(__file__).parent))

from digitdim.digitmeasure import make_one_missing  # noqa: E402
from digitdim.grid import GridSpec, evaluate_grid  # noqa: E402

# (b, a, L, delta): one case per published grid shape
CASES = [
    (3, 1, 2, Fraction(1, 10 ** 4)),
    (5, 0, 2, Fraction(1, 10 ** 5)),
    (20, 3, 1, Fraction(1, 10 ** 4)),
    (111, 0, 1, Fraction(1, 10 ** 4)),
]


def get_memory_usage():
    """Resident set size of this process and its workers, in MB"""
    process = psutil.Process()
    rss = process.memory_info().rss
    for child in process.children(recursive=True):
        try:
            rss += child.memory_info().rss
        except psutil.NoSuchProcess:
            pass
    return rss / 1024 / 1024


def bench_case(b, a, L, delta, jobs, prec):
    system = make_one_missing(b, a)
    grid = GridSpec(b, L, delta)
    gc.collect()
    mem_before = get_memory_usage()
    start = time.perf_counter()
    extrema = evaluate_grid(system, grid, jobs=jobs, prec=prec)
    elapsed = time.perf_counter() - start
    mem_after = get_memory_usage()
    return {
        "system": system.describe(),
        "L": L,
        "delta": str(delta),
        "jobs": jobs,
        "points": grid.count,
        "seconds": round(elapsed, 3),
        "points_per_second": round(grid.count / elapsed, 1) if elapsed else None,
        "memory_mb": round(mem_after - mem_before, 2),
        "grid_max_hi": float(extrema.max.upper),
    }


def main():
    parser = argparse.ArgumentParser(description="Benchmark digitdim grid evaluation")
    parser.add_argument("--jobs", type=int, nargs="+", default=[1, psutil.cpu_count(logical=False) or 1])
    parser.add_argument("--precision", type=int, default=128)
    parser.add_argument("--output", type=Path, help="write results as JSON")
    args = parser.parse_args()

    print("=" * 70)
    print("digitdim grid benchmark")
    print(f"CPUs: {psutil.cpu_count(logical=False)} physical / {psutil.cpu_count()} logical")
    print("=" * 70)

    results = []
    for b, a, L, delta in CASES:
        for jobs in args.jobs:
            row = bench_case(b, a, L, delta, jobs, args.precision)
            results.append(row)
            print(
                f"{row['system']:<18} L={L} delta={row['delta']:<9} jobs={jobs:<3} "
                f"{row['points']:>9,} pts  {row['seconds']:>8.2f}s  "
                f"{row['points_per_second']:>10} pts/s  {row['memory_mb']:>7.2f} MB"
            )

    if args.output:
        args.output.write_text(json.dumps(results, indent=2) + "\n", encoding="utf-8")
        print(f"\nResults written to {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
