#!/usr/bin/env python3
"""Micro-benchmark: pure-Python stepping engine vs the compiled core.

Both engines implement the same byte-level contract (enabled choice ids,
firing, breadth-first exploration), so any workload is a fair race.  This
script times full reachability and one liveness check over mutual-exclusion
protocol builds of a few sizes with each engine and prints wall times plus
the speedup.

    python3 benchmarks/engine_bench.py [--repeat N] [--threads N] [--T 2 4 ...]
"""

from __future__ import annotations

import argparse
import time

from tickcheck import FischerConfig, build_fischer, explore_reachable, verify
from tickcheck.engine import HAVE_COMPILED


def best_of(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main(argv=None):
    ap = argparse.ArgumentParser(
        description="Compare the pure-Python and compiled stepping engines."
    )
    ap.add_argument("--repeat", type=int, default=3, help="runs per cell; best is kept")
    ap.add_argument("--threads", type=int, default=3, help="contending processes")
    ap.add_argument("--T", type=int, nargs="+", default=[2, 4], help="tick bounds")
    args = ap.parse_args(argv)

    engines = ["pure"] + (["c"] if HAVE_COMPILED else [])
    if not HAVE_COMPILED:
        print("note: compiled engine not built; timing the pure engine only\n")

    header = f"{'workload':38s} {'states':>7s}" + "".join(
        f" {eng + ' (s)':>10s}" for eng in engines
    )
    if len(engines) == 2:
        header += f" {'speedup':>8s}"
    print(header)
    print("-" * len(header))

    for T in args.T:
        for method in ("ledm", "sedm"):
            model, phi = build_fischer(
                FischerConfig(args.threads, T, method=method)
            )
            jobs = [
                (
                    f"reach  n={args.threads} T={T} {method}",
                    lambda eng, m=model: explore_reachable(m, engine=eng),
                    lambda r: r.state_count,
                ),
                (
                    f"verify n={args.threads} T={T} {method}",
                    lambda eng, m=model, p=phi: verify(m, p, engine=eng),
                    lambda r: r.stats.states,
                ),
            ]
            for label, run, states_of in jobs:
                times = {}
                states = None
                for eng in engines:
                    times[eng], result = best_of(lambda e=eng: run(e), args.repeat)
                    states = states_of(result)
                row = f"{label:38s} {states:>7d}" + "".join(
                    f" {times[eng]:>10.3f}" for eng in engines
                )
                if len(engines) == 2:
                    row += f" {times['pure'] / times['c']:>7.1f}x"
                print(row)


if __name__ == "__main__":
    main()
