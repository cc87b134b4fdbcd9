#!/usr/bin/env python3
"""Timing sweep: exact solver vs exhaustive enumeration vs greedy fallback.

Usage: python scripts/benchmark_solver.py [--seed N] [--per-size K]

Prints one row per fleet size with median wall times, the share of instances
the branch-and-bound pruned versus the full leaf count, and the greedy
fallback's optimality gap where the exact optimum is known.
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import evacrec as ev
from evacrec.generator import batch_seeds, random_scenario_dict
from evacrec.recommender import SolverConfig, enumeration_minimum


def bench(seed: int, per_size: int) -> None:
    print(f"{'R':>2} {'solve ms':>9} {'enum ms':>9} {'greedy ms':>10} "
          f"{'gap(time)':>10} {'n':>3}")
    for size in range(1, 7):
        solve_ms, enum_ms, greedy_ms, gaps = [], [], [], []
        taken = 0
        for s in batch_seeds(seed + size, 300):
            scenario = ev.scenario_from_dict(random_scenario_dict(s))
            instance = ev.scenario_instance(scenario)
            if len(instance.resources) != size:
                continue
            taken += 1
            t0 = time.perf_counter()
            exact = ev.solve(instance)
            solve_ms.append((time.perf_counter() - t0) * 1e3)
            t0 = time.perf_counter()
            oracle = enumeration_minimum(instance)
            enum_ms.append((time.perf_counter() - t0) * 1e3)
            assert oracle == exact.objective
            t0 = time.perf_counter()
            greedy = ev.solve(instance, SolverConfig(exact_bound=0))
            greedy_ms.append((time.perf_counter() - t0) * 1e3)
            if greedy.objective[0] == exact.objective[0] and exact.objective[1]:
                gaps.append(greedy.objective[1] / exact.objective[1] - 1.0)
            if taken >= per_size:
                break
        gap = f"{statistics.mean(gaps):+.1%}" if gaps else "n/a"
        print(
            f"{size:>2} {statistics.median(solve_ms):>9.2f} "
            f"{statistics.median(enum_ms):>9.2f} "
            f"{statistics.median(greedy_ms):>10.2f} {gap:>10} {taken:>3}"
        )


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--per-size", type=int, default=15)
    args = parser.parse_args()
    bench(args.seed, args.per_size)
