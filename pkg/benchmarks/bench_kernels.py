"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Times a single-task and a dual-task evaluation, a 32-probe hit grid and a
dual oracle count, then one full MTMB run through each backend.
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from mtmb import _backend
from mtmb.algorithms import BudgetConfig, mtmb_map_elites
from mtmb.domains import SimilarityParams, planted_disks, planted_disks_build
from mtmb.variation import VariationConfig


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(k):
    dom = planted_disks_build(50, SimilarityParams(0.15, 3), seed=0)
    t = dom.tasks[1]
    cs = np.random.default_rng(0).uniform(0, 1, (20_000, 4))
    args = (t.centers_g1, t.centers_g2, t.radius, t.decay, t.exclusion, 0.1, 10, 10.0)

    def eval_single():
        for c in cs:
            k.planted_evaluate(c, False, *args)

    def eval_dual():
        for c in cs:
            k.planted_evaluate(c, True, *args)

    def grid():
        k.hit_grid(t.centers_g1, t.radius, t.decay, 10.0, 0.1, 10, 32)

    h1 = k.hit_grid(t.centers_g1, t.radius, t.decay, 10.0, 0.1, 10, 32)
    h2 = k.hit_grid(t.centers_g2, t.radius, t.decay, 10.0, 0.1, 10, 32)

    def pairs():
        k.dual_pair_count(h1, h2, 0.1, 10, 32, t.exclusion)

    def full_run():
        planted_disks.kernels = k
        mtmb_map_elites(dom, BudgetConfig(12_500, init_target_elites=100), VariationConfig(), 0)

    return {"evaluate single x20000": eval_single, "evaluate dual x20000": eval_dual,
            "hit_grid 320x320": grid, "dual_pair_count k=32": pairs,
            "mtmb run B=12500 n=100": full_run}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    names = ["python"]
    try:
        _backend.get_kernels("compiled")
        names.append("compiled")
    except ImportError:
        print("compiled kernels not built; timing the Python backend only")
    original = planted_disks.kernels
    results = {}
    try:
        for name in names:
            for label, fn in cases(_backend.get_kernels(name)).items():
                results[(label, name)] = best_of(fn, args.repeat)
    finally:
        planted_disks.kernels = original
    labels = list(dict.fromkeys(label for label, _ in results))
    print(f"{'case':<26}" + "".join(f"{n:>12}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label in labels:
        row = [results[(label, n)] for n in names]
        line = f"{label:<26}" + "".join(f"{v * 1e3:>10.1f}ms" for v in row)
        if len(row) > 1:
            line += f"{row[0] / row[1]:>11.1f}x"
        print(line)
    if len(names) > 1:
        ratios = [results[(lab, 'python')] / results[(lab, 'compiled')] for lab in labels]
        print(f"median speedup {statistics.median(ratios):.1f}x")


if __name__ == "__main__":
    main()
