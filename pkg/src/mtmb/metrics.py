"""Solved-task fraction, solutions per solved task, and quantile bands."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .archive import SOLUTION_EPS, Archive, solution_counts

METRICS = ("solved_fraction", "solutions_per_solved")
QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


@dataclass(frozen=True)
class Snapshot:
    evaluations: int
    solved_fraction: float
    solutions_per_solved: float
    total_solutions: int
    total_elites: int


def snapshot(archive: Archive, domain, evaluations: int | None = None,
             eps: float = SOLUTION_EPS) -> Snapshot:
    counts = solution_counts(archive, domain.f_max, eps)
    solved = sum(1 for m in counts if m > 0)
    total = sum(counts)
    return Snapshot(
        evaluations=archive.eval_count if evaluations is None else evaluations,
        solved_fraction=solved / archive.n_tasks,
        solutions_per_solved=total / solved if solved else 0.0,
        total_solutions=total,
        total_elites=len(archive),
    )


@dataclass(frozen=True)
class AggregateCurve:
    evaluations: int
    metric: str
    q05: float
    q25: float
    q50: float
    q75: float
    q95: float
    mean: float
    sd: float

    @property
    def quantiles(self) -> tuple[float, float, float, float, float]:
        return (self.q05, self.q25, self.q50, self.q75, self.q95)


def quantiles(values: Sequence[float]) -> list[float]:
    """Inclusive linear interpolation between order statistics (Hyndman-Fan type 7)."""
    xs = sorted(float(v) for v in values)
    if not xs:
        raise ValueError("no values to aggregate")
    out = []
    for p in QUANTILES:
        pos = (len(xs) - 1) * p
        lo = int(np.floor(pos))
        hi = min(lo + 1, len(xs) - 1)
        frac = pos - lo
        out.append(xs[lo] + (xs[hi] - xs[lo]) * frac)
    return out


def aggregate(runs: Sequence[Sequence[Snapshot]], metric: str) -> list[AggregateCurve]:
    """Per-snapshot quantile band of ``metric`` across runs.

    ``sd`` is the sample standard deviation (0 for a single run).
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    if not runs:
        raise ValueError("no runs to aggregate")
    grid = [s.evaluations for s in runs[0]]
    for i, run in enumerate(runs):
        if [s.evaluations for s in run] != grid:
            raise ValueError(f"run {i} has a different snapshot grid")
    curves = []
    for j, evals in enumerate(grid):
        vals = np.array([getattr(run[j], metric) for run in runs], dtype=float)
        q = quantiles(vals)
        sd = float(np.std(vals, ddof=1)) if vals.size > 1 else 0.0
        curves.append(AggregateCurve(evals, metric, *q, mean=float(np.mean(vals)), sd=sd))
    return curves
