"""Budgeted evaluation loops: MTMB-MAP-Elites and three baselines.

Every algorithm spends exactly ``B`` evaluations through :class:`Run`, the
single point where the domain is called, the evaluation counter advances
and snapshots are emitted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .archive import (Archive, Elite, InsertOutcome, archive_insert, random_elite_of_random_task,
                      random_elite_of_task)
from .errors import ConfigError
from .metrics import Snapshot, snapshot
from .variation import VariationConfig, vary

SnapshotSink = Callable[[Snapshot], None]

# fixed spawn keys: adding a stream never shifts the others
_STREAMS = {"init": 1, "selection": 2, "variation": 3, "task": 4, "order": 5, "fill": 6}


def stream(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_STREAMS[name],)))


@dataclass(frozen=True)
class BudgetConfig:
    B: int
    init_target_elites: Optional[int] = None
    init_cap: Optional[int] = None
    snapshot_every: int = 500

    def resolve(self, n_tasks: int) -> tuple[int, int]:
        """Return ``(init_target_elites, init_cap)`` with defaults ``n`` and ``B // 2``."""
        target = n_tasks if self.init_target_elites is None else self.init_target_elites
        cap = self.B // 2 if self.init_cap is None else self.init_cap
        if not 0 < target <= cap < self.B:
            raise ConfigError(f"budget needs 0 < init_target_elites ({target}) <= "
                              f"init_cap ({cap}) < B ({self.B})")
        return target, cap

    def __post_init__(self):
        if self.B < 1:
            raise ConfigError(f"B must be >= 1, got {self.B}")
        if self.snapshot_every < 1:
            raise ConfigError(f"snapshot_every must be >= 1, got {self.snapshot_every}")


class Run:
    """Budget accounting around one archive."""

    def __init__(self, domain, budget: BudgetConfig, sink: Optional[SnapshotSink] = None):
        self.domain = domain
        self.budget = budget
        self.archive = Archive(domain.n_tasks)
        self.sink = sink

    @property
    def remaining(self) -> int:
        return self.budget.B - self.archive.eval_count

    def evaluate(self, task: int, command: np.ndarray) -> InsertOutcome:
        if self.remaining <= 0:
            raise RuntimeError("evaluation budget exhausted")
        command = np.array(command, dtype=float)
        command.setflags(write=False)
        behavior, fitness = self.domain.evaluate(task, command)
        outcome = archive_insert(self.archive, task, Elite(command, behavior, fitness))
        self.archive.record_evaluations()
        done = self.archive.eval_count
        if self.sink is not None and (done % self.budget.snapshot_every == 0 or done == self.budget.B):
            self.sink(snapshot(self.archive, self.domain))
        return outcome

    def random_fill(self, rng: np.random.Generator) -> None:
        n = self.domain.n_tasks
        while self.remaining > 0:
            task = int(rng.integers(n))
            self.evaluate(task, self.domain.random_command(rng))


def mtmb_map_elites(domain, budget: BudgetConfig, var_cfg: VariationConfig, seed: int,
                    sink: Optional[SnapshotSink] = None) -> Archive:
    """Shared-archive MAP-Elites over all tasks.

    Random initialization until ``init_target_elites`` elites are stored (or
    ``init_cap`` evaluations spent). Then each step crosses two elites drawn
    from uniformly chosen non-empty tasks, mutates the child and evaluates it
    on a uniformly chosen task.
    """
    n = domain.n_tasks
    target, cap = budget.resolve(n)
    run = Run(domain, budget, sink)
    archive = run.archive
    init_rng = stream(seed, "init")
    sel_rng = stream(seed, "selection")
    var_rng = stream(seed, "variation")
    task_rng = stream(seed, "task")
    while len(archive) < target and archive.eval_count < cap:
        task = int(init_rng.integers(n))
        run.evaluate(task, domain.random_command(init_rng))
    while run.remaining > 0:
        _, p1 = random_elite_of_random_task(archive, sel_rng)
        _, p2 = random_elite_of_random_task(archive, sel_rng)
        child = vary(p1.command, p2.command, domain.lower, domain.upper, var_cfg, var_rng)
        run.evaluate(int(task_rng.integers(n)), child)
    return archive


def random_search(domain, budget: BudgetConfig, seed: int,
                  sink: Optional[SnapshotSink] = None) -> Archive:
    run = Run(domain, budget, sink)
    run.random_fill(stream(seed, "init"))
    return run.archive


def per_task_budget(budget: BudgetConfig, n_tasks: int) -> int:
    p = budget.B // n_tasks
    if p == 0:
        raise ConfigError(f"budget B={budget.B} gives no evaluation per task for n={n_tasks}")
    return p


def balanced_counts(per_task: int, n_dims: int) -> list[int]:
    """Grow per-axis point counts evenly while the grid fits ``per_task`` points."""
    counts = [1] * n_dims
    while True:
        i = counts.index(min(counts))
        if math.prod(counts) // counts[i] * (counts[i] + 1) > per_task:
            return counts
        counts[i] += 1


def grid_points(lower: np.ndarray, upper: np.ndarray, active: tuple[int, ...],
                counts: list[int]) -> list[np.ndarray]:
    """Evenly spaced points including both endpoints; a single point sits at the midpoint."""
    mid = (lower + upper) / 2.0
    axes = []
    for d, m in zip(active, counts):
        if m == 1:
            axes.append(np.array([mid[d]]))
        else:
            axes.append(lower[d] + (upper[d] - lower[d]) * np.arange(m) / (m - 1))
    mesh = np.meshgrid(*axes, indexing="ij")
    points = []
    for coords in zip(*(a.ravel() for a in mesh)):
        c = mid.copy()
        c[list(active)] = coords
        points.append(c)
    return points


def grid_search(domain, budget: BudgetConfig, seed: int,
                sink: Optional[SnapshotSink] = None) -> Archive:
    """The same grid for every task, tasks visited in a seeded random order."""
    n = domain.n_tasks
    per_task = per_task_budget(budget, n)
    run = Run(domain, budget, sink)
    fill = stream(seed, "fill")
    for task in stream(seed, "order").permutation(n):
        task = int(task)
        active = domain.active_dims(task)
        points = grid_points(domain.lower, domain.upper, active,
                             balanced_counts(per_task, len(active)))
        for c in points:
            run.evaluate(task, c)
        for _ in range(per_task - len(points)):
            run.evaluate(task, domain.random_command(fill))
    run.random_fill(fill)
    return run.archive


def taskwise_map_elites(domain, budget: BudgetConfig, var_cfg: VariationConfig, seed: int,
                        sink: Optional[SnapshotSink] = None) -> Archive:
    """Independent MAP-Elites per task with ``B // n`` evaluations each."""
    n = domain.n_tasks
    per_task = per_task_budget(budget, n)
    init_target = max(1, min(10, per_task // 5))
    init_cap = max(1, per_task // 2)
    run = Run(domain, budget, sink)
    archive = run.archive
    init_rng = stream(seed, "init")
    sel_rng = stream(seed, "selection")
    var_rng = stream(seed, "variation")
    for task in stream(seed, "order").permutation(n):
        task = int(task)
        spent = 0
        while archive.task_size(task) < init_target and spent < init_cap:
            run.evaluate(task, domain.random_command(init_rng))
            spent += 1
        while spent < per_task:
            p1 = random_elite_of_task(archive, task, sel_rng)
            p2 = random_elite_of_task(archive, task, sel_rng)
            run.evaluate(task, vary(p1.command, p2.command, domain.lower, domain.upper,
                                    var_cfg, var_rng))
            spent += 1
    run.random_fill(stream(seed, "fill"))
    return archive


ALGORITHMS = ("mtmb", "random", "grid", "taskwise")


def run_algorithm(name: str, domain, budget: BudgetConfig, var_cfg: VariationConfig,
                  seed: int) -> tuple[Archive, list[Snapshot]]:
    snaps: list[Snapshot] = []
    if name == "mtmb":
        archive = mtmb_map_elites(domain, budget, var_cfg, seed, snaps.append)
    elif name == "random":
        archive = random_search(domain, budget, seed, snaps.append)
    elif name == "grid":
        archive = grid_search(domain, budget, seed, snaps.append)
    elif name == "taskwise":
        archive = taskwise_map_elites(domain, budget, var_cfg, seed, snaps.append)
    else:
        raise ConfigError(f"unknown algorithm {name!r}; expected one of {ALGORITHMS}")
    return archive, snaps
