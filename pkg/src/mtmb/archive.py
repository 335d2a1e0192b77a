"""Multi-task behavior archive.

One map per task from behavior key to the best elite seen in that cell.
Algorithms mutate the archive only through :func:`archive_insert` (and the
runner's evaluation counter); metrics only read it.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

BehaviorKey = tuple[int, ...]

SOLUTION_EPS = 1e-9


class InsertOutcome(enum.Enum):
    ADDED = "added"
    REPLACED = "replaced"
    REJECTED = "rejected"


@dataclass(frozen=True, eq=False)
class Elite:
    command: np.ndarray
    behavior: BehaviorKey
    fitness: float

    def __repr__(self) -> str:
        return (f"Elite(behavior={self.behavior}, fitness={self.fitness!r}, "
                f"command={self.command.tolist()})")


class Archive:
    """Per-task behavior-keyed elite storage.

    Elites of a task are kept in a list (for O(1) uniform sampling) plus a
    key -> slot index. Replacements overwrite the slot in place, so the
    sampling order is a pure function of the insertion history.
    """

    def __init__(self, n_tasks: int):
        if n_tasks < 1:
            raise ValueError(f"archive needs at least one task, got {n_tasks}")
        self.n_tasks = n_tasks
        self._slots: list[dict[BehaviorKey, int]] = [{} for _ in range(n_tasks)]
        self._elites: list[list[Elite]] = [[] for _ in range(n_tasks)]
        # task ids in order of their first stored elite
        self._occupied: list[int] = []
        self._eval_count = 0

    @property
    def eval_count(self) -> int:
        return self._eval_count

    def record_evaluations(self, k: int = 1) -> None:
        if k < 0:
            raise ValueError("evaluation count can only increase")
        self._eval_count += k

    def _check_task(self, task: int) -> None:
        if not 0 <= task < self.n_tasks:
            raise IndexError(f"task {task} out of range [0, {self.n_tasks})")

    def get(self, task: int, behavior: Sequence[int]) -> Optional[Elite]:
        self._check_task(task)
        slot = self._slots[task].get(tuple(behavior))
        return None if slot is None else self._elites[task][slot]

    def elites_of(self, task: int) -> list[Elite]:
        """Elites of ``task`` in ascending behavior-key order."""
        self._check_task(task)
        return sorted(self._elites[task], key=lambda e: e.behavior)

    def task_size(self, task: int) -> int:
        self._check_task(task)
        return len(self._elites[task])

    @property
    def occupied_tasks(self) -> list[int]:
        return list(self._occupied)

    def __len__(self) -> int:
        return sum(len(es) for es in self._elites)

    def __iter__(self) -> Iterator[tuple[int, Elite]]:
        """Yield ``(task, elite)`` sorted by task then behavior key."""
        for t in range(self.n_tasks):
            for e in self.elites_of(t):
                yield t, e


def archive_insert(archive: Archive, task: int, elite: Elite) -> InsertOutcome:
    """Store ``elite`` unless its cell holds one at least as fit.

    Ties keep the incumbent. Does not count an evaluation.
    """
    archive._check_task(task)
    if not math.isfinite(elite.fitness):
        raise ValueError(f"elite fitness must be finite, got {elite.fitness!r}")
    key = elite.behavior
    slots = archive._slots[task]
    slot = slots.get(key)
    if slot is None:
        elites = archive._elites[task]
        if not elites:
            archive._occupied.append(task)
        slots[key] = len(elites)
        elites.append(elite)
        return InsertOutcome.ADDED
    if elite.fitness > archive._elites[task][slot].fitness:
        archive._elites[task][slot] = elite
        return InsertOutcome.REPLACED
    return InsertOutcome.REJECTED


def solutions_of_task(archive: Archive, task: int, f_max: float,
                      eps: float = SOLUTION_EPS) -> list[Elite]:
    if eps < 0:
        raise ValueError("eps must be >= 0")
    threshold = f_max - eps
    return [e for e in archive.elites_of(task) if e.fitness >= threshold]


def solution_counts(archive: Archive, f_max: float, eps: float = SOLUTION_EPS) -> list[int]:
    """Number of solutions per task, indexed by task id."""
    threshold = f_max - eps
    return [sum(1 for e in es if e.fitness >= threshold) for es in archive._elites]


def solved_task_count(archive: Archive, f_max: float, eps: float = SOLUTION_EPS) -> int:
    return sum(1 for m in solution_counts(archive, f_max, eps) if m > 0)


def random_elite_of_random_task(archive: Archive,
                                rng: np.random.Generator) -> Optional[tuple[int, Elite]]:
    """Uniform task among non-empty tasks, then a uniform elite within it.

    Exactly two ``rng.integers`` draws when something is returned, none when
    the archive is empty.
    """
    occupied = archive._occupied
    if not occupied:
        return None
    task = occupied[int(rng.integers(len(occupied)))]
    elites = archive._elites[task]
    return task, elites[int(rng.integers(len(elites)))]


def random_elite_of_task(archive: Archive, task: int,
                         rng: np.random.Generator) -> Optional[Elite]:
    archive._check_task(task)
    elites = archive._elites[task]
    if not elites:
        return None
    return elites[int(rng.integers(len(elites)))]


# -- JSON-lines dump ---------------------------------------------------------

def _fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def dump_lines(archive: Archive) -> Iterable[str]:
    for task, e in archive:
        behavior = ", ".join(str(int(b)) for b in e.behavior)
        command = ", ".join(_fmt_float(v) for v in e.command)
        yield (f'{{"task": {task}, "behavior": [{behavior}], '
               f'"command": [{command}], "fitness": {_fmt_float(e.fitness)}}}')


def dump_archive(archive: Archive, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in dump_lines(archive):
            fh.write(line + "\n")


def load_archive(path: str | Path, n_tasks: Optional[int] = None) -> Archive:
    """Rebuild an archive from a dump.

    ``n_tasks`` defaults to one more than the largest task id in the file.
    """
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                records.append((int(rec["task"]), tuple(int(b) for b in rec["behavior"]),
                                np.array(rec["command"], dtype=float), float(rec["fitness"])))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: malformed archive record") from exc
    if n_tasks is None:
        n_tasks = max((r[0] for r in records), default=0) + 1
    archive = Archive(n_tasks)
    for task, behavior, command, fitness in records:
        if archive.get(task, behavior) is not None:
            raise ValueError(f"{path}: duplicate record for task {task} behavior {behavior}")
        archive_insert(archive, task, Elite(command, behavior, fitness))
    return archive
