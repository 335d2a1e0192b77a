from __future__ import annotations

import enum
import hashlib
import itertools
from abc import ABC, abstractmethod
from typing import Sequence

import numpy as np

from ..archive import SOLUTION_EPS, BehaviorKey
from ..errors import ProbeCapExceeded

DEFAULT_PROBE_CAP = 10**8


class Mode(enum.Enum):
    SINGLE = "single"
    DUAL = "dual"


def fmt(x: float) -> str:
    return format(float(x), ".17g")


class TaskDomain(ABC):
    """A family of tasks sharing one command box and one fitness bound.

    Subclasses fill ``dimension``, ``lower``, ``upper``, ``f_max`` and
    ``tasks`` and implement :meth:`evaluate`. ``evaluate`` must be
    deterministic; fitness lies in ``[0, f_max]``.
    """

    name = "domain"
    dimension: int
    lower: np.ndarray
    upper: np.ndarray
    f_max: float
    tasks: Sequence
    # cells per command axis used by the generic probe lattice
    lattice_cells: int = 8

    @property
    def n_tasks(self) -> int:
        return len(self.tasks)

    @abstractmethod
    def evaluate(self, task: int, command: np.ndarray) -> tuple[BehaviorKey, float]:
        ...

    def mode(self, task: int) -> Mode:
        return self.tasks[task].mode

    def active_dims(self, task: int) -> tuple[int, ...]:
        if self.mode(task) is Mode.SINGLE:
            return (0, 1)
        return tuple(range(self.dimension))

    def describe(self) -> str:
        return self.name

    def task_lines(self) -> list[str]:
        """One canonical text line per task, used for hashing."""
        return [repr(t) for t in self.tasks]

    def fingerprint(self) -> str:
        h = hashlib.sha256(self.describe().encode())
        for line in self.task_lines():
            h.update(b"\n")
            h.update(line.encode())
        return h.hexdigest()

    def in_bounds(self, command: np.ndarray) -> bool:
        return bool(np.all(command >= self.lower) and np.all(command <= self.upper))

    def random_command(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.lower, self.upper)

    def probe_axis(self, dim: int, probes_per_cell_axis: int) -> np.ndarray:
        """Cell-centered probe coordinates along one command axis."""
        n = self.lattice_cells * probes_per_cell_axis
        lo, hi = self.lower[dim], self.upper[dim]
        return lo + (np.arange(n) + 0.5) * (hi - lo) / n

    def oracle_count(self, task: int, probes_per_cell_axis: int,
                     cap: int = DEFAULT_PROBE_CAP) -> int:
        return lattice_oracle_count(self, task, probes_per_cell_axis, cap)


def lattice_oracle_count(domain: TaskDomain, task: int, probes_per_cell_axis: int,
                         cap: int = DEFAULT_PROBE_CAP) -> int:
    """Brute-force probe of the active command dimensions.

    Each active axis is split into ``domain.lattice_cells`` cells with
    ``probes_per_cell_axis`` cell-centered probes each; inactive axes sit at
    the box midpoint. Returns the number of distinct behavior keys reached
    by some probe at fitness ``>= f_max - 1e-9``.
    """
    if probes_per_cell_axis < 1:
        raise ValueError("probes_per_cell_axis must be >= 1")
    active = domain.active_dims(task)
    axes = [domain.probe_axis(d, probes_per_cell_axis) for d in active]
    needed = int(np.prod([a.size for a in axes], dtype=object))
    if needed > cap:
        raise ProbeCapExceeded(needed, cap)
    mid = (domain.lower + domain.upper) / 2.0
    threshold = domain.f_max - SOLUTION_EPS
    found: set[BehaviorKey] = set()
    command = mid.copy()
    for point in itertools.product(*axes):
        command[list(active)] = point
        key, fit = domain.evaluate(task, command)
        if fit >= threshold:
            found.add(key)
    return len(found)
