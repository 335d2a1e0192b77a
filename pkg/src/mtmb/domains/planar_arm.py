"""Two-link planar arms reaching for a vertical wall.

Command components are joint angles mapped from ``[0, 1]`` to ``[-pi, pi]``
(arm 1: dims 0-1, arm 2: dims 2-3, both shoulders at the origin). A tip is
in contact when it lies within ``h / 2`` of the wall line; behavior is the
cell of side ``h`` holding the tip ordinate over ``[-L1 - L2, L1 + L2]``,
or ``-1`` without contact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..archive import BehaviorKey
from ..errors import ConfigError
from .base import Mode, TaskDomain, fmt


@dataclass(frozen=True)
class WallTask:
    situation_id: int
    mode: Mode
    wall_x: float
    segment: tuple[float, float]

    def __repr__(self) -> str:
        return (f"WallTask(situation={self.situation_id}, mode={self.mode.value}, "
                f"wall_x={fmt(self.wall_x)}, segment=({fmt(self.segment[0])}, "
                f"{fmt(self.segment[1])}))")


def angles(c0: float, c1: float) -> tuple[float, float]:
    return math.pi * (2.0 * c0 - 1.0), math.pi * (2.0 * c1 - 1.0)


def to_command(theta: float) -> float:
    return (theta / math.pi + 1.0) / 2.0


def tip(l1: float, l2: float, t1: float, t2: float) -> tuple[float, float]:
    return (l1 * math.cos(t1) + l2 * math.cos(t1 + t2),
            l1 * math.sin(t1) + l2 * math.sin(t1 + t2))


class PlanarArm(TaskDomain):
    name = "planar_arm"

    def __init__(self, tasks: list[WallTask], link_lengths: tuple[float, float], h: float,
                 delta: float = 0.05, f_max: float = 10.0, lattice_cells: int = 8,
                 description: str = "planar_arm"):
        self.tasks = list(tasks)
        self.l1, self.l2 = (float(v) for v in link_lengths)
        self.reach = self.l1 + self.l2
        self.h = float(h)
        self.ncell = max(1, math.ceil(2.0 * self.reach / self.h - 1e-9))
        self.delta = float(delta)
        self.f_max = float(f_max)
        self.lattice_cells = lattice_cells
        self.dimension = 4
        self.lower = np.zeros(4)
        self.upper = np.ones(4)
        self._description = description

    def describe(self) -> str:
        return self._description

    def _cell(self, y: float) -> int:
        i = int(math.floor((y + self.reach) / self.h))
        return min(max(i, 0), self.ncell - 1)

    def _reach(self, t: WallTask, x: float, y: float) -> tuple[bool, bool, float]:
        """(contact, solved, distance from the tip to the admissible segment)."""
        lo, hi = t.segment
        dx = x - t.wall_x
        dy = lo - y if y < lo else (y - hi if y > hi else 0.0)
        contact = abs(dx) <= self.h / 2.0
        return contact, contact and dy == 0.0, math.sqrt(dx * dx + dy * dy)

    def evaluate(self, task: int, command: np.ndarray) -> tuple[BehaviorKey, float]:
        t = self.tasks[task]
        c = [float(v) for v in command]
        if len(c) != 4 or any(not 0.0 <= v <= 1.0 for v in c):
            raise ValueError(f"command {c} outside [0, 1]^4")
        x1, y1 = tip(self.l1, self.l2, *angles(c[0], c[1]))
        contact1, ok1, d1 = self._reach(t, x1, y1)
        if t.mode is Mode.SINGLE:
            key = (self._cell(y1),) if contact1 else (-1,)
            if ok1:
                return key, self.f_max
            return key, self.f_max * max(0.0, 1.0 - d1 / self.l2)
        x2, y2 = tip(self.l1, self.l2, *angles(c[2], c[3]))
        contact2, ok2, d2 = self._reach(t, x2, y2)
        key = (self._cell(y1), self._cell(y2)) if contact1 and contact2 else (-1, -1)
        if math.hypot(x1 - x2, y1 - y2) < self.delta:
            return key, 0.0
        if ok1 and ok2:
            return key, self.f_max
        return key, self.f_max * max(0.0, 1.0 - max(d1, d2) / self.l2)


def planar_arm_build(n_situations: int, link_lengths: tuple[float, float] = (0.5, 0.4),
                     wall_x_range: tuple[float, float] = (0.4, 0.8), h: float = 0.1,
                     seed: int = 0, delta: float = 0.05, f_max: float = 10.0,
                     lattice_cells: int = 8) -> PlanarArm:
    """Per situation: wall abscissa uniform in ``wall_x_range`` and an admissible
    vertical segment drawn inside the reachable chord of the wall."""
    l1, l2 = link_lengths
    if n_situations < 1:
        raise ConfigError(f"n_situations must be >= 1, got {n_situations}")
    if not (l1 > 0 and l2 > 0):
        raise ConfigError(f"link lengths must be > 0, got {link_lengths}")
    lo, hi = wall_x_range
    reach = l1 + l2
    if not 0.0 <= lo <= hi:
        raise ConfigError(f"wall_x_range must satisfy 0 <= lo <= hi, got {wall_x_range}")
    if lo >= reach or hi > reach:
        raise ConfigError(f"wall range {wall_x_range} is not reachable with total link length {reach}")
    if not h > 0 or not delta > 0:
        raise ConfigError("h and delta must be > 0")
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0xA4A,)))
    tasks: list[WallTask] = []
    for s in range(n_situations):
        w = float(rng.uniform(lo, hi))
        chord = math.sqrt(max(0.0, reach * reach - w * w))
        mid = float(rng.uniform(-chord, chord))
        half = chord * float(rng.uniform(0.25, 0.5))
        segment = (max(-chord, mid - half), min(chord, mid + half))
        tasks.append(WallTask(s, Mode.SINGLE, w, segment))
        tasks.append(WallTask(s, Mode.DUAL, w, segment))
    description = (f"planar_arm(n_situations={n_situations}, L1={fmt(l1)}, L2={fmt(l2)}, "
                   f"wall_x=({fmt(lo)}, {fmt(hi)}), h={fmt(h)}, delta={fmt(delta)}, "
                   f"f_max={fmt(f_max)}, seed={seed})")
    return PlanarArm(tasks, (l1, l2), h, delta, f_max, lattice_cells, description)
