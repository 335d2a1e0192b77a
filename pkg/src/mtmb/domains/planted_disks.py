"""Planted-disks domain.

Each situation carries ``K`` disks per hand group in the unit square. A
single-group task asks for a point inside any group-1 disk (dims 0-1 of the
command); its dual-group twin asks for a group-1 point and a group-2 point
(dims 2-3) at least ``delta`` apart. Fitness is ``f_max`` on the disks and
decays linearly with distance over ``lam``; behavior is the grid cell of
side ``h`` holding each active point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .._backend import kernels
from ..archive import BehaviorKey
from ..errors import ConfigError, OracleMismatch, ProbeCapExceeded
from .base import DEFAULT_PROBE_CAP, Mode, TaskDomain, fmt

# probe resolution below which sliver intersections are allowed
GENERAL_POSITION_PROBES = 32
_MAX_REDRAWS = 1000


@dataclass(frozen=True, eq=False)
class DiskTask:
    situation_id: int
    mode: Mode
    centers_g1: np.ndarray
    centers_g2: np.ndarray
    radius: float
    decay: float
    exclusion: float

    def __repr__(self) -> str:
        g1 = ";".join(f"{fmt(x)},{fmt(y)}" for x, y in self.centers_g1)
        g2 = ";".join(f"{fmt(x)},{fmt(y)}" for x, y in self.centers_g2)
        return (f"DiskTask(situation={self.situation_id}, mode={self.mode.value}, "
                f"g1=[{g1}], g2=[{g2}], r={fmt(self.radius)}, lam={fmt(self.decay)}, "
                f"delta={fmt(self.exclusion)})")


@dataclass(frozen=True)
class SimilarityParams:
    """Inter-task similarity: every situation jitters the same shared centers.

    ``dispersion`` is the half-width of the uniform jitter; 0 makes all
    situations identical. Shared centers not given are drawn from the seed.
    """

    dispersion: float = 0.15
    disks_per_task: int = 3
    shared_centers: Optional[tuple[tuple[float, float], ...]] = None
    shared_centers_g2: Optional[tuple[tuple[float, float], ...]] = None

    def __post_init__(self):
        if self.dispersion < 0:
            raise ConfigError(f"dispersion must be >= 0, got {self.dispersion}")
        if self.disks_per_task < 1:
            raise ConfigError(f"disks_per_task must be >= 1, got {self.disks_per_task}")
        for name in ("shared_centers", "shared_centers_g2"):
            given = getattr(self, name)
            if given is not None and len(given) != self.disks_per_task:
                raise ConfigError(f"{name} must list {self.disks_per_task} points")


def n_cells(h: float) -> int:
    return max(1, math.ceil(1.0 / h - 1e-9))


def cell_boxes(h: float) -> np.ndarray:
    """``(ncell, 2)`` array of ``[lo, hi]`` per axis, last cell clipped to 1."""
    n = n_cells(h)
    lo = np.arange(n) * h
    return np.stack([lo, np.minimum(lo + h, 1.0)], axis=1)


def _box_distance(c: float, box: np.ndarray) -> np.ndarray:
    return np.maximum(np.maximum(box[:, 0] - c, c - box[:, 1]), 0.0)


def touched_cells(centers: np.ndarray, r: float, h: float, shrink: float = 0.0) -> set[tuple[int, int]]:
    """Cells whose closed square (shrunk by ``shrink`` per side) meets a disk of radius ``r``."""
    boxes = cell_boxes(h)
    boxes = boxes + np.array([shrink, -shrink])
    out: set[tuple[int, int]] = set()
    for cx, cy in np.asarray(centers).reshape(-1, 2):
        dx = _box_distance(cx, boxes)
        dy = _box_distance(cy, boxes)
        d = np.sqrt(dx[:, None] ** 2 + dy[None, :] ** 2)
        out.update((int(i), int(j)) for i, j in zip(*np.nonzero(d <= r)))
    return out


def in_general_position(centers: np.ndarray, r: float, h: float,
                        probes: int = GENERAL_POSITION_PROBES) -> bool:
    """True when no disk meets a cell only in a sliver a probe lattice could miss.

    With probe spacing ``s = h / probes``, any touched cell must also contain
    an axis-aligned square of side ``s`` inside some disk (which always holds a
    probe), and untouched cells must stay ``s / 2`` away from every disk.
    """
    s = h / probes
    touched = touched_cells(centers, r, h)
    robust = touched_cells(centers, r - s / math.sqrt(2.0), h, shrink=s / 2.0)
    near = touched_cells(centers, r + s / 2.0, h)
    return touched == robust and touched == near


def analytic_cell_count(centers: np.ndarray, r: float, h: float) -> int:
    """Cells of side ``h`` whose closed square intersects some disk."""
    return len(touched_cells(centers, r, h))


class PlantedDisks(TaskDomain):
    name = "planted_disks"

    def __init__(self, tasks: list[DiskTask], h: float, f_max: float = 10.0,
                 description: str = "planted_disks"):
        if not 0.0 < h <= 1.0:
            raise ConfigError(f"cell size h must be in (0, 1], got {h}")
        self.tasks = list(tasks)
        self.h = float(h)
        self.ncell = n_cells(h)
        self.lattice_cells = self.ncell
        self.f_max = float(f_max)
        self.dimension = 4
        self.lower = np.zeros(4)
        self.upper = np.ones(4)
        self._description = description
        self._g = [(np.ascontiguousarray(t.centers_g1, dtype=float).reshape(-1, 2),
                    np.ascontiguousarray(t.centers_g2, dtype=float).reshape(-1, 2))
                   for t in self.tasks]

    def describe(self) -> str:
        return self._description

    def evaluate(self, task: int, command: np.ndarray) -> tuple[BehaviorKey, float]:
        t = self.tasks[task]
        g1, g2 = self._g[task]
        if len(command) != 4:
            raise ValueError(f"planted-disks commands have 4 components, got {len(command)}")
        return kernels.planted_evaluate(command, t.mode is Mode.DUAL, g1, g2, t.radius, t.decay,
                                        t.exclusion, self.h, self.ncell, self.f_max)

    def probe_axis(self, dim: int, probes_per_cell_axis: int) -> np.ndarray:
        xs = kernels.probe_coordinates(self.h, self.ncell, probes_per_cell_axis)
        return np.asarray(xs)[np.asarray(xs) <= 1.0]

    def hit_grid(self, task: int, group: int, probes_per_cell_axis: int) -> np.ndarray:
        t = self.tasks[task]
        return kernels.hit_grid(self._g[task][group], t.radius, t.decay, self.f_max, self.h,
                                self.ncell, probes_per_cell_axis)

    def oracle_count(self, task: int, probes_per_cell_axis: int,
                     cap: int = DEFAULT_PROBE_CAP) -> int:
        """Lattice count, factorized over the two hands.

        Equal to the full product-lattice count: a 4-D probe is a solution
        iff both of its 2-D halves hit their disks and they are ``delta``
        apart. Only the per-hand lattices are evaluated, so they are what
        the cap limits.
        """
        k = probes_per_cell_axis
        if k < 1:
            raise ValueError("probes_per_cell_axis must be >= 1")
        t = self.tasks[task]
        dual = t.mode is Mode.DUAL
        needed = (2 if dual else 1) * (self.ncell * k) ** 2
        if needed > cap:
            raise ProbeCapExceeded(needed, cap)
        hits1 = self.hit_grid(task, 0, k)
        if not dual:
            count = len(kernels.solved_cells(hits1, self.ncell, k))
            if k >= GENERAL_POSITION_PROBES:
                analytic = analytic_cell_count(t.centers_g1, t.radius, self.h)
                if analytic != count:
                    raise OracleMismatch(f"task {task}: lattice count {count} != "
                                         f"closed-form count {analytic} at {k} probes/axis")
            return count
        hits2 = self.hit_grid(task, 1, k)
        return int(kernels.dual_pair_count(hits1, hits2, self.h, self.ncell, k, t.exclusion))


def planted_disks_build(n_situations: int, sim: SimilarityParams, r: float = 0.08,
                        lam: float = 0.2, delta: float = 0.05, h: float = 0.1, seed: int = 0,
                        f_max: float = 10.0,
                        general_position: bool = True) -> PlantedDisks:
    """Sample ``2 * n_situations`` tasks ordered single, dual, single, dual, ...

    With ``general_position`` every disk set is redrawn until no disk meets a
    cell in a sliver thinner than the 32-probe lattice resolves.
    """
    if n_situations < 1:
        raise ConfigError(f"n_situations must be >= 1, got {n_situations}")
    for name, v in (("r", r), ("lam", lam), ("delta", delta), ("f_max", f_max)):
        if not v > 0:
            raise ConfigError(f"{name} must be > 0, got {v}")
    if not 0.0 < h <= 1.0:
        raise ConfigError(f"h must be in (0, 1], got {h}")
    if general_position and r <= h / GENERAL_POSITION_PROBES:
        raise ConfigError("disk radius too small for general-position sampling; "
                          "disable general_position or enlarge r")
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0x5D15C,)))
    K = sim.disks_per_task

    def acceptable(centers: np.ndarray) -> bool:
        return not general_position or in_general_position(centers, r, h)

    def shared(given) -> np.ndarray:
        if given is not None:
            return np.asarray(given, dtype=float).reshape(K, 2)
        for _ in range(_MAX_REDRAWS):
            g = rng.uniform(0.0, 1.0, (K, 2))
            if acceptable(g):
                return g
        raise ConfigError("could not draw shared centers in general position")

    def jitter(gamma: np.ndarray) -> np.ndarray:
        for _ in range(_MAX_REDRAWS):
            c = np.clip(gamma + sim.dispersion * rng.uniform(-1.0, 1.0, (K, 2)), 0.0, 1.0)
            if acceptable(c):
                return c
        raise ConfigError("could not draw situation centers in general position")

    gamma1 = shared(sim.shared_centers)
    gamma2 = shared(sim.shared_centers_g2)
    tasks: list[DiskTask] = []
    empty = np.zeros((0, 2))
    for s in range(n_situations):
        g1 = jitter(gamma1)
        g2 = jitter(gamma2)
        g1.setflags(write=False)
        g2.setflags(write=False)
        tasks.append(DiskTask(s, Mode.SINGLE, g1, empty, r, lam, delta))
        tasks.append(DiskTask(s, Mode.DUAL, g1, g2, r, lam, delta))
    description = (f"planted_disks(n_situations={n_situations}, K={K}, "
                   f"rho={fmt(sim.dispersion)}, r={fmt(r)}, lam={fmt(lam)}, delta={fmt(delta)}, "
                   f"h={fmt(h)}, f_max={fmt(f_max)}, seed={seed}, "
                   f"general_position={general_position})")
    return PlantedDisks(tasks, h, f_max, description)
