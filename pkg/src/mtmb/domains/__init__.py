"""Task domains: the contract, two synthetic families and the solution oracle."""

from .base import DEFAULT_PROBE_CAP, Mode, TaskDomain, lattice_oracle_count
from .planar_arm import PlanarArm, WallTask, planar_arm_build
from .planted_disks import (DiskTask, PlantedDisks, SimilarityParams, analytic_cell_count,
                            in_general_position, planted_disks_build)


def oracle_count_solution_cells(domain: TaskDomain, task: int, probes_per_cell_axis: int,
                                cap: int = DEFAULT_PROBE_CAP) -> int:
    """Number of behavior cells of ``task`` holding a solution on the probe lattice.

    Upper bound on the solutions any algorithm can collect for the task at
    this probe resolution.
    """
    return domain.oracle_count(task, probes_per_cell_axis, cap)


__all__ = [
    "DEFAULT_PROBE_CAP", "DiskTask", "Mode", "PlanarArm", "PlantedDisks", "SimilarityParams",
    "TaskDomain", "WallTask", "analytic_cell_count", "in_general_position",
    "lattice_oracle_count", "oracle_count_solution_cells", "planar_arm_build",
    "planted_disks_build",
]
