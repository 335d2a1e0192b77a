"""Replicated experiments and their result files.

Output directory layout::

    run_<r>.csv       replication,evaluations,solved_fraction,solutions_per_solved,total_solutions,total_elites
    archive_<r>.jsonl final archive of replication r
    aggregate.csv     evaluations,metric,q05,q25,q50,q75,q95,mean,sd
    meta.json         config and domain hashes, artifact version

All replications share the tasks built from ``base_seed``; replication ``r``
searches with seed ``base_seed + r``. Files are byte-identical whatever the
worker count.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .algorithms import run_algorithm
from .archive import dump_lines
from .config import ExperimentConfig
from .domains.base import TaskDomain
from .metrics import METRICS, Snapshot, aggregate

log = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "MTMB_OUTPUT_DIR"
RUN_COLUMNS = ("replication", "evaluations", "solved_fraction", "solutions_per_solved",
               "total_solutions", "total_elites")
AGGREGATE_COLUMNS = ("evaluations", "metric", "q05", "q25", "q50", "q75", "q95", "mean", "sd")


def fmt9(x: float) -> str:
    return format(float(x), ".9g")


@dataclass
class ReplicationResult:
    replication: int
    seed: int
    snapshots: list[Snapshot]
    archive_lines: list[str]


def run_csv_text(replication: int, snapshots: Sequence[Snapshot]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RUN_COLUMNS)
    for s in snapshots:
        w.writerow([replication, s.evaluations, fmt9(s.solved_fraction),
                    fmt9(s.solutions_per_solved), s.total_solutions, s.total_elites])
    return buf.getvalue()


def read_run_csv(path: str | Path) -> list[Snapshot]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != RUN_COLUMNS:
            raise ValueError(f"{path}: unexpected run CSV header {reader.fieldnames}")
        return [Snapshot(int(row["evaluations"]), float(row["solved_fraction"]),
                         float(row["solutions_per_solved"]), int(row["total_solutions"]),
                         int(row["total_elites"])) for row in reader]


def aggregate_csv_text(runs: Sequence[Sequence[Snapshot]]) -> str:
    curves = {m: aggregate(runs, m) for m in METRICS}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(AGGREGATE_COLUMNS)
    for j in range(len(runs[0])):
        for m in METRICS:
            c = curves[m][j]
            w.writerow([c.evaluations, m, *(fmt9(v) for v in (*c.quantiles, c.mean, c.sd))])
    return buf.getvalue()


def aggregate_from_run_files(paths: Sequence[str | Path]) -> str:
    """Aggregate CSV text recomputed from per-run CSVs only."""
    return aggregate_csv_text([read_run_csv(p) for p in paths])


def run_replication(cfg: ExperimentConfig, domain: TaskDomain, replication: int) -> ReplicationResult:
    seed = cfg.base_seed + replication
    archive, snaps = run_algorithm(cfg.algorithm, domain, cfg.budget, cfg.variation, seed)
    return ReplicationResult(replication, seed, snaps, list(dump_lines(archive)))


def _run_one(args):
    cfg, domain, r = args
    return run_replication(cfg, domain, r)


def resolve_output_dir(cfg: ExperimentConfig, output_dir: Optional[str | Path]) -> Path:
    if output_dir:
        return Path(output_dir)
    if cfg.output_dir:
        return Path(cfg.output_dir)
    return Path(os.environ.get(OUTPUT_DIR_ENV) or "results")


def meta_dict(cfg: ExperimentConfig, domain: TaskDomain) -> dict:
    return {
        "artifact_version": __version__,
        "algorithm": cfg.algorithm,
        "config": cfg.canonical_text().splitlines(),
        "config_sha256": cfg.digest(),
        "overrides": list(cfg.overrides),
        "domain": domain.describe(),
        "domain_sha256": domain.fingerprint(),
        "n_tasks": domain.n_tasks,
        "budget": cfg.budget.B,
        "replications": cfg.replications,
        "seeds": [cfg.base_seed + r for r in range(cfg.replications)],
        "snapshot_every": cfg.snapshot_every,
    }


@dataclass
class ExperimentResult:
    output_dir: Path
    domain: TaskDomain
    replications: list[ReplicationResult]


def run_experiment(cfg: ExperimentConfig, output_dir: Optional[str | Path] = None,
                   workers: Optional[int] = None) -> ExperimentResult:
    out = resolve_output_dir(cfg, output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror}") from None
    if not os.access(out, os.W_OK):
        raise OSError(f"output directory {out} is not writable")
    domain = cfg.build_domain()
    workers = cfg.workers if workers is None else workers
    jobs = [(cfg, domain, r) for r in range(cfg.replications)]
    log.info("running %s x%d on %s with %d worker(s)", cfg.algorithm, cfg.replications,
             domain.describe(), workers)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]

    run_paths = []
    for res in results:
        path = out / f"run_{res.replication}.csv"
        path.write_text(run_csv_text(res.replication, res.snapshots), encoding="utf-8")
        run_paths.append(path)
        with open(out / f"archive_{res.replication}.jsonl", "w", encoding="utf-8", newline="\n") as fh:
            fh.writelines(line + "\n" for line in res.archive_lines)
    (out / "aggregate.csv").write_text(aggregate_from_run_files(run_paths), encoding="utf-8")
    (out / "meta.json").write_text(json.dumps(meta_dict(cfg, domain), indent=2, sort_keys=True) + "\n",
                                   encoding="utf-8")
    return ExperimentResult(out, domain, results)
