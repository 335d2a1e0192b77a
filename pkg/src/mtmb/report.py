"""Cross-experiment comparison tables and plot-ready curves."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .metrics import METRICS, QUANTILES
from .runner import AGGREGATE_COLUMNS, fmt9

COMPARISON_COLUMNS = ("algorithm", "metric", "evaluations", "median", "mean", "sd", "rank")
CURVE_COLUMNS = ("algorithm", "evaluations", "metric", "quantile", "value")
_QCOLS = ("q05", "q25", "q50", "q75", "q95")


@dataclass
class ExperimentCurves:
    label: str
    # (evaluations, metric) -> row of floats keyed by column name
    rows: dict[tuple[int, str], dict[str, float]]
    grid: list[int]


def load_experiment(path: str | Path) -> ExperimentCurves:
    path = Path(path)
    agg = path / "aggregate.csv"
    if not agg.is_file():
        raise FileNotFoundError(f"missing aggregate file: {agg}")
    label = path.name
    meta = path / "meta.json"
    if meta.is_file():
        label = json.loads(meta.read_text(encoding="utf-8")).get("algorithm", label)
    rows: dict[tuple[int, str], dict[str, float]] = {}
    grid: list[int] = []
    with open(agg, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != AGGREGATE_COLUMNS:
            raise ValueError(f"{agg}: unexpected header {reader.fieldnames}")
        for row in reader:
            evals = int(row["evaluations"])
            if not grid or grid[-1] != evals:
                grid.append(evals)
            rows[(evals, row["metric"])] = {k: float(row[k]) for k in AGGREGATE_COLUMNS[2:]}
    return ExperimentCurves(label, rows, grid)


def _labels(experiments: Sequence[ExperimentCurves], dirs: Sequence[Path]) -> list[str]:
    labels = [e.label for e in experiments]
    return [f"{lab}({d.name})" if labels.count(lab) > 1 else lab for lab, d in zip(labels, dirs)]


@dataclass
class Comparison:
    table: list[dict]
    ordering: dict[str, list[str]]


def compare(experiment_dirs: Sequence[str | Path]) -> Comparison:
    dirs = [Path(d) for d in experiment_dirs]
    if not dirs:
        raise ValueError("no experiment directories given")
    exps = [load_experiment(d) for d in dirs]
    for d, e in zip(dirs[1:], exps[1:]):
        if e.grid != exps[0].grid:
            raise ValueError(f"{d}: snapshot grid differs from {dirs[0]}")
    labels = _labels(exps, dirs)
    final = exps[0].grid[-1]
    table = []
    ordering = {}
    for metric in METRICS:
        stats = [(lab, e.rows[(final, metric)]) for lab, e in zip(labels, exps)]
        ranked = sorted(stats, key=lambda s: (-s[1]["q50"], -s[1]["mean"], s[0]))
        ordering[metric] = [lab for lab, _ in ranked]
        rank = {lab: i + 1 for i, lab in enumerate(ordering[metric])}
        for lab, row in stats:
            table.append({"algorithm": lab, "metric": metric, "evaluations": final,
                          "median": row["q50"], "mean": row["mean"], "sd": row["sd"],
                          "rank": rank[lab]})
    return Comparison(table, ordering)


def comparison_csv_text(comp: Comparison) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COMPARISON_COLUMNS)
    for row in comp.table:
        w.writerow([row["algorithm"], row["metric"], row["evaluations"], fmt9(row["median"]),
                    fmt9(row["mean"]), fmt9(row["sd"]), row["rank"]])
    return buf.getvalue()


def curves_csv_text(experiment_dirs: Sequence[str | Path]) -> str:
    dirs = [Path(d) for d in experiment_dirs]
    exps = [load_experiment(d) for d in dirs]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVE_COLUMNS)
    for lab, e in zip(_labels(exps, dirs), exps):
        for evals in e.grid:
            for metric in METRICS:
                row = e.rows[(evals, metric)]
                for q, col in zip(QUANTILES, _QCOLS):
                    w.writerow([lab, evals, metric, q, fmt9(row[col])])
    return buf.getvalue()


def ordering_lines(comp: Comparison) -> list[str]:
    return [f"{metric}: " + " > ".join(comp.ordering[metric]) for metric in METRICS]


def compare_report(experiment_dirs: Sequence[str | Path], out_dir: str | Path = ".") -> Comparison:
    """Write ``comparison.csv``, ``curves.csv`` and ``ordering.txt`` into ``out_dir``."""
    comp = compare(experiment_dirs)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "comparison.csv").write_text(comparison_csv_text(comp), encoding="utf-8")
    (out / "curves.csv").write_text(curves_csv_text(experiment_dirs), encoding="utf-8")
    (out / "ordering.txt").write_text("\n".join(ordering_lines(comp)) + "\n", encoding="utf-8")
    return comp
