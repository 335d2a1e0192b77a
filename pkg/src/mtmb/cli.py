"""``mtmb`` command line.

Exit codes: 0 success, 1 config/domain/runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections import defaultdict
from typing import Optional, Sequence

from .archive import SOLUTION_EPS, load_archive
from .config import load_config
from .domains import oracle_count_solution_cells
from .errors import ConfigError, OracleMismatch, ProbeCapExceeded
from .report import compare_report, ordering_lines
from .runner import OUTPUT_DIR_ENV, run_experiment


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mtmb", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a replicated experiment")
    run.add_argument("--config", required=True)
    run.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                     help="override a config key, e.g. budget.B=2500 (repeatable)")
    run.add_argument("--workers", type=int, default=None,
                     help="parallel replications (default: experiment.workers)")
    run.add_argument("--output-dir", default=None,
                     help=f"results directory (default: experiment.output_dir, then ${OUTPUT_DIR_ENV}, "
                          "then ./results)")

    orc = sub.add_parser("oracle", help="print per-task oracle solution-cell counts")
    orc.add_argument("--config", required=True)
    orc.add_argument("--probes", type=int, default=None, help="probes per cell axis (default: oracle.probes)")
    orc.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")

    rep = sub.add_parser("report", help="compare finished experiments")
    rep.add_argument("--dirs", nargs="+", required=True)
    rep.add_argument("--out", default=".", help="directory for comparison.csv and curves.csv")

    dump = sub.add_parser("dump-stats", help="per-task elite and solution counts of an archive dump")
    dump.add_argument("--archive", required=True)
    dump.add_argument("--f-max", type=float, default=10.0)
    dump.add_argument("--eps", type=float, default=SOLUTION_EPS)
    return p


def _cmd_run(args) -> int:
    cfg = load_config(args.config, args.overrides)
    if args.workers is not None and args.workers < 1:
        raise ConfigError("--workers must be >= 1")
    result = run_experiment(cfg, args.output_dir, args.workers)
    for rep in result.replications:
        s = rep.snapshots[-1]
        print(f"replication={rep.replication} seed={rep.seed} evaluations={s.evaluations} "
              f"solved_fraction={s.solved_fraction:.6f} "
              f"solutions_per_solved={s.solutions_per_solved:.6f} "
              f"total_solutions={s.total_solutions} total_elites={s.total_elites}")
    print(f"results written to {result.output_dir}")
    return 0


def _cmd_oracle(args) -> int:
    cfg = load_config(args.config, args.overrides)
    probes = cfg.oracle_probes if args.probes is None else args.probes
    domain = cfg.build_domain()
    print("task,mode,oracle_count")
    totals: dict[str, int] = defaultdict(int)
    for t in range(domain.n_tasks):
        count = oracle_count_solution_cells(domain, t, probes, cfg.oracle_cap)
        mode = domain.mode(t).value
        totals[mode] += count
        print(f"{t},{mode},{count}")
    for mode in sorted(totals):
        print(f"total,{mode},{totals[mode]}")
    print(f"total,all,{sum(totals.values())}")
    return 0


def _cmd_report(args) -> int:
    comp = compare_report(args.dirs, args.out)
    for line in ordering_lines(comp):
        print(line)
    return 0


def _cmd_dump_stats(args) -> int:
    archive = load_archive(args.archive)
    threshold = args.f_max - args.eps
    print("task,elites,solutions,best_fitness")
    for t in range(archive.n_tasks):
        elites = archive.elites_of(t)
        if not elites:
            continue
        sols = sum(1 for e in elites if e.fitness >= threshold)
        print(f"{t},{len(elites)},{sols},{max(e.fitness for e in elites):.17g}")
    return 0


_COMMANDS = {"run": _cmd_run, "oracle": _cmd_oracle, "report": _cmd_report,
             "dump-stats": _cmd_dump_stats}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except ProbeCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, OracleMismatch, FileNotFoundError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
