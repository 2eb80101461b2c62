"""Command-line interface: run, compare, baseline, tendency.

Exit codes: 0 success, 1 configuration error (including bad flags),
2 file or database error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import config
from database import ResultsDatabase
from environment import free_fall_baseline
from errors import ConfigError, ResultsIOError
from rehearsal import RehearsalMode
from .experiment import RunRecord, run_experiment
from .results_io import read_csv, write_csv, write_rows, write_tendency_csv
from .run_config import RunConfig, load_run_config
from .stats import TENDENCY_WINDOW, ComparisonTable, compare_strategies

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2

MODE_NAMES = [m.value for m in RehearsalMode]


class _Parser(argparse.ArgumentParser):
    """Reports usage errors as ConfigError instead of exiting with status 2"""

    def error(self, message):
        raise ConfigError(f"{message}\n{self.format_usage()}")


def parse_seed_range(text: str) -> List[int]:
    """'1..30' -> [1, ..., 30]; '3,5,9' and '7' also accepted"""
    try:
        if ".." in text:
            start, end = text.split("..", 1)
            seeds = list(range(int(start), int(end) + 1))
        else:
            seeds = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"invalid seed list '{text}', expected e.g. 1..30 or 1,2,3") from None
    if not seeds or any(s < 0 for s in seeds):
        raise ConfigError(f"invalid seed list '{text}'")
    return seeds


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cartpole-rehearsal-lab",
                     description="Actor-critic pseudorehearsal experiments on cart-pole balancing")
    parser.add_argument("--quiet", action="store_true", help="only warnings and errors, no summary")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, many_modes=False):
        p.add_argument("--config", action="append", default=[], help="run-config TOML file")
        p.add_argument("--episodes", type=int)
        p.add_argument("--force", type=float, help="push force in newtons")
        if many_modes:
            p.add_argument("--mode", choices=MODE_NAMES, action="append", default=[],
                           help=f"rehearsal mode, repeatable ({'|'.join(MODE_NAMES)})")
        else:
            p.add_argument("--mode", choices=MODE_NAMES, help="rehearsal mode")
        p.add_argument("--pr", type=int, help="pseudoset size")
        p.add_argument("--reinit", type=int, help="episodes between pseudoset recaptures")
        p.add_argument("--out", help="output CSV path")
        p.add_argument("--db", help="also store run records in this sqlite file")
        p.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)

    run = sub.add_parser("run", help="one run, steps per episode to CSV")
    common(run)
    run.add_argument("--seed", type=int)

    compare = sub.add_parser("compare", help="several strategies over a seed range")
    common(compare, many_modes=True)
    compare.add_argument("--seeds", default=config.SEEDS, help="seed range, e.g. 1..30")
    compare.add_argument("--workers", type=int, default=config.WORKERS)
    compare.add_argument("--window", type=int, default=TENDENCY_WINDOW)

    baseline = sub.add_parser("baseline", help="mean free-fall episode length")
    baseline.add_argument("--config", action="append", default=[])
    baseline.add_argument("--force", type=float)
    baseline.add_argument("--seed", type=int, default=0)
    baseline.add_argument("--episodes", type=int, default=100)
    baseline.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)

    tend = sub.add_parser("tendency", help="tendency and smoothed minimum of a results CSV")
    tend.add_argument("input", help="CSV written by run or compare")
    tend.add_argument("--out", required=True)
    tend.add_argument("--window", type=int, default=TENDENCY_WINDOW)
    tend.add_argument("--two-point", action="store_true",
                      help="literal min(i, i+window) instead of the windowed minimum")
    tend.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)
    return parser


def _base_configs(paths: List[str]) -> List[RunConfig]:
    if not paths:
        return [RunConfig()]
    return [load_run_config(p) for p in paths]


def _print_banner(title: str):
    print("\n" + "=" * 50)
    print(f"  {title}")
    print("=" * 50)


def _print_record(record: RunRecord):
    c = record.config
    _print_banner(f"Run '{c.label}' seed {c.seed}")
    print(f"  Episodes:   {record.steps_per_episode.size}")
    print(f"  Force:      {c.physics.force_magnitude} N")
    print(f"  Mode:       {c.rehearsal.mode.value}")
    print(f"  Mean steps: {record.mean_steps:.2f}")
    print(f"  Variance:   {record.variance:.2f}")
    print(f"  Cap hits:   {record.cap_hits}")
    print(f"  Diverged:   {'yes' if record.diverged else 'no'}")
    print("=" * 50 + "\n")


def _print_table(table: ComparisonTable):
    _print_banner("Strategy comparison")
    print(f"  {'label':<16}{'mean':>10}{'variance':>12}{'x free fall':>13}{'runs':>6}")
    for s in table.summaries:
        print(f"  {s.label:<16}{s.mean:>10.2f}{s.variance:>12.1f}{s.free_fall_ratio:>13.2f}{s.runs:>6}")
    print("-" * 50)
    for p in table.pairs:
        flag = "significant" if p.test.significant_one_tail_05 else "not significant"
        print(f"  {p.label_a} vs {p.label_b}: t = {p.test.t_stat:.3f} (dof {p.test.dof}, {flag}), "
              f"variance ratio {p.variance_ratio:.2f}")
    print("=" * 50 + "\n")


def _store(db_path: Optional[str], records: List[RunRecord]):
    if not db_path:
        return
    db = ResultsDatabase(db_path)
    for record in records:
        run_id = db.save_record(record)
        logger.info("Stored run '%s' seed %d as id %d", record.config.label, record.config.seed, run_id)


def cmd_run(args) -> int:
    if len(args.config) > 1:
        raise ConfigError("run takes at most one --config")
    run_config = _base_configs(args.config)[0].with_overrides(
        seed=args.seed, episodes=args.episodes, force=args.force,
        mode=args.mode, pr=args.pr, reinit=args.reinit,
    )
    record = run_experiment(run_config)
    if args.out:
        write_csv(record, args.out)
    _store(args.db, [record])
    if not args.quiet:
        _print_record(record)
    return EXIT_OK


def cmd_compare(args) -> int:
    bases = _base_configs(args.config)
    if args.mode:
        if len(bases) > 1:
            raise ConfigError("use either several --config files or several --mode values, not both")
        configs = [bases[0].with_overrides(mode=m) for m in args.mode]
    else:
        configs = bases
    configs = [c.with_overrides(episodes=args.episodes, force=args.force, pr=args.pr,
                                reinit=args.reinit) for c in configs]

    records: List[RunRecord] = []
    table = compare_strategies(configs, parse_seed_range(args.seeds), workers=args.workers,
                               window=args.window, on_record=records.append)
    if args.out:
        write_csv(table, args.out)
        _write_tendencies(table, Path(args.out))
    _store(args.db, records)
    if not args.quiet:
        _print_table(table)
    return EXIT_OK


def _write_tendencies(table: ComparisonTable, out: Path):
    """Smoothed series and pairwise difference tendencies next to the comparison CSV"""
    labels = [label for label in table.labels if table.tendencies[label].size]
    if labels:
        write_rows(["episode", *labels], [table.tendencies[label] for label in labels],
                   out.with_name(out.stem + "_tendency.csv"))
    pairs = [p for p in table.pairs if p.difference_tendency.size]
    if pairs:
        write_rows(["episode", *[f"{p.label_a}-{p.label_b}" for p in pairs]],
                   [p.difference_tendency for p in pairs],
                   out.with_name(out.stem + "_difference.csv"))


def cmd_baseline(args) -> int:
    run_config = _base_configs(args.config)[0].with_overrides(force=args.force)
    mean = free_fall_baseline(run_config.physics, args.seed, args.episodes, run_config.step_cap)
    if not args.quiet:
        _print_banner("Free-fall baseline")
        print(f"  Force:      {run_config.physics.force_magnitude} N")
        print(f"  Episodes:   {args.episodes}")
        print(f"  Mean steps: {mean:.2f}")
        print("=" * 50 + "\n")
    return EXIT_OK


def cmd_tendency(args) -> int:
    columns = read_csv(args.input)
    try:
        write_tendency_csv(columns, args.out, args.window, args.two_point)
    except ValueError as e:
        raise ConfigError(f"{args.input}: {e}") from e
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "compare": cmd_compare,
    "baseline": cmd_baseline,
    "tendency": cmd_tendency,
}


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.quiet:
            logging.getLogger().setLevel(logging.WARNING)
        return COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ResultsIOError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_IO
