"""Tendency curves, smoothed minimums, Student's t-test and strategy comparison."""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import stats

from environment import PhysicsParams, free_fall_baseline
from errors import ConfigError
from scheduler import ExperimentScheduler
from .experiment import RunRecord, run_experiment
from .run_config import RunConfig

logger = logging.getLogger(__name__)

TENDENCY_WINDOW = 100
SIGNIFICANCE_LEVEL = 0.05
# One-tail 0.05 critical value used once dof exceeds LARGE_DOF
LARGE_SAMPLE_CRITICAL = 1.645
LARGE_DOF = 1000


@dataclass(frozen=True)
class TTestResult:
    t_stat: float
    dof: int
    significant_one_tail_05: bool


def _windows(steps, window: int) -> np.ndarray:
    values = np.asarray(steps, dtype=np.float64)
    if window < 1:
        raise ValueError(f"window must be at least 1, got {window}")
    if values.ndim != 1 or values.size <= window:
        raise ValueError(f"need more than {window} values, got {values.size}")
    # row i covers values i..i+window inclusive
    return sliding_window_view(values, window + 1)


def tendency(steps, window: int = TENDENCY_WINDOW) -> np.ndarray:
    """Entry i is the mean of steps[i..i+window]; length len(steps) - window"""
    return _windows(steps, window).mean(axis=1)


def smoothed_min(steps, window: int = TENDENCY_WINDOW, two_point: bool = False) -> np.ndarray:
    """Entry i is the minimum of steps[i..i+window].

    two_point=True gives the literal min(steps[i], steps[i+window]).
    """
    if two_point:
        values = np.asarray(steps, dtype=np.float64)
        _windows(values, window)
        return np.minimum(values[:-window], values[window:])
    return _windows(steps, window).min(axis=1)


def critical_value(dof: int) -> float:
    if dof > LARGE_DOF:
        return LARGE_SAMPLE_CRITICAL
    return float(stats.t.ppf(1.0 - SIGNIFICANCE_LEVEL, dof))


def t_test(sample_a, sample_b) -> TTestResult:
    """Two-sample Student's t-test with pooled variance; significant when t exceeds the one-tail 0.05 value"""
    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise ValueError(f"both samples need at least 2 values, got {a.size} and {b.size}")

    dof = a.size + b.size - 2
    pooled = ((a.size - 1) * np.var(a, ddof=1) + (b.size - 1) * np.var(b, ddof=1)) / dof
    mean_diff = float(np.mean(a) - np.mean(b))
    if pooled == 0.0:
        if mean_diff == 0.0:
            return TTestResult(0.0, dof, False)
        t_stat = float(np.copysign(np.inf, mean_diff))
    else:
        t_stat = float(stats.ttest_ind(a, b, equal_var=True).statistic)
    return TTestResult(t_stat, dof, t_stat > critical_value(dof))


@dataclass
class StrategySummary:
    label: str
    mean: float
    variance: float
    free_fall_mean: float
    runs: int
    diverged_runs: int
    cap_hits: int

    @property
    def free_fall_ratio(self) -> float:
        return self.mean / self.free_fall_mean if self.free_fall_mean else float("nan")


@dataclass
class PairComparison:
    label_a: str
    label_b: str
    test: TTestResult
    variance_ratio: float
    difference_tendency: np.ndarray = field(repr=False)


@dataclass
class ComparisonTable:
    summaries: List[StrategySummary]
    pairs: List[PairComparison]
    # per-episode mean across seeds, by label
    series: Dict[str, np.ndarray]
    tendencies: Dict[str, np.ndarray]
    records: Dict[str, List[RunRecord]] = field(repr=False, default_factory=dict)

    @property
    def labels(self) -> List[str]:
        return [s.label for s in self.summaries]

    def pair(self, label_a: str, label_b: str) -> PairComparison:
        for p in self.pairs:
            if (p.label_a, p.label_b) == (label_a, label_b):
                return p
        raise KeyError((label_a, label_b))

    def summary(self, label: str) -> StrategySummary:
        for s in self.summaries:
            if s.label == label:
                return s
        raise KeyError(label)


def mean_series(records: Sequence[RunRecord]) -> np.ndarray:
    """Per-episode mean across runs; episodes past a diverged run's end use the remaining runs"""
    length = max(r.steps_per_episode.size for r in records)
    padded = np.full((len(records), length), np.nan)
    for i, r in enumerate(records):
        padded[i, :r.steps_per_episode.size] = r.steps_per_episode
    return np.nanmean(padded, axis=0)


def _safe_tendency(values: np.ndarray, window: int) -> np.ndarray:
    if values.size <= window:
        return np.empty(0)
    return tendency(values, window)


def _unique_labels(configs: Sequence[RunConfig]) -> List[str]:
    labels = []
    for i, c in enumerate(configs):
        label = c.label
        if label in labels:
            label = f"{label}-{i + 1}"
        labels.append(label)
    return labels


def summarize(labels: Sequence[str], configs: Sequence[RunConfig],
              records: Dict[str, List[RunRecord]], window: int = TENDENCY_WINDOW) -> ComparisonTable:
    """Aggregate already finished runs into a comparison table"""
    baselines: Dict[PhysicsParams, float] = {}
    summaries, series, tendencies, pooled = [], {}, {}, {}

    for label, run_config in zip(labels, configs):
        runs = records[label]
        all_steps = np.concatenate([r.steps_per_episode for r in runs])
        pooled[label] = all_steps
        series[label] = mean_series(runs)
        tendencies[label] = _safe_tendency(series[label], window)

        physics = run_config.physics
        if physics not in baselines:
            baselines[physics] = free_fall_baseline(physics, run_config.seed, len(runs),
                                                    run_config.step_cap)
        summaries.append(StrategySummary(
            label=label,
            mean=float(np.mean(all_steps)) if all_steps.size else float("nan"),
            variance=float(np.var(all_steps, ddof=1)) if all_steps.size > 1 else 0.0,
            free_fall_mean=baselines[physics],
            runs=len(runs),
            diverged_runs=sum(r.diverged for r in runs),
            cap_hits=sum(r.cap_hits for r in runs),
        ))

    pairs = []
    for a, b in itertools.combinations(labels, 2):
        short = [label for label in (a, b) if pooled[label].size < 2]
        if short:
            logger.warning("Skipping t-test %s vs %s: fewer than 2 recorded episodes for %s",
                           a, b, ", ".join(short))
            continue
        length = min(series[a].size, series[b].size)
        difference = series[a][:length] - series[b][:length]
        var_a = float(np.var(pooled[a], ddof=1))
        var_b = float(np.var(pooled[b], ddof=1))
        pairs.append(PairComparison(
            label_a=a,
            label_b=b,
            test=t_test(pooled[a], pooled[b]),
            variance_ratio=var_a / var_b if var_b else float("nan"),
            difference_tendency=_safe_tendency(difference, window),
        ))

    return ComparisonTable(summaries, pairs, series, tendencies, records)


def compare_strategies(configs: Sequence[RunConfig], seeds: Sequence[int], workers: int = 1,
                       window: int = TENDENCY_WINDOW, on_record=None) -> ComparisonTable:
    """Run every (config, seed) pair and compare the strategies.

    t-tests use the raw per-episode steps of all seeds concatenated.
    on_record, if given, is called with every finished RunRecord.
    """
    if len(configs) < 2:
        raise ConfigError(f"compare needs at least 2 configs, got {len(configs)}")
    if len(seeds) < 2:
        raise ConfigError(f"compare needs at least 2 seeds, got {len(seeds)}")

    labels = _unique_labels(configs)
    jobs: List[Tuple[str, RunConfig]] = [
        (label, c.with_overrides(seed=seed, label=label))
        for label, c in zip(labels, configs)
        for seed in seeds
    ]
    results = ExperimentScheduler(workers).run_all(run_experiment, [job for _, job in jobs])

    records: Dict[str, List[RunRecord]] = {label: [] for label in labels}
    for (label, _), record in zip(jobs, results):
        records[label].append(record)
        if on_record is not None:
            on_record(record)

    table = summarize(labels, configs, records, window)
    for s in table.summaries:
        logger.info("Strategy '%s': mean %.2f, variance %.1f over %d runs",
                    s.label, s.mean, s.variance, s.runs)
    return table
