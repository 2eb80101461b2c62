from .experiment import RunRecord, run_experiment
from .results_io import read_csv, write_csv, write_tendency_csv
from .run_config import RunConfig, load_run_config, run_config_from_dict
from .stats import (
    ComparisonTable,
    PairComparison,
    StrategySummary,
    TTestResult,
    compare_strategies,
    smoothed_min,
    t_test,
    tendency,
)

__all__ = [
    "ComparisonTable",
    "PairComparison",
    "RunConfig",
    "RunRecord",
    "StrategySummary",
    "TTestResult",
    "compare_strategies",
    "load_run_config",
    "read_csv",
    "run_config_from_dict",
    "run_experiment",
    "smoothed_min",
    "t_test",
    "tendency",
    "write_csv",
    "write_tendency_csv",
]
