from .run_scheduler import ExperimentScheduler

__all__ = ["ExperimentScheduler"]
