from .cartpole import (
    Action,
    CartState,
    PhysicsParams,
    StepOutcome,
    coast,
    coast_until_failure,
    free_fall_baseline,
    reset,
    step,
)
from .encoding import OBSERVATION_WIDTH, ObservationVector, encode

__all__ = [
    "Action",
    "CartState",
    "OBSERVATION_WIDTH",
    "ObservationVector",
    "PhysicsParams",
    "StepOutcome",
    "coast",
    "coast_until_failure",
    "encode",
    "free_fall_baseline",
    "reset",
    "step",
]
