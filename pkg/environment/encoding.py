import math

import numpy as np

from errors import NonFiniteError
from .cartpole import CartState

LINEAR_SCALE = 20.0
ANGULAR_SCALE = 60.0

# (name, scale, in degrees) in slot order
PARAMETERS = (
    ("x", LINEAR_SCALE, False),
    ("x_dot", LINEAR_SCALE, False),
    ("x_ddot", LINEAR_SCALE, False),
    ("theta", ANGULAR_SCALE, True),
    ("theta_dot", ANGULAR_SCALE, True),
    ("theta_ddot", ANGULAR_SCALE, True),
)
OBSERVATION_WIDTH = 2 * len(PARAMETERS)

# 12 non-negative values; parameter i uses slot 2i when >= 0, slot 2i+1 when < 0
ObservationVector = np.ndarray


def encode(state: CartState) -> ObservationVector:
    """Sign-split, normalized observation; angles are converted to degrees first"""
    if not state.is_finite():
        raise NonFiniteError(f"cannot encode non-finite state {state}")

    values = np.zeros(OBSERVATION_WIDTH)
    for i, (name, scale, angular) in enumerate(PARAMETERS):
        value = getattr(state, name)
        if angular:
            value = math.degrees(value)
        slot = 2 * i if value >= 0 else 2 * i + 1
        values[slot] = abs(value) / scale
    return values
