"""Single-pole cart balancing dynamics.

Equations follow the classic frictional cart-pole model with the angular
acceleration oriented so that a tilted pole at rest falls further away from
upright. A positive force pushes the cart to the right (+x).
"""

import logging
import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Union

import numpy as np

from errors import ConfigError, NonFiniteError

logger = logging.getLogger(__name__)

# Half-width of the uniform start ranges for x (m) and theta (rad)
START_RANGE = 0.05

SeedLike = Union[int, np.random.Generator, None]


class Action(IntEnum):
    PUSH_LEFT = 0
    PUSH_RIGHT = 1


@dataclass(frozen=True)
class PhysicsParams:
    gravity: float = 9.81
    cart_mass: float = 1.0
    pole_mass: float = 0.1
    pole_half_length: float = 0.5
    force_magnitude: float = 25.0
    track_half_width: float = 2.4
    fail_angle: float = math.radians(36.0)
    timestep: float = 0.02
    friction_cart: float = 0.0
    friction_pole: float = 0.0

    def __post_init__(self):
        for name in ("gravity", "cart_mass", "pole_mass", "pole_half_length",
                     "force_magnitude", "track_half_width", "timestep"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"physics.{name} must be positive, got {value}")
        if not 0 < self.fail_angle < math.pi / 2:
            raise ConfigError(f"physics.fail_angle must be in (0, pi/2), got {self.fail_angle}")
        for name in ("friction_cart", "friction_pole"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ConfigError(f"physics.{name} must be non-negative, got {value}")


@dataclass(frozen=True)
class CartState:
    x: float = 0.0
    x_dot: float = 0.0
    x_ddot: float = 0.0
    theta: float = 0.0
    theta_dot: float = 0.0
    theta_ddot: float = 0.0

    def as_tuple(self):
        return (self.x, self.x_dot, self.x_ddot, self.theta, self.theta_dot, self.theta_ddot)

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in self.as_tuple())


@dataclass(frozen=True)
class StepOutcome:
    next_state: CartState
    reward: float
    failed: bool


def reset(seed: SeedLike = None) -> CartState:
    """Small random x and theta, everything else at rest.

    Accepts a seed or an existing Generator (which is advanced).
    """
    rng = np.random.default_rng(seed)
    x, theta = rng.uniform(-START_RANGE, START_RANGE, size=2)
    return CartState(x=float(x), theta=float(theta))


def accelerations(state: CartState, force: float, params: PhysicsParams):
    """(x_ddot, theta_ddot) for the given state and applied force"""
    total_mass = params.cart_mass + params.pole_mass
    ml = params.pole_mass * params.pole_half_length
    sin_t = math.sin(state.theta)
    cos_t = math.cos(state.theta)

    temp = (
        -force
        - ml * state.theta_dot ** 2 * sin_t
        + params.friction_cart * np.sign(state.x_dot)
    ) / total_mass
    theta_ddot = (
        params.gravity * sin_t
        + cos_t * temp
        - params.friction_pole * state.theta_dot / ml
    ) / (params.pole_half_length * (4.0 / 3.0 - params.pole_mass * cos_t ** 2 / total_mass))
    x_ddot = (
        force
        + ml * (state.theta_dot ** 2 * sin_t - theta_ddot * cos_t)
        - params.friction_cart * np.sign(state.x_dot)
    ) / total_mass
    return float(x_ddot), float(theta_ddot)


def is_failure(state: CartState, params: PhysicsParams) -> bool:
    return abs(state.x) > params.track_half_width or abs(state.theta) > params.fail_angle


def _advance(state: CartState, force: float, params: PhysicsParams) -> StepOutcome:
    if not state.is_finite():
        raise NonFiniteError(f"cart state is not finite: {state}")

    x_ddot, theta_ddot = accelerations(state, force, params)
    dt = params.timestep
    next_state = CartState(
        x=state.x + dt * state.x_dot,
        x_dot=state.x_dot + dt * x_ddot,
        x_ddot=x_ddot,
        theta=state.theta + dt * state.theta_dot,
        theta_dot=state.theta_dot + dt * theta_ddot,
        theta_ddot=theta_ddot,
    )
    failed = is_failure(next_state, params)
    return StepOutcome(next_state, -1.0 if failed else 0.0, failed)


def step(state: CartState, action: Action, params: PhysicsParams) -> StepOutcome:
    """One Euler step with a push of force_magnitude to the left or right"""
    action = Action(action)
    force = params.force_magnitude if action == Action.PUSH_RIGHT else -params.force_magnitude
    return _advance(state, force, params)


def coast(state: CartState, params: PhysicsParams) -> StepOutcome:
    """One Euler step with no force applied (no agent action maps here)"""
    return _advance(state, 0.0, params)


def coast_until_failure(state: CartState, params: PhysicsParams, step_cap: int) -> int:
    """Steps of uncontrolled motion until failure, or step_cap if it never fails"""
    for steps in range(1, step_cap + 1):
        outcome = coast(state, params)
        if outcome.failed:
            return steps
        state = outcome.next_state
    return step_cap


def free_fall_baseline(params: PhysicsParams, seed: SeedLike, episodes: int,
                       step_cap: int = 100_000) -> float:
    """Mean episode length with no control, from seeded start states"""
    if episodes < 1:
        raise ConfigError(f"episodes must be at least 1, got {episodes}")
    rng = np.random.default_rng(seed)
    lengths = [coast_until_failure(reset(rng), params, step_cap) for _ in range(episodes)]
    mean = float(np.mean(lengths))
    logger.debug("Free-fall baseline over %d episodes: %.2f steps", episodes, mean)
    return mean
