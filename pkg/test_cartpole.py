import math
from dataclasses import replace

import numpy as np
import pytest

from environment import (
    Action,
    CartState,
    PhysicsParams,
    coast,
    coast_until_failure,
    free_fall_baseline,
    reset,
    step,
)
from environment.cartpole import START_RANGE, is_failure
from errors import ConfigError, NonFiniteError

PARAMS = PhysicsParams()


def test_reset_is_deterministic():
    assert reset(42) == reset(42)
    assert reset(42) != reset(43)


def test_reset_starts_at_rest_inside_bounds():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        state = reset(rng)
        assert abs(state.x) <= START_RANGE and abs(state.theta) <= START_RANGE
        assert state.x_dot == state.x_ddot == state.theta_dot == state.theta_ddot == 0.0
        assert not is_failure(state, PARAMS)


def test_reset_means_are_centered():
    rng = np.random.default_rng(12345)
    states = [reset(rng) for _ in range(10_000)]
    sigma = START_RANGE / math.sqrt(3) / math.sqrt(len(states))
    assert abs(np.mean([s.x for s in states])) < 3 * sigma
    assert abs(np.mean([s.theta for s in states])) < 3 * sigma


def test_upright_at_rest_is_an_equilibrium():
    outcome = coast(CartState(), PARAMS)
    assert outcome.next_state == CartState()
    assert not outcome.failed
    assert outcome.reward == 0.0


@pytest.mark.parametrize("theta", [0.1, -0.1, 0.01, -0.003, 0.3])
def test_tilted_pole_falls_away_from_upright(theta):
    outcome = coast(CartState(theta=theta), PARAMS)
    assert np.sign(outcome.next_state.theta_ddot) == np.sign(theta)


def test_push_direction():
    right = step(CartState(), Action.PUSH_RIGHT, PARAMS).next_state
    left = step(CartState(), Action.PUSH_LEFT, PARAMS).next_state
    assert right.x_ddot > 0 > left.x_ddot
    # pushing the cart right tips the pole left
    assert right.theta_ddot < 0 < left.theta_ddot


def test_leaving_the_track_fails_with_negative_reward():
    state = CartState(x=2.39, x_dot=5.0)
    outcome = step(state, Action.PUSH_RIGHT, PARAMS)
    assert outcome.next_state.x > PARAMS.track_half_width
    assert outcome.failed
    assert outcome.reward == -1.0


def test_reward_is_zero_until_the_first_failing_step():
    state = CartState()
    rewards = []
    for _ in range(10_000):
        outcome = step(state, Action.PUSH_RIGHT, PARAMS)
        rewards.append(outcome.reward)
        if outcome.failed:
            break
        state = outcome.next_state
    assert outcome.failed
    assert rewards[-1] == -1.0
    assert all(r == 0.0 for r in rewards[:-1])


def test_non_finite_state_is_rejected():
    with pytest.raises(NonFiniteError):
        step(CartState(theta=float("nan")), Action.PUSH_LEFT, PARAMS)


def test_invalid_physics_rejected():
    with pytest.raises(ConfigError):
        PhysicsParams(cart_mass=-1.0)
    with pytest.raises(ConfigError):
        PhysicsParams(fail_angle=2.0)


def _coast_for(state, params, duration):
    for _ in range(int(round(duration / params.timestep))):
        state = coast(state, params).next_state
    return np.array([state.x, state.x_dot, state.theta, state.theta_dot])


def test_euler_error_halves_with_timestep():
    rng = np.random.default_rng(7)
    coarse = PARAMS
    fine = replace(PARAMS, timestep=PARAMS.timestep / 2)
    reference = replace(PARAMS, timestep=PARAMS.timestep / 20)
    for _ in range(50):
        x, x_dot, theta, theta_dot = rng.uniform(-0.05, 0.05, size=4)
        start = CartState(x=x, x_dot=x_dot, theta=theta, theta_dot=theta_dot)
        exact = _coast_for(start, reference, 0.5)
        coarse_error = np.sum(np.abs(_coast_for(start, coarse, 0.5) - exact))
        fine_error = np.sum(np.abs(_coast_for(start, fine, 0.5) - exact))
        assert 1.7 <= coarse_error / fine_error <= 2.3


def test_step_is_pure():
    state = CartState(x=0.1, x_dot=-0.2, theta=0.03, theta_dot=0.1)
    assert step(state, Action.PUSH_LEFT, PARAMS) == step(state, Action.PUSH_LEFT, PARAMS)


def test_upright_pole_never_falls_without_control():
    assert coast_until_failure(CartState(), PARAMS, 2000) == 2000


def test_tilted_pole_falls_without_control():
    steps = coast_until_failure(CartState(theta=0.05), PARAMS, 100_000)
    assert 1 < steps < 100_000


def test_free_fall_baseline_is_reproducible():
    a = free_fall_baseline(PARAMS, seed=3, episodes=20)
    b = free_fall_baseline(PARAMS, seed=3, episodes=20)
    assert a == b
    assert a > 1


def test_free_fall_baseline_needs_episodes():
    with pytest.raises(ConfigError):
        free_fall_baseline(PARAMS, seed=0, episodes=0)
