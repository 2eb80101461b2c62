"""Actor-critic learner with softmax action selection and a SARSA critic.

The actor and the critic are two independent networks of the same shape
(observation -> hidden -> one output per action). The critic outputs
action values Q(s, a); the actor outputs action preferences that a
temperature-scaled softmax turns into a policy.
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Protocol, Tuple

import numpy as np

import network
from environment import OBSERVATION_WIDTH, Action, PhysicsParams, encode, reset, step
from errors import ConfigError, NonFiniteError
from network import NetworkParams

logger = logging.getLogger(__name__)

ACTION_COUNT = len(Action)


class NetworkRole(Enum):
    ACTOR = "actor"
    CRITIC = "critic"


class Trainer(Protocol):
    """Replaces the plain backprop step of either network (see rehearsal)"""

    def train(self, role: NetworkRole, net: NetworkParams, input: np.ndarray,
              target: np.ndarray, learning_rate: float) -> NetworkParams:
        ...


@dataclass(frozen=True)
class AgentHyperparams:
    alpha: float = 0.3
    beta: float = 0.06
    gamma: float = 0.99
    tau: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ConfigError(f"agent.alpha must be positive, got {self.alpha}")
        if not self.beta > 0:
            raise ConfigError(f"agent.beta must be positive, got {self.beta}")
        if not 0 < self.gamma <= 1:
            raise ConfigError(f"agent.gamma must be in (0, 1], got {self.gamma}")
        if not self.tau > 0:
            raise ConfigError(f"agent.tau must be positive, got {self.tau}")
        if not self.beta < self.alpha:
            raise ConfigError(
                f"agent.beta ({self.beta}) must be less than agent.alpha ({self.alpha})"
            )


@dataclass(frozen=True)
class AgentState:
    actor: NetworkParams
    critic: NetworkParams
    hyper: AgentHyperparams
    rng: np.random.Generator

    def networks(self):
        return {NetworkRole.ACTOR: self.actor, NetworkRole.CRITIC: self.critic}


@dataclass(frozen=True)
class Transition:
    obs: np.ndarray
    action: int
    reward: float
    next_obs: np.ndarray
    next_action: int
    terminal: bool


def create_agent(hidden_width: int, hyper: AgentHyperparams, seed: int) -> AgentState:
    """Fresh agent; actor init, critic init and action sampling use separate seed streams"""
    actor_seq, critic_seq, policy_seq = np.random.SeedSequence(seed).spawn(3)
    sizes = (OBSERVATION_WIDTH, hidden_width, ACTION_COUNT)
    return AgentState(
        actor=network.init_network(sizes, actor_seq),
        critic=network.init_network(sizes, critic_seq),
        hyper=hyper,
        rng=np.random.default_rng(policy_seq),
    )


def action_probabilities(actor_output, tau: float) -> np.ndarray:
    """Softmax of actor_output / tau"""
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    logits = np.asarray(actor_output, dtype=np.float64) / tau
    if not np.all(np.isfinite(logits)):
        raise NonFiniteError(f"actor output is not finite: {actor_output}")
    exps = np.exp(logits - np.max(logits))
    return exps / np.sum(exps)


def sample_action(probabilities: np.ndarray, rng: np.random.Generator) -> int:
    index = int(np.searchsorted(np.cumsum(probabilities), rng.random(), side="right"))
    return min(index, len(probabilities) - 1)


def select_action(agent: AgentState, obs: np.ndarray) -> int:
    output = network.forward(agent.actor, obs).output
    return sample_action(action_probabilities(output, agent.hyper.tau), agent.rng)


def _successor_value(agent: AgentState, t: Transition) -> float:
    if t.terminal:
        return 0.0
    return float(network.forward(agent.critic, t.next_obs).output[t.next_action])


def td_error(agent: AgentState, t: Transition) -> float:
    """delta = R + gamma * Q(s', a') - Q(s, a), successor term 0 when terminal"""
    q = float(network.forward(agent.critic, t.obs).output[t.action])
    return t.reward + agent.hyper.gamma * _successor_value(agent, t) - q


def _train(trainer: Optional[Trainer], role: NetworkRole, net: NetworkParams,
           input: np.ndarray, target: np.ndarray, learning_rate: float) -> NetworkParams:
    if trainer is None:
        return network.backprop(net, input, target, learning_rate)
    return trainer.train(role, net, input, target, learning_rate)


def learn(agent: AgentState, t: Transition,
          trainer: Optional[Trainer] = None) -> Tuple[AgentState, float]:
    """Critic TD step at alpha, actor step toward (output + delta) at beta.

    Only the taken action's output gets an error; the other output's target
    is its own current value. Returns the delta computed before any update.
    """
    hyper = agent.hyper
    critic_output = network.forward(agent.critic, t.obs).output
    delta = t.reward + hyper.gamma * _successor_value(agent, t) - float(critic_output[t.action])

    critic_target = critic_output.copy()
    critic_target[t.action] += delta
    critic = _train(trainer, NetworkRole.CRITIC, agent.critic, t.obs, critic_target, hyper.alpha)

    actor_target = network.forward(agent.actor, t.obs).output.copy()
    actor_target[t.action] += delta
    actor = _train(trainer, NetworkRole.ACTOR, agent.actor, t.obs, actor_target, hyper.beta)

    return replace(agent, actor=actor, critic=critic), delta


def run_episode(agent: AgentState, physics: PhysicsParams, step_cap: int,
                trainer: Optional[Trainer] = None, *,
                env_rng: np.random.Generator) -> Tuple[int, AgentState]:
    """Online learning until the pole falls, the cart leaves the track, or step_cap.

    The start state is drawn from env_rng, so a seeded generator gives a
    reproducible episode.

    Returns the number of steps survived (the failing step counts).
    """
    if step_cap < 1:
        raise ConfigError(f"step_cap must be at least 1, got {step_cap}")

    state = reset(env_rng)
    obs = encode(state)
    action = select_action(agent, obs)

    for steps in range(1, step_cap + 1):
        outcome = step(state, Action(action), physics)
        next_obs = encode(outcome.next_state)
        if outcome.failed:
            transition = Transition(obs, action, outcome.reward, next_obs, action, True)
            agent, _ = learn(agent, transition, trainer)
            return steps, agent

        next_action = select_action(agent, next_obs)
        transition = Transition(obs, action, outcome.reward, next_obs, next_action, False)
        agent, _ = learn(agent, transition, trainer)
        state, obs, action = outcome.next_state, next_obs, next_action

    return step_cap, agent
