import logging
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

import config
from agent import AgentState, create_agent, run_episode
from errors import NonFiniteError
from rehearsal import Rehearser
from .run_config import RunConfig

logger = logging.getLogger(__name__)


@dataclass
class RunRecord:
    config: RunConfig
    steps_per_episode: np.ndarray
    diverged: bool = False
    wall_time: float = 0.0
    final_actor: Optional[np.ndarray] = field(default=None, repr=False)
    final_critic: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def cap_hits(self) -> int:
        return int(np.sum(self.steps_per_episode >= self.config.step_cap))

    @property
    def mean_steps(self) -> float:
        return float(np.mean(self.steps_per_episode)) if self.steps_per_episode.size else 0.0

    @property
    def variance(self) -> float:
        if self.steps_per_episode.size < 2:
            return 0.0
        return float(np.var(self.steps_per_episode, ddof=1))


def has_diverged(agent: AgentState) -> bool:
    for net in (agent.actor, agent.critic):
        if not net.is_finite() or net.max_abs_weight() > config.DIVERGENCE_THRESHOLD:
            return True
    return False


def _weights_finite(agent: AgentState) -> bool:
    return agent.actor.is_finite() and agent.critic.is_finite()


def run_experiment(run_config: RunConfig, trainer_enabled: bool = True) -> RunRecord:
    """Train one agent for run_config.episodes episodes and record the step counts.

    Weights beyond config.DIVERGENCE_THRESHOLD set the diverged flag and the
    run goes on. Only non-finite weights end it early; the step vector then
    stops at the last completed episode.

    With trainer_enabled=False the agent learns with no rehearsal object at
    all; for mode none the result is the same bit for bit.
    """
    started = time.perf_counter()
    agent_seed, env_seq, pseudo_seq = np.random.SeedSequence(run_config.seed).spawn(3)
    agent = create_agent(run_config.hidden_width, run_config.hyper,
                         int(agent_seed.generate_state(1)[0]))
    env_rng = np.random.default_rng(env_seq)

    rehearser = None
    if trainer_enabled:
        rehearser = Rehearser(run_config.rehearsal, np.random.default_rng(pseudo_seq))
        rehearser.capture(agent)

    logger.info("Run '%s' seed %d: %d episodes, force %.2f N, mode %s",
                run_config.label, run_config.seed, run_config.episodes,
                run_config.physics.force_magnitude, run_config.rehearsal.mode.value)

    steps = []
    diverged = False
    for episode in range(1, run_config.episodes + 1):
        try:
            survived, agent = run_episode(agent, run_config.physics, run_config.step_cap,
                                          rehearser, env_rng=env_rng)
        except NonFiniteError as e:
            logger.warning("Run '%s' seed %d stopped in episode %d: %s",
                           run_config.label, run_config.seed, episode, e)
            diverged = True
            break

        steps.append(survived)
        if not _weights_finite(agent):
            logger.warning("Run '%s' seed %d stopped after episode %d: non-finite weights",
                           run_config.label, run_config.seed, episode)
            diverged = True
            break
        if not diverged and has_diverged(agent):
            logger.warning("Run '%s' seed %d diverged after episode %d",
                           run_config.label, run_config.seed, episode)
            diverged = True

        if rehearser is not None:
            rehearser.end_episode(agent)
        if episode % config.PROGRESS_EVERY == 0:
            recent = steps[-config.PROGRESS_EVERY:]
            logger.debug("Run '%s' seed %d episode %d: mean of last %d = %.1f",
                         run_config.label, run_config.seed, episode, len(recent), np.mean(recent))

    record = RunRecord(
        config=run_config,
        steps_per_episode=np.asarray(steps, dtype=np.int64),
        diverged=diverged,
        wall_time=time.perf_counter() - started,
        final_actor=agent.actor.to_flat(),
        final_critic=agent.critic.to_flat(),
    )
    logger.info("Run '%s' seed %d finished: mean %.2f steps, %d cap hits, %.1fs",
                run_config.label, run_config.seed, record.mean_steps, record.cap_hits,
                record.wall_time)
    return record
