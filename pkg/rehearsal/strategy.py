import logging
from typing import Dict, Optional

import numpy as np

import network
from agent import AgentState, NetworkRole
from network import BatchItem, NetworkParams
from .pseudo import (
    PseudoSet,
    RehearsalConfig,
    RehearsalMode,
    batch_rehearse,
    capture_pseudoset,
    fr_rehearse,
    maintain,
)

logger = logging.getLogger(__name__)


class Rehearser:
    """Pseudorehearsal for both agent networks, plugged into agent.learn as its trainer"""

    def __init__(self, config: RehearsalConfig, rng: np.random.Generator):
        self.config = config
        self.rng = rng
        self.pseudosets: Dict[NetworkRole, Optional[PseudoSet]] = {
            NetworkRole.ACTOR: None,
            NetworkRole.CRITIC: None,
        }

    @property
    def mode(self) -> RehearsalMode:
        return self.config.mode

    def capture(self, agent: AgentState):
        """Capture fresh pseudosets from the agent's current networks"""
        if self.mode == RehearsalMode.NONE:
            return
        for role, net in agent.networks().items():
            self.pseudosets[role] = capture_pseudoset(net, self.config, self.rng)

    def end_episode(self, agent: AgentState):
        """Advance the reinitialization schedule after a finished episode"""
        if self.mode == RehearsalMode.NONE:
            return
        for role, net in agent.networks().items():
            pseudoset = self.pseudosets[role]
            if pseudoset is None:
                self.pseudosets[role] = capture_pseudoset(net, self.config, self.rng)
            else:
                self.pseudosets[role] = maintain(pseudoset, net, self.config, self.rng)

    def train(self, role: NetworkRole, net: NetworkParams, input: np.ndarray,
              target: np.ndarray, learning_rate: float) -> NetworkParams:
        if self.mode == RehearsalMode.NONE:
            return network.backprop(net, input, target, learning_rate)

        pseudoset = self.pseudosets[role]
        if pseudoset is None:
            pseudoset = self.pseudosets[role] = capture_pseudoset(net, self.config, self.rng)

        if self.mode == RehearsalMode.BATCH:
            return batch_rehearse(net, BatchItem(np.asarray(input), np.asarray(target)), pseudoset,
                                  learning_rate, self.config.batch_iterations)

        activations = network.forward(net, input)
        errors = network.neuron_errors(net, activations, target)
        return fr_rehearse(net, activations, errors, pseudoset, self.mode, learning_rate)
