"""Pseudoitems and the two ways of training with them.

A pseudoitem is a random 0/1 input together with the network's response to
it at capture time. Training either corrects each weight update so it is
orthogonal to the pseudo-inputs of the layer (weight-correction rehearsal)
or co-trains on the pseudoitems with batch backpropagation.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np

import network
from errors import ConfigError, DimensionError
from network import BatchItem, LayerActivations, NetworkParams
from network.mlp import with_bias

logger = logging.getLogger(__name__)

# Relative size below which a Gram determinant counts as zero
COLLINEAR_TOLERANCE = 1e-9


class RehearsalMode(Enum):
    NONE = "none"
    FR_OUTPUT = "fr-output"
    FR_ALL = "fr-all"
    BATCH = "batch"

    @classmethod
    def parse(cls, name: str) -> "RehearsalMode":
        try:
            return cls(name)
        except ValueError:
            modes = ", ".join(m.value for m in cls)
            raise ConfigError(f"unknown rehearsal mode '{name}', expected one of: {modes}") from None

    @property
    def uses_correction(self) -> bool:
        return self in (RehearsalMode.FR_OUTPUT, RehearsalMode.FR_ALL)


@dataclass(frozen=True)
class RehearsalConfig:
    mode: RehearsalMode = RehearsalMode.NONE
    pr: int = 30
    reinit_period: int = 10
    batch_iterations: int = 200

    def __post_init__(self):
        if not isinstance(self.mode, RehearsalMode):
            object.__setattr__(self, "mode", RehearsalMode.parse(self.mode))
        if self.mode != RehearsalMode.NONE and self.pr < 1:
            raise ConfigError(f"rehearsal.pr must be at least 1, got {self.pr}")
        if self.reinit_period < 1:
            raise ConfigError(f"rehearsal.reinit_period must be at least 1, got {self.reinit_period}")
        if self.mode == RehearsalMode.BATCH and self.batch_iterations < 1:
            raise ConfigError(
                f"rehearsal.batch_iterations must be at least 1, got {self.batch_iterations}"
            )


@dataclass(frozen=True)
class Pseudoitem:
    input: np.ndarray
    target_output: np.ndarray
    layer_activations: Optional[LayerActivations] = None


@dataclass(frozen=True)
class PseudoSet:
    items: List[Pseudoitem]
    reinit_period: int
    episodes_since_reinit: int = 0
    layer_sizes: tuple = field(default=())

    @property
    def size(self) -> int:
        return len(self.items)

    def layer_inputs(self, layer_index: int) -> np.ndarray:
        """Stored activations feeding weight layer layer_index, one row per item"""
        if layer_index == 0:
            return np.stack([item.input for item in self.items])
        if any(item.layer_activations is None for item in self.items):
            raise ValueError("pseudoset was captured without layer activations")
        return np.stack([item.layer_activations.per_layer[layer_index] for item in self.items])


def generate_pseudoinput(width: int, rng: np.random.Generator) -> np.ndarray:
    """Each entry independently 0 or 1 with probability 1/2"""
    if width < 1:
        raise ValueError(f"width must be at least 1, got {width}")
    return rng.integers(0, 2, size=width).astype(np.float64)


def capture_pseudoset(net: NetworkParams, config: RehearsalConfig,
                      rng: np.random.Generator) -> PseudoSet:
    if config.pr < 1:
        raise ConfigError(f"rehearsal.pr must be at least 1, got {config.pr}")
    keep_layers = config.mode == RehearsalMode.FR_ALL
    items = []
    for _ in range(config.pr):
        pseudo_input = generate_pseudoinput(net.input_width, rng)
        activations = network.forward(net, pseudo_input)
        items.append(Pseudoitem(
            input=pseudo_input,
            target_output=activations.output.copy(),
            layer_activations=activations if keep_layers else None,
        ))
    return PseudoSet(items, config.reinit_period, 0, net.layer_sizes)


def orthogonal_direction(b: np.ndarray, pseudo_inputs: np.ndarray) -> np.ndarray:
    """Averaged update direction for a neuron with input b, orthogonal to each pseudo-input.

    Each term is (b (x.x) - x (x.b)) / ((b.b)(x.x) - (b.x)^2). Terms with a
    vanishing Gram determinant are skipped; if every term is skipped the
    plain normalized direction b / (b.b) is returned.
    """
    b = np.asarray(b, dtype=np.float64)
    xs = np.atleast_2d(np.asarray(pseudo_inputs, dtype=np.float64))
    if xs.shape[1] != b.shape[0]:
        raise DimensionError(f"pseudo-inputs have width {xs.shape[1]}, b has width {b.shape[0]}")
    bb = float(b @ b)
    if bb == 0.0:
        raise ValueError("b must be a nonzero vector")

    xx = np.einsum("ij,ij->i", xs, xs)
    xb = xs @ b
    denominators = bb * xx - xb * xb
    retained = np.abs(denominators) >= COLLINEAR_TOLERANCE * bb * xx
    retained &= xx > 0
    if not np.any(retained):
        return b / bb

    terms = (np.outer(xx[retained], b) - xs[retained] * xb[retained, None]) / denominators[retained, None]
    return terms.mean(axis=0)


def orthogonal_delta(b, err_b: float, pseudo_inputs: Sequence[np.ndarray]) -> np.ndarray:
    """Weight delta for one neuron: err_b times the corrected direction"""
    if len(pseudo_inputs) < 1:
        raise ValueError("at least one pseudo-input is required")
    return err_b * orthogonal_direction(b, np.stack([np.asarray(x, dtype=np.float64) for x in pseudo_inputs]))


def _check_topology(net: NetworkParams, pseudoset: PseudoSet):
    if pseudoset.layer_sizes and tuple(pseudoset.layer_sizes) != tuple(net.layer_sizes):
        raise DimensionError(
            f"pseudoset captured for topology {pseudoset.layer_sizes}, network is {net.layer_sizes}"
        )


def fr_rehearse(net: NetworkParams, activations: LayerActivations, errors: Sequence[np.ndarray],
                pseudoset: Optional[PseudoSet], mode: RehearsalMode,
                learning_rate: float) -> NetworkParams:
    """Weight-correction step for one training example.

    fr-output corrects the input->hidden weights against the raw
    pseudo-inputs and trains the output layer with plain backprop. fr-all
    corrects every layer against the pseudoitems' stored activations of that
    layer. Mode none is the plain backprop step.
    """
    if mode == RehearsalMode.NONE:
        return network.descend(net, activations, errors, learning_rate)
    if not mode.uses_correction:
        raise ValueError(f"fr_rehearse does not handle mode {mode.value}")
    if pseudoset is None:
        raise ValueError(f"mode {mode.value} needs a captured pseudoset")
    _check_topology(net, pseudoset)

    corrected_layers = range(len(net.weights)) if mode == RehearsalMode.FR_ALL else (0,)
    updated = net
    for layer_index, err in enumerate(errors):
        b = with_bias(activations.per_layer[layer_index])
        if layer_index in corrected_layers:
            xs = with_bias(pseudoset.layer_inputs(layer_index))
            delta = np.outer(err, orthogonal_direction(b, xs))
        else:
            delta = np.outer(err, b)
        updated = network.apply_delta(updated, layer_index, learning_rate * delta)
    return updated


def batch_rehearse(net: NetworkParams, fresh: BatchItem, pseudoset: PseudoSet,
                   learning_rate: float, batch_iterations: int) -> NetworkParams:
    """Batch backprop over the pseudoitems plus the fresh example"""
    if not pseudoset.items:
        raise ValueError("batch rehearsal needs a nonempty pseudoset")
    _check_topology(net, pseudoset)
    batch = [BatchItem(item.input, item.target_output) for item in pseudoset.items]
    batch.append(fresh)
    return network.batch_backprop(net, batch, learning_rate, batch_iterations)


def maintain(pseudoset: PseudoSet, net: NetworkParams, config: RehearsalConfig,
             rng: np.random.Generator, episodes_elapsed: int = 1) -> PseudoSet:
    """Count finished episodes; recapture from net once reinit_period is reached"""
    elapsed = pseudoset.episodes_since_reinit + episodes_elapsed
    if elapsed >= config.reinit_period:
        logger.debug("Recapturing pseudoset after %d episodes", elapsed)
        return capture_pseudoset(net, config, rng)
    return replace(pseudoset, episodes_since_reinit=elapsed)
