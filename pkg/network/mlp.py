"""Feed-forward network with one hidden layer, trained by backpropagation.

Weights are stored per layer as a matrix whose rows are receiving neurons and
whose columns are the sending neurons followed by one bias column. All
operations take a NetworkParams value and return a new one; the argument is
never modified.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence, Tuple

import numpy as np

from errors import DimensionError, NonFiniteError

logger = logging.getLogger(__name__)

# Mean loss below which batch training stops
BATCH_LOSS_TOLERANCE = 1e-8
# Times a rejected batch step is halved before training gives up
MAX_STEP_HALVINGS = 30


class Activation(Enum):
    LOGISTIC = "logistic"
    IDENTITY = "identity"


@dataclass(frozen=True)
class NetworkParams:
    """Layer sizes and weight matrices (bias column last)"""

    layer_sizes: Tuple[int, ...]
    weights: Tuple[np.ndarray, ...]
    hidden_activation: Activation = Activation.LOGISTIC
    output_activation: Activation = Activation.IDENTITY

    @property
    def input_width(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_width(self) -> int:
        return self.layer_sizes[-1]

    def max_abs_weight(self) -> float:
        return max(float(np.max(np.abs(w))) for w in self.weights)

    def is_finite(self) -> bool:
        return all(bool(np.all(np.isfinite(w))) for w in self.weights)

    def to_flat(self) -> np.ndarray:
        """Layer order, row-major, bias column last, float64"""
        return np.concatenate([w.ravel() for w in self.weights]).astype(np.float64)

    @classmethod
    def from_flat(cls, layer_sizes: Sequence[int], flat: np.ndarray) -> "NetworkParams":
        sizes = tuple(int(s) for s in layer_sizes)
        flat = np.asarray(flat, dtype=np.float64)
        expected = sum(sizes[i + 1] * (sizes[i] + 1) for i in range(len(sizes) - 1))
        if flat.size != expected:
            raise DimensionError(f"expected {expected} weights for {sizes}, got {flat.size}")
        weights = []
        offset = 0
        for i in range(len(sizes) - 1):
            rows, cols = sizes[i + 1], sizes[i] + 1
            weights.append(flat[offset:offset + rows * cols].reshape(rows, cols).copy())
            offset += rows * cols
        return cls(sizes, tuple(weights))


@dataclass(frozen=True)
class LayerActivations:
    """Activations of every layer, input first, output last"""

    per_layer: Tuple[np.ndarray, ...]

    @property
    def output(self) -> np.ndarray:
        return self.per_layer[-1]


@dataclass(frozen=True)
class BatchItem:
    input: np.ndarray
    target: np.ndarray


def _logistic(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-z))


def _identity(z: np.ndarray) -> np.ndarray:
    return z


# Function and derivative; the derivative is written in terms of the activation value
_ACTIVATIONS = {
    Activation.LOGISTIC: (_logistic, lambda a: a * (1.0 - a)),
    Activation.IDENTITY: (_identity, np.ones_like),
}


def activate(kind: Activation, z: np.ndarray) -> np.ndarray:
    return _ACTIVATIONS[kind][0](z)


def activation_slope(kind: Activation, activation: np.ndarray) -> np.ndarray:
    return _ACTIVATIONS[kind][1](activation)


def with_bias(values: np.ndarray) -> np.ndarray:
    """Append the constant bias input 1 (last axis)"""
    ones = np.ones(values.shape[:-1] + (1,))
    return np.concatenate([values, ones], axis=-1)


def _check_vector(values, width: int, what: str) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (width,):
        raise DimensionError(f"{what} has shape {values.shape}, expected ({width},)")
    if not np.all(np.isfinite(values)):
        raise NonFiniteError(f"{what} contains non-finite values")
    return values


def init_network(layer_sizes: Sequence[int], seed: int) -> NetworkParams:
    """Uniform [-0.5, 0.5] weights from a seeded generator"""
    sizes = tuple(int(s) for s in layer_sizes)
    if len(sizes) != 3:
        raise DimensionError(f"exactly one hidden layer is supported, got sizes {sizes}")
    if any(s < 1 for s in sizes):
        raise DimensionError(f"layer sizes must be positive, got {sizes}")

    rng = np.random.default_rng(seed)
    weights = tuple(
        rng.uniform(-0.5, 0.5, size=(sizes[i + 1], sizes[i] + 1))
        for i in range(len(sizes) - 1)
    )
    return NetworkParams(sizes, weights)


def forward(net: NetworkParams, input) -> LayerActivations:
    x = _check_vector(input, net.input_width, "input")
    hidden = activate(net.hidden_activation, net.weights[0] @ with_bias(x))
    output = activate(net.output_activation, net.weights[1] @ with_bias(hidden))
    return LayerActivations((x, hidden, output))


def _forward_rows(net: NetworkParams, biased_inputs: np.ndarray, w0: np.ndarray,
                  w1: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # bias column of w1 added directly instead of extending hidden
    hidden = activate(net.hidden_activation, biased_inputs @ w0.T)
    output = activate(net.output_activation, hidden @ w1[:, :-1].T + w1[:, -1])
    return hidden, output


def forward_batch(net: NetworkParams, inputs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Hidden and output activations for a (items, input width) matrix"""
    return _forward_rows(net, with_bias(inputs), *net.weights)


def neuron_errors(net: NetworkParams, activations: LayerActivations, target) -> List[np.ndarray]:
    """Per-neuron errors (negative loss gradient w.r.t. pre-activation), one array per weight layer.

    The loss is 0.5 * ||output - target||^2, so the output error is
    target - output scaled by the output activation's derivative, and the
    hidden error is backpropagated through the hidden activation's derivative.
    """
    target = _check_vector(target, net.output_width, "target")
    hidden = activations.per_layer[1]
    output = activations.output
    output_error = (target - output) * activation_slope(net.output_activation, output)
    hidden_error = (net.weights[1][:, :-1].T @ output_error) * activation_slope(net.hidden_activation, hidden)
    return [hidden_error, output_error]


def _rebuild(net: NetworkParams, weights: Sequence[np.ndarray]) -> NetworkParams:
    return NetworkParams(net.layer_sizes, tuple(weights), net.hidden_activation, net.output_activation)


def descend(net: NetworkParams, activations: LayerActivations, errors: Sequence[np.ndarray],
            learning_rate: float) -> NetworkParams:
    """Plain gradient step from precomputed activations and per-neuron errors"""
    return _rebuild(net, [
        w + learning_rate * np.outer(err, with_bias(activations.per_layer[i]))
        for i, (w, err) in enumerate(zip(net.weights, errors))
    ])


def gradients(net: NetworkParams, input, target) -> List[np.ndarray]:
    """Gradient of 0.5 * ||output - target||^2 for every weight matrix"""
    activations = forward(net, input)
    errors = neuron_errors(net, activations, target)
    return [-np.outer(err, with_bias(activations.per_layer[i])) for i, err in enumerate(errors)]


def backprop(net: NetworkParams, input, target, learning_rate: float) -> NetworkParams:
    """One online squared-error gradient step"""
    if learning_rate <= 0:
        raise ValueError(f"learning_rate must be positive, got {learning_rate}")
    activations = forward(net, input)
    errors = neuron_errors(net, activations, target)
    return descend(net, activations, errors, learning_rate)


def _batch_arrays(net: NetworkParams, items: Sequence[BatchItem]) -> Tuple[np.ndarray, np.ndarray]:
    inputs = np.stack([_check_vector(item.input, net.input_width, "batch input") for item in items])
    targets = np.stack([_check_vector(item.target, net.output_width, "batch target") for item in items])
    return inputs, targets


def _batch_gradients(net: NetworkParams, biased_inputs: np.ndarray, targets: np.ndarray,
                     w1: np.ndarray, hidden: np.ndarray,
                     output: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Mean gradient of the batch loss for both weight layers"""
    count = biased_inputs.shape[0]
    output_error = (targets - output) * activation_slope(net.output_activation, output)
    hidden_error = (output_error @ w1[:, :-1]) * activation_slope(net.hidden_activation, hidden)
    grad_out = np.empty_like(w1)
    grad_out[:, :-1] = output_error.T @ hidden
    grad_out[:, -1] = output_error.sum(axis=0)
    grad_out /= -count
    grad_hidden = -(hidden_error.T @ biased_inputs) / count
    return grad_hidden, grad_out


def batch_loss(output: np.ndarray, targets: np.ndarray) -> float:
    return float(0.5 * np.mean(np.sum((output - targets) ** 2, axis=1)))


def batch_backprop(net: NetworkParams, items: Sequence[BatchItem], learning_rate: float,
                   max_iterations: int) -> NetworkParams:
    """Full-batch gradient descent on the mean squared error over items.

    A step that would increase the mean loss is retried with half the step
    size; the halved size is kept for the following iterations. Training
    stops early once the mean loss drops below BATCH_LOSS_TOLERANCE.
    The loop works on bare weight arrays and builds one NetworkParams at the end.
    """
    if not items:
        raise ValueError("batch_backprop needs at least one item")
    if max_iterations < 1:
        raise ValueError(f"max_iterations must be at least 1, got {max_iterations}")
    if learning_rate <= 0:
        raise ValueError(f"learning_rate must be positive, got {learning_rate}")

    inputs, targets = _batch_arrays(net, items)
    biased_inputs = with_bias(inputs)
    w0, w1 = net.weights
    hidden, output = _forward_rows(net, biased_inputs, w0, w1)
    loss = batch_loss(output, targets)
    rate = learning_rate

    for _ in range(max_iterations):
        if loss < BATCH_LOSS_TOLERANCE:
            break
        grad_hidden, grad_out = _batch_gradients(net, biased_inputs, targets, w1, hidden, output)

        for _ in range(MAX_STEP_HALVINGS + 1):
            cand_w0 = w0 - rate * grad_hidden
            cand_w1 = w1 - rate * grad_out
            cand_hidden, cand_output = _forward_rows(net, biased_inputs, cand_w0, cand_w1)
            cand_loss = batch_loss(cand_output, targets)
            if cand_loss <= loss:
                break
            rate *= 0.5
        else:
            logger.debug("Batch step rejected after %d halvings, stopping", MAX_STEP_HALVINGS)
            break

        w0, w1, hidden, output, loss = cand_w0, cand_w1, cand_hidden, cand_output, cand_loss

    return _rebuild(net, (w0, w1))


def apply_delta(net: NetworkParams, layer_index: int, delta) -> NetworkParams:
    """Add an externally computed delta to one weight matrix"""
    if not 0 <= layer_index < len(net.weights):
        raise DimensionError(f"layer index {layer_index} out of range 0..{len(net.weights) - 1}")
    delta = np.asarray(delta, dtype=np.float64)
    if delta.shape != net.weights[layer_index].shape:
        raise DimensionError(
            f"delta shape {delta.shape} does not match layer {layer_index} "
            f"shape {net.weights[layer_index].shape}"
        )
    weights = list(net.weights)
    weights[layer_index] = weights[layer_index] + delta
    return _rebuild(net, weights)
