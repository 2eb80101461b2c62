from .mlp import (
    Activation,
    BatchItem,
    LayerActivations,
    NetworkParams,
    apply_delta,
    backprop,
    batch_backprop,
    descend,
    forward,
    gradients,
    init_network,
    neuron_errors,
)

__all__ = [
    "Activation",
    "BatchItem",
    "LayerActivations",
    "NetworkParams",
    "apply_delta",
    "backprop",
    "batch_backprop",
    "descend",
    "forward",
    "gradients",
    "init_network",
    "neuron_errors",
]
