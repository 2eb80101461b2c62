from .pseudo import (
    Pseudoitem,
    PseudoSet,
    RehearsalConfig,
    RehearsalMode,
    batch_rehearse,
    capture_pseudoset,
    fr_rehearse,
    generate_pseudoinput,
    maintain,
    orthogonal_delta,
    orthogonal_direction,
)
from .strategy import Rehearser

__all__ = [
    "Pseudoitem",
    "PseudoSet",
    "RehearsalConfig",
    "RehearsalMode",
    "Rehearser",
    "batch_rehearse",
    "capture_pseudoset",
    "fr_rehearse",
    "generate_pseudoinput",
    "maintain",
    "orthogonal_delta",
    "orthogonal_direction",
]
