"""Complex-event detection benchmark kit.

Simulates window-level human-activity action sequences, stamps complex-event
labels with finite-state machines, perturbs actions through a classifier-noise
channel, runs the same machines as a causal streaming detector, and scores the
result per window.
"""

from .fsm import DetectorState, detector_close, detector_push, label_sequence
from .metrics import ci95, count_confusion, count_dataset, focal_loss, precision_recall_f1
from .noise import NoiseModel, apply_noise, uniform_from_accuracy
from .simulator import (
    AeSequence,
    SimulatorConfig,
    default_config,
    generate_dataset,
    generate_sequence,
    load_config,
)
from .vocab import ActionClass, CeClass

__version__ = "0.1.0"

__all__ = [
    "ActionClass",
    "AeSequence",
    "CeClass",
    "DetectorState",
    "NoiseModel",
    "SimulatorConfig",
    "apply_noise",
    "ci95",
    "count_confusion",
    "count_dataset",
    "default_config",
    "detector_close",
    "detector_push",
    "focal_loss",
    "generate_dataset",
    "generate_sequence",
    "label_sequence",
    "load_config",
    "precision_recall_f1",
    "uniform_from_accuracy",
]
