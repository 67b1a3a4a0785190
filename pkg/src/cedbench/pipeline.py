"""Generate -> perturb -> detect -> evaluate, on in-memory records."""

from __future__ import annotations

import logging
from typing import Sequence

from .dataset_io import ExampleRecord, PredictionRecord, make_record
from .errors import DatasetValidationError
from .fsm import label_sequence
from .metrics import MetricsReport, aggregate, count_dataset, precision_recall_f1
from .noise import NoiseModel, perturb_dataset, uniform_from_accuracy
from .simulator import SimulatorConfig, generate_dataset

log = logging.getLogger(__name__)


def build_dataset(config: SimulatorConfig, n: int, *, workers: int = 1) -> list[ExampleRecord]:
    """Simulate ``n`` examples and stamp their ground-truth labels."""
    return [make_record(ae, label_sequence(ae.windows)) for ae in generate_dataset(config, n, workers=workers)]


def perturb_records(records: Sequence[ExampleRecord], model: NoiseModel, seed: int) -> list[ExampleRecord]:
    observed = perturb_dataset((r.true_sequence for r in records), model, seed)
    return [r.with_observed(o.windows) for r, o in zip(records, observed)]


def detect_records(records: Sequence[ExampleRecord]) -> list[PredictionRecord]:
    """Run the streaming detector over each example's observed actions."""
    if records and any(r.ae_observed is None for r in records):
        log.warning("%d record(s) lack ae_observed; detecting on ae_true",
                    sum(r.ae_observed is None for r in records))
    out = []
    for r in records:
        actions = r.ae_true if r.ae_observed is None else r.ae_observed
        out.append(PredictionRecord(r.example_id, tuple(label_sequence(actions))))
    return out


def evaluate(preds: Sequence[PredictionRecord], truth: Sequence[ExampleRecord]) -> MetricsReport:
    """Per-window metrics; predictions are matched to truth by example id."""
    by_id = {}
    for p in preds:
        if p.example_id in by_id:
            raise DatasetValidationError(f"duplicate prediction for example {p.example_id}")
        by_id[p.example_id] = p
    if len(by_id) != len(truth):
        raise DatasetValidationError(f"{len(by_id)} predictions for {len(truth)} examples")
    pred_seqs, true_seqs = [], []
    for r in truth:
        p = by_id.get(r.example_id)
        if p is None:
            raise DatasetValidationError(f"no prediction for example {r.example_id}")
        if len(p.ce_pred) != len(r.ce_labels):
            raise DatasetValidationError(
                f"example {r.example_id}: {len(p.ce_pred)} predicted windows vs {len(r.ce_labels)} true"
            )
        pred_seqs.append(p.ce_pred)
        true_seqs.append(r.ce_labels)
    return precision_recall_f1(count_dataset(pred_seqs, true_seqs))


def noisy_runs(
    records: Sequence[ExampleRecord], model: NoiseModel, seeds: Sequence[int]
) -> list[MetricsReport]:
    """One perturb + detect + evaluate pass per seed."""
    return [evaluate(detect_records(perturb_records(records, model, s)), records) for s in seeds]


def sweep(
    records: Sequence[ExampleRecord], accuracies: Sequence[float], runs: int, seed: int
) -> list[tuple[float, MetricsReport]]:
    """Aggregate metrics per accuracy over perturbation seeds ``seed .. seed+runs-1``."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    seeds = [seed + k for k in range(runs)]
    return [(acc, aggregate(noisy_runs(records, uniform_from_accuracy(acc), seeds))) for acc in accuracies]
