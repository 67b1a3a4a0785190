"""Line-delimited JSON persistence for examples and predictions.

Example record, one per line, fields in this order::

    {"example_id": 0, "seed": 123, "ae_true": ["walk", ...],
     "ae_observed": ["walk", ...] | null, "ce_labels": [[], ["e1"], ...]}

Prediction record::

    {"example_id": 0, "ce_pred": [[], ["e1"], ...]}

Readers validate every line and raise with the 1-based line number and field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

from .errors import DatasetParseError, DatasetValidationError
from .simulator import AeSequence
from .vocab import ActionClass, CeClass

_ACTION = {a.label: a for a in ActionClass}
_POSITIVE = {c.label: c for c in CeClass if c != CeClass.E0}
_MAX_SEED = (1 << 64) - 1


@dataclass(frozen=True)
class ExampleRecord:
    example_id: int
    seed: int
    ae_true: tuple[ActionClass, ...]
    ce_labels: tuple[frozenset, ...]
    ae_observed: tuple[ActionClass, ...] | None = None

    def __post_init__(self):
        if len(self.ce_labels) != len(self.ae_true):
            raise DatasetValidationError(
                f"ce_labels has {len(self.ce_labels)} windows, ae_true has {len(self.ae_true)}", field="ce_labels"
            )
        if self.ae_observed is not None and len(self.ae_observed) != len(self.ae_true):
            raise DatasetValidationError(
                f"ae_observed has {len(self.ae_observed)} windows, ae_true has {len(self.ae_true)}",
                field="ae_observed",
            )

    @property
    def true_sequence(self) -> AeSequence:
        return AeSequence(self.ae_true, self.example_id, self.seed)

    @property
    def observed_sequence(self) -> AeSequence | None:
        if self.ae_observed is None:
            return None
        return AeSequence(self.ae_observed, self.example_id, self.seed)

    def with_observed(self, observed: Sequence[ActionClass]) -> "ExampleRecord":
        return ExampleRecord(self.example_id, self.seed, self.ae_true, self.ce_labels, tuple(observed))

    def to_json(self) -> dict[str, Any]:
        return {
            "example_id": self.example_id,
            "seed": self.seed,
            "ae_true": [a.label for a in self.ae_true],
            "ae_observed": None if self.ae_observed is None else [a.label for a in self.ae_observed],
            "ce_labels": [_label_names(s) for s in self.ce_labels],
        }


@dataclass(frozen=True)
class PredictionRecord:
    example_id: int
    ce_pred: tuple[frozenset, ...]

    def to_json(self) -> dict[str, Any]:
        return {"example_id": self.example_id, "ce_pred": [_label_names(s) for s in self.ce_pred]}


def make_record(ae: AeSequence, labels: Sequence[frozenset]) -> ExampleRecord:
    return ExampleRecord(ae.example_id, ae.seed, tuple(ae.windows), tuple(labels))


def _label_names(s: frozenset) -> list[str]:
    return sorted(c.label for c in s)


# -- writing --------------------------------------------------------------------

def _write_lines(objs: Iterable[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for obj in objs:
            fh.write(json.dumps(obj, separators=(",", ":")))
            fh.write("\n")


def write_dataset(records: Iterable[ExampleRecord], path: str | Path) -> None:
    _write_lines((r.to_json() for r in records), path)


def write_predictions(records: Iterable[PredictionRecord], path: str | Path) -> None:
    _write_lines((r.to_json() for r in records), path)


# -- reading --------------------------------------------------------------------

def _iter_objects(path: str | Path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                raise DatasetParseError("blank line", line=lineno)
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetParseError(f"malformed JSON: {exc.msg} at column {exc.colno}", line=lineno) from None
            if not isinstance(obj, dict):
                raise DatasetParseError("expected a JSON object", line=lineno)
            yield lineno, obj


def _check_keys(obj: dict, required: tuple[str, ...], optional: tuple[str, ...], lineno: int) -> None:
    for key in required:
        if key not in obj:
            raise DatasetValidationError("missing field", line=lineno, field=key)
    extra = set(obj) - set(required) - set(optional)
    if extra:
        key = sorted(extra)[0]
        raise DatasetValidationError("unknown field", line=lineno, field=key)


def _int(obj: dict, key: str, lineno: int, lo: int = 0, hi: int | None = None) -> int:
    v = obj[key]
    if not isinstance(v, int) or isinstance(v, bool):
        raise DatasetValidationError(f"expected an integer, got {type(v).__name__}", line=lineno, field=key)
    if v < lo or (hi is not None and v > hi):
        raise DatasetValidationError(f"value {v} out of range", line=lineno, field=key)
    return v


def _actions(obj: dict, key: str, lineno: int) -> tuple[ActionClass, ...]:
    v = obj[key]
    if not isinstance(v, list):
        raise DatasetValidationError("expected a list of action names", line=lineno, field=key)
    try:
        return tuple(_ACTION[name] for name in v)
    except (KeyError, TypeError):
        bad = next(n for n in v if not isinstance(n, str) or n not in _ACTION)
        raise DatasetValidationError(f"unknown action class {bad!r} at window {v.index(bad)}", line=lineno, field=key) from None


def _label_sets(obj: dict, key: str, lineno: int) -> tuple[frozenset, ...]:
    v = obj[key]
    if not isinstance(v, list):
        raise DatasetValidationError("expected a list of label lists", line=lineno, field=key)
    out = []
    for t, names in enumerate(v):
        if not isinstance(names, list):
            raise DatasetValidationError(f"window {t}: expected a list of class names", line=lineno, field=key)
        try:
            s = frozenset(_POSITIVE[n] for n in names)
        except (KeyError, TypeError):
            bad = next(n for n in names if not isinstance(n, str) or n not in _POSITIVE)
            raise DatasetValidationError(
                f"window {t}: invalid complex-event class {bad!r} (e0 is the empty list)", line=lineno, field=key
            ) from None
        if len(s) != len(names):
            raise DatasetValidationError(f"window {t}: duplicate class names", line=lineno, field=key)
        out.append(s)
    return tuple(out)


def read_dataset(path: str | Path) -> list[ExampleRecord]:
    records = []
    for lineno, obj in _iter_objects(path):
        _check_keys(obj, ("example_id", "seed", "ae_true", "ce_labels"), ("ae_observed",), lineno)
        eid = _int(obj, "example_id", lineno)
        seed = _int(obj, "seed", lineno, hi=_MAX_SEED)
        ae_true = _actions(obj, "ae_true", lineno)
        observed = None if obj.get("ae_observed") is None else _actions(obj, "ae_observed", lineno)
        labels = _label_sets(obj, "ce_labels", lineno)
        try:
            records.append(ExampleRecord(eid, seed, ae_true, labels, observed))
        except DatasetValidationError as exc:
            raise DatasetValidationError(exc.message, line=lineno, field=exc.field) from None
    return records


def read_predictions(path: str | Path) -> list[PredictionRecord]:
    records = []
    for lineno, obj in _iter_objects(path):
        _check_keys(obj, ("example_id", "ce_pred"), (), lineno)
        records.append(PredictionRecord(_int(obj, "example_id", lineno), _label_sets(obj, "ce_pred", lineno)))
    return records
