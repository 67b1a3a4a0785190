"""Confusion-matrix noise channel standing in for an imperfect action classifier.

Row ``i`` of the matrix is the distribution of the observed class given true
class ``i``; rows and columns follow ``ActionClass`` index order.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import ValidationError
from .simulator import AeSequence, mix_seed
from .vocab import ACTIONS, N_ACTIONS, ActionClass

DEFAULT_ACCURACY = 0.91
_ROW_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class NoiseModel:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (N_ACTIONS, N_ACTIONS):
            raise ValidationError(f"confusion matrix must be {N_ACTIONS}x{N_ACTIONS}, got {m.shape}")
        if not np.all(np.isfinite(m)) or np.any(m < 0):
            raise ValidationError("confusion matrix entries must be finite and >= 0")
        bad = np.flatnonzero(np.abs(m.sum(axis=1) - 1.0) > _ROW_TOL)
        if bad.size:
            i = int(bad[0])
            raise ValidationError(f"confusion matrix row {i} ({ACTIONS[i].label}) sums to {m[i].sum()!r}, not 1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        cum = np.cumsum(m, axis=1)
        cum.setflags(write=False)
        object.__setattr__(self, "_cum", cum)

    @property
    def accuracy_per_class(self) -> np.ndarray:
        return np.diag(self.matrix).copy()

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.matrix, np.eye(N_ACTIONS)))


def uniform_from_accuracy(p: float) -> NoiseModel:
    """Diagonal ``p``, remaining mass spread evenly over the other 8 classes."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"accuracy must lie in [0, 1], got {p}")
    off = (1.0 - p) / (N_ACTIONS - 1)
    m = np.full((N_ACTIONS, N_ACTIONS), off)
    np.fill_diagonal(m, p)
    return NoiseModel(m)


def apply_noise(ae: AeSequence, model: NoiseModel, rng: np.random.Generator) -> AeSequence:
    """Resample every window independently from its true class's row."""
    true_idx = np.fromiter(ae.windows, dtype=np.intp, count=len(ae.windows))
    if true_idx.size == 0:
        return ae
    u = rng.random(true_idx.size)
    # first column whose cumulative mass exceeds u
    observed = (u[:, None] >= model._cum[true_idx]).sum(axis=1)
    np.minimum(observed, N_ACTIONS - 1, out=observed)
    return AeSequence(tuple(ACTIONS[i] for i in observed.tolist()), ae.example_id, ae.seed)


def perturb_dataset(
    sequences: Iterable[AeSequence], model: NoiseModel, seed: int
) -> list[AeSequence]:
    """Apply ``model`` to each example with its own generator seeded from ``(seed, example_id)``."""
    identity = model.is_identity()
    out = []
    for ae in sequences:
        if identity:
            out.append(ae)
            continue
        rng = np.random.default_rng(mix_seed(seed, ae.example_id))
        out.append(apply_noise(ae, model, rng))
    return out


def load_matrix(path: str | Path) -> NoiseModel:
    """Read a 9x9 confusion matrix: one row per line, whitespace- or comma-separated, ``#`` comments."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read confusion matrix {path}: {exc.strerror or exc}") from exc
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([float(x) for x in line.replace(",", " ").split()])
        except ValueError:
            raise ValidationError(f"{path}: line {lineno}: non-numeric entry") from None
    if len(rows) != N_ACTIONS or any(len(r) != N_ACTIONS for r in rows):
        raise ValidationError(f"{path}: expected {N_ACTIONS} rows of {N_ACTIONS} numbers")
    return NoiseModel(np.array(rows))


def save_matrix(model: NoiseModel, path: str | Path) -> None:
    header = "rows: true class, columns: observed class; order: " + " ".join(a.label for a in ActionClass)
    np.savetxt(path, model.matrix, fmt="%.12g", header=header)
