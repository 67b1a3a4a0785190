"""Symbolic vocabularies: the nine atomic actions and the complex-event classes.

Index order of ``ActionClass`` is canonical wherever integer indices are used
(confusion-matrix rows and columns, numpy arrays).
"""

from __future__ import annotations

from enum import IntEnum

WINDOW_SECONDS = 5


class ActionClass(IntEnum):
    WALK = 0
    SIT = 1
    BRUSH_TEETH = 2
    CLICK_MOUSE = 3
    DRINK = 4
    EAT = 5
    TYPE = 6
    FLUSH_TOILET = 7
    WASH = 8

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, name: str) -> "ActionClass":
        try:
            return _ACTION_BY_LABEL[name]
        except (KeyError, TypeError):
            raise ValueError(f"unknown action class {name!r}") from None

    def __str__(self) -> str:
        return self.label


class CeClass(IntEnum):
    """Complex-event classes. ``E0`` is implied by an empty label set."""

    E0 = 0
    E1 = 1  # unsanitary restroom usage
    E2 = 2  # unsanitary diet habit
    E3 = 3  # bad brushing habit

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, name: str) -> "CeClass":
        try:
            return _CE_BY_LABEL[name]
        except (KeyError, TypeError):
            raise ValueError(f"unknown complex-event class {name!r}") from None

    def __str__(self) -> str:
        return self.label


_ACTION_BY_LABEL = {a.label: a for a in ActionClass}
_CE_BY_LABEL = {c.label: c for c in CeClass}

ACTIONS: tuple[ActionClass, ...] = tuple(ActionClass)
N_ACTIONS = len(ACTIONS)
CE_CLASSES: tuple[CeClass, ...] = tuple(CeClass)
POSITIVE_CLASSES: tuple[CeClass, ...] = (CeClass.E1, CeClass.E2, CeClass.E3)

# A per-window label set; empty means e0.
CeLabelSet = frozenset
EMPTY_LABELS: frozenset = frozenset()


def labels_to_names(labels: frozenset) -> list[str]:
    return sorted(c.label for c in labels)


def labels_from_names(names) -> frozenset:
    out = frozenset(CeClass.parse(n) for n in names)
    if CeClass.E0 in out:
        raise ValueError("e0 is never stored explicitly; use an empty label set")
    return out
