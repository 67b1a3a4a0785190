"""Finite-state machines for the three complex-event rules.

The same machines stamp ground-truth labels on clean action sequences and run
as the causal streaming detector on noisy ones. A detection is emitted at the
single window where the violation becomes established; every earlier window of
the pattern stays unlabeled.

Rules, with thresholds in 5-second windows:

* e1, unsanitary restroom usage: after ``flush_toilet``, any action other than
  ``wash``/``walk``/``flush_toilet`` before washing, or more than 12 walk
  windows (1 min) without washing.
* e2, unsanitary diet habit: the first window of an eating bout comes more than
  24 windows (2 min) after the last ``wash``, or with no wash seen yet.
* e3, bad brushing habit: a brushing bout with fewer than 24 ``brush_teeth``
  windows (2 min); a bout ends at its 2nd consecutive non-brushing window (10 s).

All step functions are pure: state in, ``(state, emitted)`` out.
"""

from __future__ import annotations

from enum import IntEnum
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

from .vocab import WINDOW_SECONDS, ActionClass, CeClass

CeLabelSequence = list  # list[frozenset[CeClass]], one set per window; empty set is e0


def windows_for(seconds: int, window_seconds: int = WINDOW_SECONDS) -> int:
    if seconds % window_seconds:
        raise ValueError(f"{seconds} s is not a whole number of {window_seconds} s windows")
    return seconds // window_seconds


WALK_THRESHOLD = windows_for(60)
WASH_EAT_MAX_GAP = windows_for(120)
BRUSH_MIN_WINDOWS = windows_for(120)
BRUSH_STOP_GAP = windows_for(10)

_WALK = ActionClass.WALK
_WASH = ActionClass.WASH
_FLUSH = ActionClass.FLUSH_TOILET
_EAT = ActionClass.EAT
_BRUSH = ActionClass.BRUSH_TEETH


# -- e1 -----------------------------------------------------------------------

class RestroomPhase(IntEnum):
    IDLE = 0
    AFTER_RESTROOM = 1


class RestroomFsmState(NamedTuple):
    phase: RestroomPhase = RestroomPhase.IDLE
    walk_count: int = 0


RESTROOM_IDLE = RestroomFsmState()
_RESTROOM_FLUSHED = RestroomFsmState(RestroomPhase.AFTER_RESTROOM, 0)


def e1_step(state: RestroomFsmState, action: ActionClass) -> tuple[RestroomFsmState, bool]:
    if state.phase == RestroomPhase.IDLE:
        if action == _FLUSH:
            return _RESTROOM_FLUSHED, False
        return state, False
    if action == _WASH:
        return RESTROOM_IDLE, False
    if action == _FLUSH:
        return _RESTROOM_FLUSHED, False
    if action == _WALK:
        walked = state.walk_count + 1
        if walked > WALK_THRESHOLD:
            return RESTROOM_IDLE, True
        return RestroomFsmState(RestroomPhase.AFTER_RESTROOM, walked), False
    return RESTROOM_IDLE, True


# -- e2 -----------------------------------------------------------------------

class DietFsmState(NamedTuple):
    # None means no wash seen yet. Counts saturate at WASH_EAT_MAX_GAP + 1.
    windows_since_wash: int | None = None
    in_eating_bout: bool = False


DIET_START = DietFsmState()


def e2_step(state: DietFsmState, action: ActionClass) -> tuple[DietFsmState, bool]:
    if action == _WASH:
        return DietFsmState(0, False), False
    since = state.windows_since_wash
    if since is not None and since <= WASH_EAT_MAX_GAP:
        since += 1
    if action == _EAT:
        if state.in_eating_bout:
            return DietFsmState(since, True), False
        return DietFsmState(since, True), since is None or since > WASH_EAT_MAX_GAP
    return DietFsmState(since, False), False


# -- e3 -----------------------------------------------------------------------

class BrushPhase(IntEnum):
    IDLE = 0
    BRUSHING = 1


class BrushFsmState(NamedTuple):
    phase: BrushPhase = BrushPhase.IDLE
    brush_count: int = 0  # saturates at BRUSH_MIN_WINDOWS
    gap_count: int = 0


BRUSH_IDLE = BrushFsmState()


def e3_step(state: BrushFsmState, action: ActionClass) -> tuple[BrushFsmState, bool]:
    if state.phase == BrushPhase.IDLE:
        if action == _BRUSH:
            return BrushFsmState(BrushPhase.BRUSHING, 1, 0), False
        return state, False
    if action == _BRUSH:
        return BrushFsmState(BrushPhase.BRUSHING, min(state.brush_count + 1, BRUSH_MIN_WINDOWS), 0), False
    gap = state.gap_count + 1
    if gap >= BRUSH_STOP_GAP:
        return BRUSH_IDLE, state.brush_count < BRUSH_MIN_WINDOWS
    return BrushFsmState(BrushPhase.BRUSHING, state.brush_count, gap), False


def e3_close(state: BrushFsmState) -> bool:
    """Whether a bout still open at end of stream is a violation."""
    return state.phase == BrushPhase.BRUSHING and state.brush_count < BRUSH_MIN_WINDOWS


# -- combined detector ----------------------------------------------------------

class DetectorState(NamedTuple):
    restroom: RestroomFsmState = RESTROOM_IDLE
    diet: DietFsmState = DIET_START
    brush: BrushFsmState = BRUSH_IDLE
    t: int = 0  # windows pushed so far


DETECTOR_START = DetectorState()

# emission bitmask (bit c-1 for class c) -> label set
_MASK_SETS = tuple(
    frozenset(c for c in (CeClass.E1, CeClass.E2, CeClass.E3) if mask >> (c - 1) & 1) for mask in range(8)
)


def label_mask(labels: frozenset) -> int:
    m = 0
    for c in labels:
        if c:
            m |= 1 << (c - 1)
    return m


def labels_from_mask(mask: int) -> frozenset:
    return _MASK_SETS[mask]


@lru_cache(maxsize=None)
def _joint_step(r: RestroomFsmState, d: DietFsmState, b: BrushFsmState, action: ActionClass):
    # Reachable state space is finite, so memoizing the product step is bounded.
    r, e1 = e1_step(r, action)
    d, e2 = e2_step(d, action)
    b, e3 = e3_step(b, action)
    return r, d, b, _MASK_SETS[e1 | e2 << 1 | e3 << 2]


def detector_push(state: DetectorState, action: ActionClass) -> tuple[DetectorState, frozenset]:
    """Advance the detector by one window; return the labels for that window."""
    r, d, b, emitted = _joint_step(state.restroom, state.diet, state.brush, action)
    return DetectorState(r, d, b, state.t + 1), emitted


def detector_close(state: DetectorState) -> frozenset:
    """Labels to add to the last pushed window when the stream ends."""
    return _MASK_SETS[4] if e3_close(state.brush) else _MASK_SETS[0]


def stream_labels(actions: Iterable[ActionClass]):
    """Yield ``(t, labels)`` per window as actions arrive.

    Output for window ``t`` depends only on actions ``0..t``. End-of-stream
    closing is not applied; use :func:`label_sequence` for finite sequences.
    """
    state = DETECTOR_START
    for a in actions:
        state, out = detector_push(state, a)
        yield state.t - 1, out


def label_sequence(actions: Sequence[ActionClass]) -> CeLabelSequence:
    """Label a finite action sequence.

    Equals the push-by-push detector output, except that a brushing bout still
    open at the last window is closed there.
    """
    state = DETECTOR_START
    push = detector_push
    labels = []
    append = labels.append
    for a in actions:
        state, out = push(state, a)
        append(out)
    if labels:
        extra = detector_close(state)
        if extra:
            labels[-1] = labels[-1] | extra
    return labels
