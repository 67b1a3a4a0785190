"""Independent reference implementations used only by tests.

The rule oracles decide each window by looking back over the whole prefix,
with no state machine, so they share no code path with ``cedbench.fsm``.
"""

from __future__ import annotations

import re

from cedbench.vocab import ActionClass as A, CeClass

WALK, WASH, FLUSH, EAT, BRUSH = A.WALK, A.WASH, A.FLUSH_TOILET, A.EAT, A.BRUSH_TEETH


def e1_fires(seq, t):
    a = seq[t]
    if a in (WASH, FLUSH):
        return False
    flushes = [i for i in range(t) if seq[i] == FLUSH]
    if not flushes:
        return False
    between = seq[flushes[-1] + 1 : t]
    if any(x != WALK for x in between):
        return False
    if a == WALK:
        return len(between) == 12  # this window is the 13th walk
    return len(between) <= 12


def e2_fires(seq, t):
    if seq[t] != EAT or (t > 0 and seq[t - 1] == EAT):
        return False
    washes = [i for i in range(t) if seq[i] == WASH]
    return not washes or t - washes[-1] > 24


def _brush_bout_count(seq, last_brush):
    count, i = 0, last_brush
    while i >= 0:
        if seq[i] == BRUSH:
            count += 1
            i -= 1
        elif i - 1 >= 0 and seq[i - 1] == BRUSH:
            i -= 1  # single-window gap stays inside the bout
        else:
            break
    return count


def e3_fires(seq, t, final=False):
    if t >= 2 and seq[t] != BRUSH and seq[t - 1] != BRUSH and seq[t - 2] == BRUSH:
        return _brush_bout_count(seq, t - 2) < 24
    if final:
        if seq[t] == BRUSH:
            return _brush_bout_count(seq, t) < 24
        if t >= 1 and seq[t - 1] == BRUSH:
            return _brush_bout_count(seq, t - 1) < 24
    return False


def reference_labels(seq):
    seq = list(seq)
    out = []
    for t in range(len(seq)):
        s = set()
        if e1_fires(seq, t):
            s.add(CeClass.E1)
        if e2_fires(seq, t):
            s.add(CeClass.E2)
        if e3_fires(seq, t, final=(t == len(seq) - 1)):
            s.add(CeClass.E3)
        out.append(frozenset(s))
    return out


def template_regex(template) -> re.Pattern:
    """Regex over one-letter action codes accepting exactly the template's realizations."""
    parts = []
    for step in template.steps:
        lo = 0 if step.include_prob < 1.0 else step.dur_min
        core = f"{CODE[step.action]}{{{step.dur_min},{step.dur_max}}}"
        parts.append(f"(?:{core})?" if lo == 0 else core)
    return re.compile("".join(parts))


CODE = {a: "abcdefghi"[int(a)] for a in A}


def encode(actions) -> str:
    return "".join(CODE[a] for a in actions)


def brute_counts(pred, truth):
    """Per-class (tp, fp, fn) by direct enumeration of windows."""
    out = {}
    for c in CeClass:
        tp = fp = fn = 0
        for p, t in zip(pred, truth):
            in_p = (not p) if c == CeClass.E0 else (c in p)
            in_t = (not t) if c == CeClass.E0 else (c in t)
            tp += in_p and in_t
            fp += in_p and not in_t
            fn += in_t and not in_p
        out[c] = (tp, fp, fn)
    return out
