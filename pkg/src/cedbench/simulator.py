"""Stochastic daily-activity simulator producing window-level action sequences.

A day is a list of stages. Each stage repeatedly draws an activity from its
categorical distribution and realizes it as a run of action windows until the
stage's window budget is filled; the last activity of a stage is cut at the
stage boundary, and the concatenation is cut to the configured sequence length.

Per-example randomness comes from ``random.Random(mix_seed(base_seed, example_id))``
so examples are independent and replayable in any order.
"""

from __future__ import annotations

import bisect
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Sequence

import yaml

from .errors import ConfigError
from .vocab import WINDOW_SECONDS, ActionClass

_MASK64 = (1 << 64) - 1
_GOLDEN64 = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    x = (x + _GOLDEN64) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix_seed(base_seed: int, example_id: int) -> int:
    """Derive the 64-bit per-example seed.

    ``splitmix64(splitmix64(base_seed mod 2**64) XOR (example_id mod 2**64))``.
    The double application keeps neighbouring ids and neighbouring base seeds
    from producing correlated streams.
    """
    return splitmix64(splitmix64(base_seed & _MASK64) ^ (example_id & _MASK64))


@dataclass(frozen=True)
class ActionStep:
    action: ActionClass
    dur_min: int
    dur_max: int
    include_prob: float = 1.0

    def __post_init__(self):
        if not isinstance(self.action, ActionClass):
            object.__setattr__(self, "action", ActionClass(self.action))
        if self.dur_min < 1 or self.dur_max < self.dur_min:
            raise ConfigError(
                f"step {self.action.label}: need 1 <= dur_min <= dur_max, got [{self.dur_min}, {self.dur_max}]"
            )
        if not 0.0 <= self.include_prob <= 1.0:
            raise ConfigError(f"step {self.action.label}: include_prob {self.include_prob} outside [0, 1]")

    @property
    def optional(self) -> bool:
        return self.include_prob < 1.0


@dataclass(frozen=True)
class ActivityTemplate:
    name: str
    steps: tuple[ActionStep, ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.steps:
            raise ConfigError(f"activity {self.name!r} has no steps")
        if not any(s.include_prob == 1.0 for s in self.steps):
            raise ConfigError(f"activity {self.name!r} needs at least one step with include_prob = 1")

    @property
    def max_windows(self) -> int:
        return sum(s.dur_max for s in self.steps)


@dataclass(frozen=True)
class StageConfig:
    name: str
    activities: tuple[tuple[ActivityTemplate, float], ...]
    window_budget: int
    _cum: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        acts = tuple((t, float(p)) for t, p in self.activities)
        object.__setattr__(self, "activities", acts)
        if not acts:
            raise ConfigError(f"stage {self.name!r} has no activities")
        if self.window_budget < 1:
            raise ConfigError(f"stage {self.name!r}: window_budget must be >= 1")
        for t, p in acts:
            if p < 0.0:
                raise ConfigError(f"stage {self.name!r}: negative probability for {t.name!r}")
        total = sum(p for _, p in acts)
        if abs(total - 1.0) > 1e-9:
            raise ConfigError(f"stage {self.name!r}: activity probabilities sum to {total!r}, not 1")
        cum, acc = [], 0.0
        for _, p in acts:
            acc += p
            cum.append(acc)
        object.__setattr__(self, "_cum", tuple(cum))

    @property
    def probabilities(self) -> tuple[float, ...]:
        return tuple(p for _, p in self.activities)


@dataclass(frozen=True)
class SimulatorConfig:
    stages: tuple[StageConfig, ...]
    sequence_length_windows: int = 60
    window_seconds: int = WINDOW_SECONDS
    base_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        if not self.stages:
            raise ConfigError("config has no stages")
        if self.sequence_length_windows < 1:
            raise ConfigError("sequence_length_windows must be >= 1")
        if self.window_seconds != WINDOW_SECONDS:
            raise ConfigError(f"window_seconds is fixed at {WINDOW_SECONDS}; got {self.window_seconds}")
        budget = sum(s.window_budget for s in self.stages)
        if budget < self.sequence_length_windows:
            raise ConfigError(
                f"stage budgets total {budget} windows, fewer than sequence_length_windows={self.sequence_length_windows}"
            )

    def stage(self, name: str) -> StageConfig:
        for s in self.stages:
            if s.name == name:
                return s
        raise KeyError(name)

    def templates(self) -> dict[str, ActivityTemplate]:
        return {t.name: t for s in self.stages for t, _ in s.activities}


@dataclass(frozen=True)
class AeSequence:
    windows: tuple[ActionClass, ...]
    example_id: int = 0
    seed: int = 0

    def __len__(self) -> int:
        return len(self.windows)

    def __iter__(self):
        return iter(self.windows)


def realize_activity(template: ActivityTemplate, rng: random.Random) -> list[ActionClass]:
    """Realize one activity as a window-granular action segment.

    Steps are kept independently with their ``include_prob`` and, in template
    order, contribute a uniform integer duration in ``[dur_min, dur_max]``.
    """
    out: list[ActionClass] = []
    for step in template.steps:
        if step.include_prob < 1.0 and rng.random() >= step.include_prob:
            continue
        n = step.dur_min if step.dur_min == step.dur_max else rng.randint(step.dur_min, step.dur_max)
        out.extend([step.action] * n)
    return out


def sample_activity(stage: StageConfig, rng: random.Random) -> ActivityTemplate:
    i = bisect.bisect_right(stage._cum, rng.random())
    # cumulative sum may end a hair below 1.0
    return stage.activities[min(i, len(stage.activities) - 1)][0]


def generate_sequence(config: SimulatorConfig, example_id: int) -> AeSequence:
    seed = mix_seed(config.base_seed, example_id)
    rng = random.Random(seed)
    windows: list[ActionClass] = []
    for stage in config.stages:
        filled = 0
        while filled < stage.window_budget:
            segment = realize_activity(sample_activity(stage, rng), rng)
            take = min(len(segment), stage.window_budget - filled)
            windows.extend(segment[:take])
            filled += take
        if len(windows) >= config.sequence_length_windows:
            break
    if len(windows) < config.sequence_length_windows:
        raise ConfigError("stages cannot fill the configured sequence length")
    return AeSequence(tuple(windows[: config.sequence_length_windows]), example_id, seed)


def _generate_range(args: tuple[SimulatorConfig, int, int]) -> list[AeSequence]:
    config, start, stop = args
    return [generate_sequence(config, i) for i in range(start, stop)]


def generate_dataset(config: SimulatorConfig, n: int, *, workers: int = 1) -> list[AeSequence]:
    """Generate examples ``0..n-1``, ordered by example id.

    With ``workers > 1`` chunks are generated in worker processes; the result
    is identical to the sequential one.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if workers <= 1 or n < 2 * workers:
        return [generate_sequence(config, i) for i in range(n)]
    chunk = -(-n // (workers * 4))
    bounds = [(config, s, min(s + chunk, n)) for s in range(0, n, chunk)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_generate_range, bounds))
    return [seq for part in parts for seq in part]


# -- config file ---------------------------------------------------------------

DEFAULT_CONFIG_RESOURCE = "default.yaml"


def _parse_step(raw: Any, where: str) -> ActionStep:
    if not isinstance(raw, Mapping):
        raise ConfigError(f"{where}: expected a mapping with keys action, dur[, p]")
    unknown = set(raw) - {"action", "dur", "p"}
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    try:
        action = ActionClass.parse(raw["action"])
    except KeyError:
        raise ConfigError(f"{where}: missing 'action'") from None
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    dur = raw.get("dur")
    if isinstance(dur, int) and not isinstance(dur, bool):
        lo = hi = dur
    elif isinstance(dur, Sequence) and len(dur) == 2 and all(isinstance(d, int) for d in dur):
        lo, hi = dur
    else:
        raise ConfigError(f"{where}: 'dur' must be an integer or [min, max] window counts")
    p = raw.get("p", 1.0)
    if not isinstance(p, (int, float)) or isinstance(p, bool):
        raise ConfigError(f"{where}: 'p' must be a number")
    try:
        return ActionStep(action, lo, hi, float(p))
    except ConfigError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def config_from_dict(data: Mapping[str, Any]) -> SimulatorConfig:
    """Build a validated config from the parsed YAML document."""
    if not isinstance(data, Mapping):
        raise ConfigError("config document must be a mapping")
    for key in ("activities", "stages"):
        if key not in data:
            raise ConfigError(f"config is missing {key!r}")
    raw_acts = data["activities"]
    if not isinstance(raw_acts, Mapping):
        raise ConfigError("'activities' must map activity names to step lists")
    templates: dict[str, ActivityTemplate] = {}
    for name, steps in raw_acts.items():
        if not isinstance(steps, list):
            raise ConfigError(f"activities.{name}: expected a list of steps")
        parsed = [_parse_step(s, f"activities.{name}[{i}]") for i, s in enumerate(steps)]
        try:
            templates[name] = ActivityTemplate(str(name), tuple(parsed))
        except ConfigError as exc:
            raise ConfigError(f"activities.{name}: {exc}") from None

    stages = []
    if not isinstance(data["stages"], list):
        raise ConfigError("'stages' must be a list")
    for i, raw in enumerate(data["stages"]):
        where = f"stages[{i}]"
        if not isinstance(raw, Mapping):
            raise ConfigError(f"{where}: expected a mapping")
        try:
            name = str(raw["name"])
            budget = raw["window_budget"]
            entries = raw["activities"]
        except KeyError as exc:
            raise ConfigError(f"{where}: missing {exc.args[0]!r}") from None
        if not isinstance(budget, int) or isinstance(budget, bool):
            raise ConfigError(f"{where}: window_budget must be an integer")
        pairs = []
        for j, entry in enumerate(entries or []):
            try:
                act, p = entry["activity"], entry["p"]
            except (KeyError, TypeError):
                raise ConfigError(f"{where}.activities[{j}]: expected {{activity: name, p: prob}}") from None
            if act not in templates:
                raise ConfigError(f"{where}.activities[{j}]: undefined activity {act!r}")
            if not isinstance(p, (int, float)) or isinstance(p, bool):
                raise ConfigError(f"{where}.activities[{j}]: 'p' must be a number")
            pairs.append((templates[act], float(p)))
        try:
            stages.append(StageConfig(name, tuple(pairs), budget))
        except ConfigError as exc:
            raise ConfigError(f"{where}: {exc}") from None

    def _int(key: str, default: int) -> int:
        v = data.get(key, default)
        if not isinstance(v, int) or isinstance(v, bool):
            raise ConfigError(f"{key!r} must be an integer")
        return v

    return SimulatorConfig(
        stages=tuple(stages),
        sequence_length_windows=_int("sequence_length_windows", 60),
        window_seconds=_int("window_seconds", WINDOW_SECONDS),
        base_seed=_int("base_seed", 0),
    )


def config_to_dict(config: SimulatorConfig) -> dict[str, Any]:
    acts: dict[str, list] = {}
    for name, t in config.templates().items():
        acts[name] = [
            {
                "action": s.action.label,
                "dur": s.dur_min if s.dur_min == s.dur_max else [s.dur_min, s.dur_max],
                **({"p": s.include_prob} if s.optional else {}),
            }
            for s in t.steps
        ]
    return {
        "sequence_length_windows": config.sequence_length_windows,
        "window_seconds": config.window_seconds,
        "base_seed": config.base_seed,
        "activities": acts,
        "stages": [
            {
                "name": s.name,
                "window_budget": s.window_budget,
                "activities": [{"activity": t.name, "p": p} for t, p in s.activities],
            }
            for s in config.stages
        ],
    }


def load_config(path: str | Path) -> SimulatorConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from None
    return config_from_dict(data)


def default_config_text() -> str:
    return resources.files("cedbench.configs").joinpath(DEFAULT_CONFIG_RESOURCE).read_text(encoding="utf-8")


def default_config(**overrides: Any) -> SimulatorConfig:
    data = yaml.safe_load(default_config_text())
    data.update(overrides)
    return config_from_dict(data)
