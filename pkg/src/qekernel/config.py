"""Run configuration: one flat file (TOML or JSON), overridable by CLI flags.

Every tunable of the pipeline lives here with its default, so a report that
echoes the resolved config is a complete record of the run. All randomness
derives from the single ``seed`` field.
"""

from __future__ import annotations

import dataclasses
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = ["ConfigError", "RunConfig", "load_config", "apply_overrides"]

HAM_KINDS = ("ising", "xy", "hardware")
OBSERVABLES = ("ising_energy", "total_occupation", "site_occupation")
BINNINGS = ("auto", "integer", "fixed_width")


class ConfigError(ValueError):
    """Bad configuration: wrong type, unknown key, or out-of-range value."""


@dataclass
class RunConfig:
    # dataset
    dataset_dir: str | None = None
    dataset_name: str | None = None
    max_nodes: int = 16
    keep_classes: tuple[int, ...] | None = None
    fingerprint_star: bool = False

    # evolution: pulse train Λ = {θ_0, t_1, θ_1, ..., t_p, θ_p}
    ham_kind: str = "ising"
    depth: int = 1
    theta0: float = math.pi / 4
    pulse_thetas: tuple[float, ...] | None = None  # overrides theta0/depth
    pulse_times: tuple[float, ...] | None = None
    hardware_durations_ns: tuple[float, ...] | None = None
    time_bounds: tuple[float, float] = (0.05, 2.0 * math.pi)
    theta_bounds: tuple[float, float] = (-math.pi / 2, math.pi / 2)
    duration_bounds_ns: tuple[float, float] = (4.5, 100.0)

    # measurement
    observable: str = "ising_energy"
    observable_site: int = 0
    binning: str = "auto"
    bin_width: float = 1.0
    bin_origin: float = 0.0
    shots: int | None = None  # None → exact distributions
    epsilon: float = 0.0
    epsilon_prime: float = 0.0

    # kernel
    mu: float = 1.0

    # training / benchmark
    folds: int = 10
    repeats: int = 10
    bo_budget: int = 100
    bo_init: int = 20
    bo_workers: int = 1
    graphlet_samples: int = 1000
    noise_estimations: int = 100
    noise_shots: int = 10_000

    # bookkeeping
    seed: int = 0
    output_dir: str = "out"
    emit_plot_data: bool = False

    def __post_init__(self):
        if self.ham_kind not in HAM_KINDS:
            raise ConfigError(f"ham_kind must be one of {HAM_KINDS}")
        if self.observable not in OBSERVABLES:
            raise ConfigError(f"observable must be one of {OBSERVABLES}")
        if self.binning not in BINNINGS:
            raise ConfigError(f"binning must be one of {BINNINGS}")
        if self.max_nodes < 1:
            raise ConfigError("max_nodes must be at least 1")
        if self.depth < 1:
            raise ConfigError("depth must be at least 1")
        if self.mu < 0:
            raise ConfigError("mu must be non-negative")
        if self.shots is not None and self.shots < 1:
            raise ConfigError("shots must be at least 1 when given")
        for name in ("epsilon", "epsilon_prime"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if self.folds < 2:
            raise ConfigError("folds must be at least 2")
        if self.repeats < 1:
            raise ConfigError("repeats must be at least 1")
        if self.bo_budget < self.bo_init:
            raise ConfigError("bo_budget must cover bo_init")
        if self.bin_width <= 0:
            raise ConfigError("bin_width must be positive")
        if self.pulse_thetas is not None or self.pulse_times is not None:
            if self.pulse_thetas is None or self.pulse_times is None:
                raise ConfigError("pulse_thetas and pulse_times come together")
            if len(self.pulse_thetas) != len(self.pulse_times) + 1:
                raise ConfigError(
                    "pulse_thetas must be one longer than pulse_times"
                )
        for name in ("time_bounds", "theta_bounds", "duration_bounds_ns"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ConfigError(f"{name} must be an increasing pair")
        if self.noise_estimations < 1 or self.noise_shots < 1:
            raise ConfigError("noise study needs positive estimations and shots")

    def resolved_pulses(self) -> tuple[tuple[float, ...], tuple[float, ...]]:
        """The configured Λ, defaulting to a depth-``depth`` Ramsey train:
        θ_0, then unit free times closed by −θ_0 pulses."""
        if self.pulse_thetas is not None:
            return tuple(self.pulse_thetas), tuple(self.pulse_times)
        thetas = (self.theta0,) + (-self.theta0,) * self.depth
        times = (1.0,) * self.depth
        return thetas, times

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        for key, val in out.items():
            if isinstance(val, tuple):
                out[key] = list(val)
        return out


_FIELD_TYPES = {f.name: f for f in dataclasses.fields(RunConfig)}
_TUPLE_FIELDS = {
    "keep_classes",
    "pulse_thetas",
    "pulse_times",
    "hardware_durations_ns",
    "time_bounds",
    "theta_bounds",
    "duration_bounds_ns",
}


def _coerce(key: str, value):
    if key in _TUPLE_FIELDS and value is not None:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{key} must be a list")
        return tuple(value)
    return value


def load_config(path: str | Path | None) -> RunConfig:
    """Read a TOML (default) or JSON config file; None gives pure defaults."""
    if path is None:
        return RunConfig()
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        if path.suffix.lower() == ".json":
            raw = json.loads(path.read_text())
        else:
            with open(path, "rb") as fh:
                raw = tomllib.load(fh)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"could not parse {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config root must be a table/object, got {type(raw)}")
    unknown = set(raw) - set(_FIELD_TYPES)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        return RunConfig(**{k: _coerce(k, v) for k, v in raw.items()})
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def apply_overrides(config: RunConfig, overrides: dict) -> RunConfig:
    """A new config with the given fields replaced (None values ignored)."""
    updates = {k: _coerce(k, v) for k, v in overrides.items() if v is not None}
    unknown = set(updates) - set(_FIELD_TYPES)
    if unknown:
        raise ConfigError(f"unknown config overrides: {sorted(unknown)}")
    return dataclasses.replace(config, **updates)
