"""Experiment configuration: flat key/value documents with per-model defaults."""
from __future__ import annotations

from dataclasses import dataclass, fields

from .chaos import BasisSpec, TruncationSet, enumerate_truncation
from .models import GridSpec, ModelVariant, TimeGrid, get_model


class ConfigError(ValueError):
    """Invalid or malformed experiment configuration."""


_MODEL_DEFAULTS = {
    "1d": dict(cells=(200,), steps=1000, horizon=1.0, sigma=1.0,
               wce_order=20, wce_basis=2, mc_samples=20000),
    "2d": dict(cells=(60, 60), steps=1000, horizon=1.0, sigma=1.0,
               wce_order=20, wce_basis=3, mc_samples=10000),
    "3d": dict(cells=(50, 50, 50), steps=1000, horizon=1.0, sigma=1.0,
               wce_order=12, wce_basis=2, mc_samples=1000),
}

_KNOWN_KEYS = {
    "model", "cells", "horizon", "steps", "sigma", "sigma1", "sigma2",
    "wce_order", "wce_basis", "wce_short_circuit", "mc_samples", "mc_seed",
    "mode", "sigma_scan", "output", "snapshot_times", "workers",
}

_MODES = ("wce", "mc", "both")


@dataclass
class ExperimentConfig:
    model: str
    cells: tuple[int, ...]
    horizon: float
    steps: int
    sigma: float
    sigma1: float | None = None
    sigma2: float | None = None
    wce_order: int = 1
    wce_basis: int = 1
    wce_short_circuit: bool = True
    mc_samples: int = 1
    mc_seed: int = 0
    mode: str = "wce"
    sigma_scan: tuple[float, ...] | None = None
    output: str = "out"
    snapshot_times: tuple[float, ...] | None = None
    workers: int = 1

    def __post_init__(self):
        if self.model not in _MODEL_DEFAULTS:
            raise ConfigError(f"model: unknown model {self.model!r}")
        variant = get_model(self.model)
        if len(self.cells) != variant.dim:
            raise ConfigError(
                f"cells: expected {variant.dim} axis counts for model {self.model}, "
                f"got {len(self.cells)}"
            )
        if any(c < 4 for c in self.cells):
            raise ConfigError("cells: need at least 4 cells per axis")
        if not self.horizon > 0:
            raise ConfigError("horizon: must be positive")
        if self.steps < 1:
            raise ConfigError("steps: must be positive")
        if self.sigma < 0:
            raise ConfigError("sigma: must be nonnegative")
        for name in ("sigma1", "sigma2"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ConfigError(f"{name}: must be nonnegative")
        if self.wce_order < 0:
            raise ConfigError("wce_order: must be nonnegative")
        if self.wce_basis < 1:
            raise ConfigError("wce_basis: must be positive")
        if self.mc_samples < 1:
            raise ConfigError("mc_samples: must be positive")
        if self.mc_seed < 0:
            raise ConfigError("mc_seed: must be nonnegative")
        if self.mode not in _MODES:
            raise ConfigError(f"mode: expected one of {_MODES}, got {self.mode!r}")
        if self.mode == "both" and self.mc_samples < 2:
            raise ConfigError("mc_samples: mode=both requires at least 2 samples")
        if self.workers < 1:
            raise ConfigError("workers: must be positive")
        if self.sigma_scan is not None and any(s < 0 for s in self.sigma_scan):
            raise ConfigError("sigma_scan: values must be nonnegative")

    # --- derived objects -------------------------------------------------

    def model_variant(self) -> ModelVariant:
        return get_model(self.model)

    def grid(self) -> GridSpec:
        return GridSpec(extent=self.model_variant().default_extent, cells=self.cells)

    def time_grid(self) -> TimeGrid:
        return TimeGrid(horizon=self.horizon, steps=self.steps)

    def basis(self) -> BasisSpec:
        return BasisSpec(self.horizon)

    def sigmas(self, sigma: float | None = None) -> tuple[float, ...]:
        """Per-channel noise amplitudes; ``sigma`` overrides for scan runs."""
        base = self.sigma if sigma is None else sigma
        variant = self.model_variant()
        if variant.num_channels == 1:
            return (base,)
        s1 = self.sigma1 if (self.sigma1 is not None and sigma is None) else base
        s2 = self.sigma2 if (self.sigma2 is not None and sigma is None) else base
        return (s1, s2)

    def truncation(self) -> TruncationSet:
        return enumerate_truncation(
            K=self.model_variant().num_channels, N=self.wce_order, I=self.wce_basis
        )


def _parse_bool(key: str, raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {raw!r}")


def _parse_tuple(key: str, raw: str, cast):
    try:
        return tuple(cast(part.strip()) for part in raw.split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"{key}: could not parse {raw!r}")


def parse_config(text: str) -> ExperimentConfig:
    """Parse a flat ``key = value`` document; unknown keys are rejected by name."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"duplicate key {key!r}")
        raw[key] = value.strip()

    if "model" not in raw:
        raise ConfigError("missing required key 'model'")
    model = raw.pop("model")
    if model not in _MODEL_DEFAULTS:
        raise ConfigError(f"model: unknown model {model!r}")
    defaults = _MODEL_DEFAULTS[model]

    kwargs: dict = {"model": model}
    if "cells" in raw:
        cells = _parse_tuple("cells", raw.pop("cells"), int)
        dim = get_model(model).dim
        if len(cells) == 1 and dim > 1:
            cells = cells * dim
        kwargs["cells"] = cells
    else:
        kwargs["cells"] = defaults["cells"]

    def take(key, cast, default):
        if key in raw:
            value = raw.pop(key)
            try:
                return cast(value)
            except ConfigError:
                raise
            except ValueError:
                raise ConfigError(f"{key}: could not parse {value!r}")
        return default

    kwargs["horizon"] = take("horizon", float, defaults["horizon"])
    kwargs["steps"] = take("steps", int, defaults["steps"])
    kwargs["sigma"] = take("sigma", float, defaults["sigma"])
    kwargs["sigma1"] = take("sigma1", float, None)
    kwargs["sigma2"] = take("sigma2", float, None)
    kwargs["wce_order"] = take("wce_order", int, defaults["wce_order"])
    kwargs["wce_basis"] = take("wce_basis", int, defaults["wce_basis"])
    kwargs["wce_short_circuit"] = take(
        "wce_short_circuit", lambda v: _parse_bool("wce_short_circuit", v), True
    )
    kwargs["mc_samples"] = take("mc_samples", int, defaults["mc_samples"])
    kwargs["mc_seed"] = take("mc_seed", int, 0)
    kwargs["mode"] = take("mode", str, "wce")
    kwargs["sigma_scan"] = take(
        "sigma_scan", lambda v: _parse_tuple("sigma_scan", v, float), None
    )
    kwargs["output"] = take("output", str, "out")
    kwargs["snapshot_times"] = take(
        "snapshot_times", lambda v: _parse_tuple("snapshot_times", v, float), None
    )
    kwargs["workers"] = take("workers", int, 1)
    return ExperimentConfig(**kwargs)


def emit_config(config: ExperimentConfig) -> str:
    """Serialize a config so that parse_config round-trips to an equal config."""
    lines = [f"model = {config.model}"]
    lines.append("cells = " + ",".join(str(c) for c in config.cells))
    lines.append(f"horizon = {config.horizon!r}")
    lines.append(f"steps = {config.steps}")
    lines.append(f"sigma = {config.sigma!r}")
    if config.sigma1 is not None:
        lines.append(f"sigma1 = {config.sigma1!r}")
    if config.sigma2 is not None:
        lines.append(f"sigma2 = {config.sigma2!r}")
    lines.append(f"wce_order = {config.wce_order}")
    lines.append(f"wce_basis = {config.wce_basis}")
    lines.append(f"wce_short_circuit = {str(config.wce_short_circuit).lower()}")
    lines.append(f"mc_samples = {config.mc_samples}")
    lines.append(f"mc_seed = {config.mc_seed}")
    lines.append(f"mode = {config.mode}")
    if config.sigma_scan is not None:
        lines.append("sigma_scan = " + ",".join(repr(s) for s in config.sigma_scan))
    lines.append(f"output = {config.output}")
    if config.snapshot_times is not None:
        lines.append("snapshot_times = " + ",".join(repr(t) for t in config.snapshot_times))
    lines.append(f"workers = {config.workers}")
    return "\n".join(lines) + "\n"


def config_to_dict(config: ExperimentConfig) -> dict:
    out = {}
    for f in fields(config):
        value = getattr(config, f.name)
        if isinstance(value, tuple):
            value = list(value)
        out[f.name] = value
    return out
