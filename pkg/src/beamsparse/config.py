"""Experiment configuration: JSON schema, validation, defaults.

One JSON document describes one experiment. Unset fields fall back to the
defaults below (30 half-wavelength elements, 1-degree grid over the visible
region, lam 0.1, rho 30, eta 1e-8). The JSON key for the trade-off weight is
"lambda"; it maps to the ``lam`` attribute because ``lambda`` is reserved in
Python.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import ConfigurationError
from .templates import MainlobeSpec

_LOBE_KEYS = {"start_deg", "end_deg", "level"}

# JSON key -> attribute name (identity except for the reserved word).
_KEY_TO_ATTR = {"lambda": "lam"}
_ATTR_TO_KEY = {v: k for k, v in _KEY_TO_ATTR.items()}


@dataclass(frozen=True)
class ExperimentConfig:
    n_elements: int = 30
    spacing_ratio: float = 0.5
    grid_start_deg: float = -90.0
    grid_stop_deg: float = 90.0
    grid_step_deg: float = 1.0
    mainlobes: tuple[MainlobeSpec, ...] = ()
    sidelobe_level: float = 0.0
    lam: float = 0.1
    rho: float = 30.0
    eta: float = 1e-8
    max_iters: int = 1000
    seed: int = 0
    cardinality_threshold: float = 1e-3
    output_dir: str = "."

    def __post_init__(self):
        _validate(self)

    def with_overrides(self, **kwargs) -> "ExperimentConfig":
        """Copy with selected fields replaced (revalidates)."""
        return replace(self, **kwargs)


def _require(condition: bool, message: str):
    if not condition:
        raise ConfigurationError(message)


def _validate(cfg: ExperimentConfig):
    _require(isinstance(cfg.n_elements, int) and not isinstance(cfg.n_elements, bool)
             and cfg.n_elements >= 2, "n_elements must be an integer >= 2")
    _require(cfg.spacing_ratio > 0, "spacing_ratio must be positive")
    _require(cfg.grid_step_deg > 0, "grid_step_deg must be positive")
    _require(cfg.grid_start_deg < cfg.grid_stop_deg,
             "grid_start_deg must be below grid_stop_deg")
    _require(cfg.grid_start_deg >= -90.0 and cfg.grid_stop_deg <= 90.0,
             "grid must lie within [-90, 90] degrees")
    _require(len(cfg.mainlobes) > 0, "mainlobes must contain at least one lobe")
    _require(all(isinstance(lobe, MainlobeSpec) for lobe in cfg.mainlobes),
             "mainlobes must be MainlobeSpec entries")
    _require(cfg.sidelobe_level >= 0, "sidelobe_level must be >= 0")
    _require(cfg.lam > 0, "lambda must be positive")
    _require(cfg.rho > 2, "rho must exceed 2")
    _require(cfg.eta > 0, "eta must be positive")
    _require(isinstance(cfg.max_iters, int) and not isinstance(cfg.max_iters, bool)
             and cfg.max_iters >= 0, "max_iters must be an integer >= 0")
    _require(isinstance(cfg.seed, int) and not isinstance(cfg.seed, bool),
             "seed must be an integer")
    _require(0 < cfg.cardinality_threshold < 1,
             "cardinality_threshold must lie in (0, 1)")
    _require(isinstance(cfg.output_dir, str) and cfg.output_dir != "",
             "output_dir must be a non-empty string")


def _as_number(key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"{key} must be a number")
    return float(value)


def _as_int(key: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigurationError(f"{key} must be an integer")
    return value


def _parse_lobe(index: int, raw) -> MainlobeSpec:
    if not isinstance(raw, dict):
        raise ConfigurationError(f"mainlobes[{index}] must be an object")
    unknown = set(raw) - _LOBE_KEYS
    if unknown:
        raise ConfigurationError(f"mainlobes[{index}] has unknown field '{sorted(unknown)[0]}'")
    for key in ("start_deg", "end_deg"):
        if key not in raw:
            raise ConfigurationError(f"mainlobes[{index}] is missing '{key}'")
    kwargs = {key: _as_number(f"mainlobes[{index}].{key}", raw[key]) for key in raw}
    return MainlobeSpec(**kwargs)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate one JSON experiment document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(
            f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise ConfigurationError("config document must be a JSON object")

    known = {_ATTR_TO_KEY.get(f.name, f.name) for f in fields(ExperimentConfig)}
    unknown = set(doc) - known
    if unknown:
        raise ConfigurationError(f"unknown config field '{sorted(unknown)[0]}'")

    kwargs = {}
    for key, value in doc.items():
        attr = _KEY_TO_ATTR.get(key, key)
        if key == "mainlobes":
            if not isinstance(value, list):
                raise ConfigurationError("mainlobes must be a list")
            kwargs[attr] = tuple(_parse_lobe(i, lobe) for i, lobe in enumerate(value))
        elif key in ("n_elements", "max_iters", "seed"):
            kwargs[attr] = _as_int(key, value)
        elif key == "output_dir":
            if not isinstance(value, str):
                raise ConfigurationError("output_dir must be a string")
            kwargs[attr] = value
        else:
            kwargs[attr] = _as_number(key, value)
    return ExperimentConfig(**kwargs)


def config_to_dict(cfg: ExperimentConfig) -> dict:
    """Resolved config as a JSON-ready dict (uses the \"lambda\" key)."""
    out = {}
    for f in fields(ExperimentConfig):
        key = _ATTR_TO_KEY.get(f.name, f.name)
        value = getattr(cfg, f.name)
        if f.name == "mainlobes":
            value = [
                {"start_deg": lobe.start_deg, "end_deg": lobe.end_deg, "level": lobe.level}
                for lobe in value
            ]
        out[key] = value
    return out


def serialize_config(cfg: ExperimentConfig) -> str:
    """Inverse of parse_config: parse_config(serialize_config(cfg)) == cfg."""
    return json.dumps(config_to_dict(cfg), indent=2) + "\n"


def load_config(path: str | Path) -> ExperimentConfig:
    """Read and parse a config file."""
    return parse_config(Path(path).read_text(encoding="utf-8"))
