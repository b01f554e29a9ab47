"""Experiment configuration: one JSON file, overridden by CLI flags."""

from __future__ import annotations

import json
from pathlib import Path

from .errors import InvalidModelError, TreeGibbsError
from .model import EnergyModel

__all__ = ["ConfigError", "load_config", "model_from_config", "DEFAULT_MODEL"]

# Documented default model (uniform Gibbs weights on binary-capped trees).
DEFAULT_MODEL = {"D": 2, "E": [0.0, 0.0, 0.0], "beta": 0.0}


class ConfigError(TreeGibbsError, ValueError):
    """Malformed configuration file or option (CLI exit 2)."""


def load_config(path) -> dict:
    """Parse the JSON config file; an absent path yields an empty config."""
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def model_from_config(cfg: dict, overrides: dict = None) -> EnergyModel:
    """Build the energy model from the config's `model` block plus overrides
    (flags win).  Validation failures surface as InvalidModelError."""
    block = dict(cfg.get("model", DEFAULT_MODEL))
    if not isinstance(block, dict):
        raise ConfigError("`model` must be an object with keys D, E, beta")
    for key, value in (overrides or {}).items():
        if value is not None:
            block[key] = value
    try:
        D = int(block["D"])
        E = [float(e) for e in block["E"]]
        beta = float(block.get("beta", 0.0))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidModelError(f"bad model block {block!r}: {exc}") from exc
    return EnergyModel(D=D, E=tuple(E), beta=beta)
