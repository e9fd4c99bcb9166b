"""Named experiment configurations shipped with the package."""
from __future__ import annotations

import json
from importlib import resources

from .config import ExperimentConfig, parse_config
from .exceptions import ConfigError


def preset_names() -> list[str]:
    files = resources.files(__package__).joinpath("presets").iterdir()
    return sorted(f.name[:-5] for f in files if f.name.endswith(".json"))


def preset_dict(name: str) -> dict:
    if name not in preset_names():
        raise ConfigError(f"unknown preset {name!r}; available: {preset_names()}")
    text = resources.files(__package__).joinpath("presets", f"{name}.json").read_text(encoding="utf-8")
    return json.loads(text)


def load_preset(name: str) -> ExperimentConfig:
    """Parse and validate the preset ``name`` (e.g. ``"paper-ideal"``)."""
    return parse_config(preset_dict(name))
