"""Configuration package for seqforge.

Provides the default training configuration, named presets that inherit
from it, sweep grids and synthetic-data generator specs.

Usage:
    from seqforge.configs import load_preset, list_presets

    # List available presets
    presets = list_presets()

    # Load a preset merged over the base configuration
    config = load_preset("quick_test")
"""

from pathlib import Path
from typing import Any, Dict, List, Union

import yaml

from seqforge.core.base import TrainingConfig
from seqforge.core.exceptions import ConfigError

CONFIGS_DIR = Path(__file__).parent
PRESETS_DIR = CONFIGS_DIR / "presets"
GRIDS_DIR = CONFIGS_DIR / "grids"
GENERATORS_DIR = CONFIGS_DIR / "generators"

# Keys describing a file rather than configuring training
_META_KEYS = ("_base", "preset")


def _read_yaml(path: Path) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        try:
            values = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"cannot parse {path}: {e}") from None
    if not isinstance(values, dict):
        raise ConfigError(f"{path} must contain a mapping")
    return values


def _parse_key_values(path: Path, text: str) -> Dict[str, Any]:
    """Parse ``key = value`` lines; values are typed by YAML scalar rules."""
    values: Dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        try:
            values[key] = yaml.safe_load(value.strip()) if value.strip() else None
        except yaml.YAMLError as e:
            raise ConfigError(f"{path}:{lineno}: cannot parse value for {key!r}: {e}") from None
    return values


def _read_config_file(path: Path) -> Dict[str, Any]:
    """Read a YAML mapping, falling back to flat ``key = value`` text."""
    text = path.read_text(encoding="utf-8")
    try:
        values = yaml.safe_load(text)
    except yaml.YAMLError:
        return _parse_key_values(path, text)
    if isinstance(values, dict):
        return values
    if values is None:
        return {}
    return _parse_key_values(path, text)


def _strip_meta(values: Dict[str, Any]) -> Dict[str, Any]:
    return {k: v for k, v in values.items() if k not in _META_KEYS}


def load_base_config() -> Dict[str, Any]:
    """Load the base configuration.

    Returns
    -------
    Dict[str, Any]
        Flat configuration dictionary.
    """
    base_path = CONFIGS_DIR / "base.yaml"
    if not base_path.exists():
        return {}
    return _strip_meta(_read_yaml(base_path))


def load_preset(name: str, include_base: bool = True) -> Dict[str, Any]:
    """Load a preset with base inheritance.

    Parameters
    ----------
    name : str
        Preset name (without .yaml extension).
    include_base : bool
        When False, return only the values the preset itself sets.

    Returns
    -------
    Dict[str, Any]
        Merged configuration dictionary.

    Raises
    ------
    FileNotFoundError
        If the preset file doesn't exist.
    """
    preset_path = PRESETS_DIR / f"{name}.yaml"
    if not preset_path.exists():
        raise FileNotFoundError(f"Preset not found: {preset_path}")
    values = _strip_meta(_read_yaml(preset_path))
    return _deep_merge(load_base_config(), values) if include_base else values


def load_config_file(path: Union[str, Path], include_base: bool = True) -> Dict[str, Any]:
    """Load a user config file.

    The file is a YAML mapping or flat ``key = value`` text, one pair per
    line with ``#`` comments. The file's values are merged over the base configuration unless
    ``include_base`` is False.

    Raises
    ------
    FileNotFoundError
        If the file doesn't exist.
    ConfigError
        If it is neither a YAML mapping nor ``key = value`` text.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Config not found: {path}")
    values = _strip_meta(_read_config_file(path))
    return _deep_merge(load_base_config(), values) if include_base else values


def resolve_config(values: Dict[str, Any]) -> TrainingConfig:
    """Turn a merged mapping into a validated ``TrainingConfig``."""
    return TrainingConfig.from_dict(values).validate()


def grid_path(name: str) -> Path:
    """Path of a shipped sweep grid."""
    path = GRIDS_DIR / f"{name}.yaml"
    if not path.exists():
        raise FileNotFoundError(f"Grid not found: {path}")
    return path


def generator_path(name: str) -> Path:
    """Path of a shipped generator spec."""
    path = GENERATORS_DIR / f"{name}.yaml"
    if not path.exists():
        raise FileNotFoundError(f"Generator spec not found: {path}")
    return path


def _list(directory: Path) -> List[str]:
    if not directory.exists():
        return []
    return sorted(f.stem for f in directory.glob("*.yaml"))


def list_presets() -> List[str]:
    """List available presets."""
    return _list(PRESETS_DIR)


def list_grids() -> List[str]:
    """List shipped sweep grids."""
    return _list(GRIDS_DIR)


def list_generators() -> List[str]:
    """List shipped generator specs."""
    return _list(GENERATORS_DIR)


def _deep_merge(base: Dict, override: Dict) -> Dict:
    """Deep merge two dictionaries.

    Parameters
    ----------
    base : Dict
        Base dictionary.
    override : Dict
        Override dictionary (values take precedence).

    Returns
    -------
    Dict
        Merged dictionary.
    """
    result = base.copy()
    for key, value in override.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = _deep_merge(result[key], value)
        else:
            result[key] = value
    return result


__all__ = [
    "load_base_config",
    "load_preset",
    "load_config_file",
    "resolve_config",
    "grid_path",
    "generator_path",
    "list_presets",
    "list_grids",
    "list_generators",
    "CONFIGS_DIR",
    "PRESETS_DIR",
    "GRIDS_DIR",
    "GENERATORS_DIR",
]
