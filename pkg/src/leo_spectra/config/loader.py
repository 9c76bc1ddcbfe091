from __future__ import annotations

import json
import logging
from pathlib import Path
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from typing import Any

from platformdirs import user_config_dir
from pydantic import ValidationError

from leo_spectra.config.config import ExperimentSpec
from leo_spectra.utils.errors import ConfigError

logger = logging.getLogger(__name__)

APP_NAME = "leo-spectra"
CONFIG_FILE_NAME = "config.toml"
PROJECT_DIR_NAME = ".leo_spectra"


def get_config_dir() -> Path:
    return Path(user_config_dir(APP_NAME))


def get_system_config_path() -> Path:
    return get_config_dir() / CONFIG_FILE_NAME


def _parse_toml(path: Path) -> dict[str, Any]:
    try:
        with open(path, "rb") as f:
            return tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"Invalid TOML in {path}: {e}", config_file=str(path)) from e
    except OSError as e:
        raise ConfigError(f"Failed to read config file {path}: {e}", config_file=str(path)) from e


def _parse_json(path: Path) -> dict[str, Any]:
    try:
        content = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(
            f"Invalid JSON in {path} at line {e.lineno}, column {e.colno}: {e.msg}",
            config_file=str(path),
        ) from e
    except OSError as e:
        raise ConfigError(f"Failed to read config file {path}: {e}", config_file=str(path)) from e

    if not isinstance(content, dict):
        raise ConfigError("Experiment file must hold a JSON object", config_file=str(path))
    return content


def parse_config_file(path: Path) -> dict[str, Any]:
    """JSON unless the suffix says TOML"""
    if path.suffix.lower() == ".toml":
        return _parse_toml(path)
    return _parse_json(path)


def _get_project_config(cwd: Path) -> Path | None:
    config_file = cwd.resolve() / PROJECT_DIR_NAME / CONFIG_FILE_NAME
    if config_file.is_file():
        return config_file
    return None


def _merge_dicts(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    """Deep merge where values of `override` win"""
    result = base.copy()
    for key, value in override.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = _merge_dicts(result[key], value)
        else:
            result[key] = value
    return result


def _parse_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def parse_overrides(pairs: list[str] | tuple[str, ...]) -> dict[str, Any]:
    """Turn `a.b.c=value` strings into a nested dict"""
    result: dict[str, Any] = {}
    for pair in pairs:
        key, sep, raw = pair.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"Override must look like key=value, got '{pair}'", config_key=key or None)

        node = result
        parts = key.split(".")
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError(f"Override '{key}' conflicts with another override", config_key=key)
            node = child
        node[parts[-1]] = _parse_value(raw.strip())
    return result


def _format_validation_error(error: ValidationError) -> str:
    lines = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "<root>"
        lines.append(f"{location}: {item['msg']}")
    return "; ".join(lines)


def load_config(
    cwd: Path | None = None,
    config_path: Path | None = None,
    overrides: list[str] | tuple[str, ...] = (),
    command: str | None = None,
) -> ExperimentSpec:
    """Resolve an experiment from user, project and experiment files plus command-line overrides"""
    cwd = cwd or Path.cwd()
    config_dict: dict[str, Any] = {}

    system_path = get_system_config_path()
    if system_path.is_file():
        try:
            config_dict = _parse_toml(system_path)
        except ConfigError:
            logger.warning(f"Skipping invalid user config: {system_path}")

    project_path = _get_project_config(cwd)
    if project_path:
        try:
            config_dict = _merge_dicts(config_dict, _parse_toml(project_path))
        except ConfigError:
            logger.warning(f"Skipping invalid project config: {project_path}")

    source = None
    if config_path is not None:
        config_dict = _merge_dicts(config_dict, parse_config_file(config_path))
        source = str(config_path)

    if overrides:
        config_dict = _merge_dicts(config_dict, parse_overrides(overrides))
    if command is not None:
        config_dict["command"] = command

    try:
        spec = ExperimentSpec(**config_dict)
    except ValidationError as e:
        raise ConfigError(
            f"Invalid configuration: {_format_validation_error(e)}", config_file=source
        ) from e

    logger.debug(f"Resolved configuration for {spec.command.value}")
    return spec
