"""TOML config files and option precedence: flags beat config beats env."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib


class ConfigError(ValueError):
    """Unreadable or malformed configuration file."""


def load_config(path: str | Path | None) -> dict:
    if path is None:
        return {}
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        return tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def config_get(config: dict, dotted: str, default: Any = None) -> Any:
    node: Any = config
    for part in dotted.split("."):
        if not isinstance(node, dict) or part not in node:
            return default
        node = node[part]
    return node


def resolve(
    flag: Any,
    config: dict,
    keys: str | tuple[str, ...],
    env: str | None = None,
    default: Any = None,
) -> Any:
    """First non-None wins: explicit flag, config keys in order, env, default."""
    if flag is not None:
        return flag
    if isinstance(keys, str):
        keys = (keys,)
    for key in keys:
        value = config_get(config, key)
        if value is not None:
            return value
    if env is not None:
        value = os.environ.get(env)
        if value is not None:
            return value
    return default


__all__ = ["ConfigError", "config_get", "load_config", "resolve"]
