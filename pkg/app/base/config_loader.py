"""
Dotted-key configuration: `section.key=value` lines (dotenv syntax) mapped
onto AppConfig. Later sources override earlier ones.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Union
from dotenv import dotenv_values
from pydantic import ValidationError
from app.base.exceptions import ConfigError
from app.constants.log_messages import LogMessages
from app.models.config_model import AppConfig


def parse_overrides(pairs: Optional[Iterable[str]]) -> Dict[str, str]:
    overrides = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise ConfigError(f"override '{pair}' is not of the form key=value")
        key, value = pair.split("=", 1)
        overrides[key.strip()] = value.strip()
    return overrides


def _nest(flat: Dict[str, Any]) -> Dict[str, Any]:
    nested: Dict[str, Any] = {}
    for key, value in flat.items():
        parts = key.split(".")
        if len(parts) < 2:
            raise ConfigError(f"config key '{key}' has no section prefix")
        node = nested
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"config key '{key}' collides with a scalar key")
        node[parts[-1]] = value
    return nested


def load_config(path: Optional[Union[str, Path]] = None,
                overrides: Optional[Dict[str, Any]] = None) -> AppConfig:
    flat: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"config file not found: {path}")
        flat.update({key: value for key, value in dotenv_values(path).items() if value is not None})
        logging.info(LogMessages.CONFIG_LOADED.format(path))
    flat.update(overrides or {})
    try:
        return AppConfig.model_validate(_nest(flat))
    except ValidationError as err:
        raise ConfigError(str(err)) from err


def flatten_config(config: AppConfig) -> Dict[str, Any]:
    """Effective config as dotted keys, for echoing into reports."""
    flat: Dict[str, Any] = {}

    def walk(prefix: str, value: Any) -> None:
        if isinstance(value, dict):
            for key, child in value.items():
                walk(f"{prefix}.{key}" if prefix else key, child)
        else:
            flat[prefix] = value

    walk("", json.loads(config.model_dump_json(by_alias=True)))
    return flat
