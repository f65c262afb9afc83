"""
fieldcover - coverage path planning for agricultural fields with obstacles.

Configuration loader for loading and validating config.yaml.
"""

import logging
import os
import re
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import yaml
from dotenv import load_dotenv
from pydantic import ValidationError
from rich.console import Console

from fieldcover.config.schema import FieldCoverConfig

logger = logging.getLogger(__name__)
console = Console(stderr=True)

# Default paths
DEFAULT_CONFIG_PATH = Path(__file__).parent.parent.parent / "config.yaml"
USER_CONFIG_DIR = Path.home() / ".fieldcover"
USER_CONFIG_PATH = USER_CONFIG_DIR / "config.yaml"

_ENV_PATTERN = re.compile(r"\$\{([^}^{]+)\}|\$([a-zA-Z0-9_]+)")


def _expand_env_vars(value: Any) -> Any:
    """
    Expand ${VAR} and $VAR references in a string, reading .env first.

    Non-string values are returned unchanged.
    """
    if not isinstance(value, str):
        return value

    try:
        dotenv_path = Path.cwd() / ".env"
        if dotenv_path.exists():
            load_dotenv(dotenv_path)
    except OSError:
        # working directory may have vanished
        pass

    return _ENV_PATTERN.sub(
        lambda match: os.environ.get(match.group(1) or match.group(2), ""), value
    )


def _process_config_dict(config_dict: Dict) -> Dict:
    """
    Expand environment variables in every string of a configuration tree.

    Args:
        config_dict: Dictionary containing configuration

    Returns:
        Processed dictionary with environment variables expanded
    """
    result = {}
    for key, value in config_dict.items():
        if isinstance(value, dict):
            result[key] = _process_config_dict(value)
        elif isinstance(value, list):
            result[key] = [
                _process_config_dict(item) if isinstance(item, dict) else _expand_env_vars(item)
                for item in value
            ]
        else:
            result[key] = _expand_env_vars(value)
    return result


def _find_config_file() -> Path:
    """
    Find the configuration file to use.

    Returns:
        Path to the configuration file

    Raises:
        FileNotFoundError: If no candidate exists
    """
    local_config = Path.cwd() / ".fieldcover" / "config.yaml"
    if local_config.exists():
        return local_config

    if USER_CONFIG_PATH.exists():
        return USER_CONFIG_PATH

    if DEFAULT_CONFIG_PATH.exists():
        return DEFAULT_CONFIG_PATH

    raise FileNotFoundError("Could not find a configuration file")


def load_config(config_path: Optional[Union[str, Path]] = None) -> FieldCoverConfig:
    """
    Load and validate the fieldcover configuration.

    Args:
        config_path: Optional path to the configuration file

    Returns:
        Validated FieldCoverConfig object

    Raises:
        FileNotFoundError: If an explicit path does not exist
        yaml.YAMLError: If the file is not valid YAML
        ValidationError: If the content does not match the schema
    """
    if config_path is None:
        try:
            config_path = _find_config_file()
        except FileNotFoundError as e:
            console.print(f"[yellow]Warning:[/yellow] {e}")
            console.print("Using default configuration")
            return FieldCoverConfig()
    else:
        config_path = Path(config_path)

    try:
        with open(config_path, "r") as f:
            config_dict = yaml.safe_load(f) or {}
        config = FieldCoverConfig(**_process_config_dict(config_dict))
        logger.debug("loaded configuration from %s", config_path)
        return config

    except FileNotFoundError:
        console.print(f"[red]Error:[/red] Configuration file not found: {config_path}")
        raise
    except yaml.YAMLError as e:
        console.print(f"[red]Error:[/red] Failed to parse YAML: {e}")
        raise
    except ValidationError as e:
        console.print(f"[red]Error:[/red] Configuration validation failed: {e}")
        raise


def get_config_value(config: FieldCoverConfig, key_path: str) -> Tuple[Any, str]:
    """
    Get a configuration value by its dot-notation path.

    Args:
        config: The FieldCoverConfig object
        key_path: Dot-notation path (e.g., "planner.exact_threshold")

    Returns:
        Tuple of (value, type name)

    Raises:
        KeyError: If the path does not exist
    """
    current: Any = config.model_dump(mode="json")
    try:
        for key in key_path.split("."):
            current = current[key]
    except (KeyError, TypeError):
        raise KeyError(f"Key '{key_path}' not found in configuration")
    return current, type(current).__name__


def set_config_value(config_dict: Dict, key_path: str, value: str) -> Dict:
    """
    Set a configuration value by its dot-notation path.

    The string is parsed as a YAML scalar, so "true", "12", "0.5" and
    "null" get their natural types. The result is validated against the
    schema before it is returned.

    Args:
        config_dict: The configuration dictionary
        key_path: Dot-notation path to the configuration value
        value: The string value to set

    Returns:
        Updated configuration dictionary

    Raises:
        ValueError: If the new value does not validate
    """
    keys = key_path.split(".")
    current = config_dict
    for key in keys[:-1]:
        if not isinstance(current.get(key), dict):
            current[key] = {}
        current = current[key]

    try:
        current[keys[-1]] = yaml.safe_load(value)
    except yaml.YAMLError:
        current[keys[-1]] = value

    try:
        FieldCoverConfig(**config_dict)
    except ValidationError as e:
        raise ValueError(f"Invalid value for '{key_path}': {value} ({e.error_count()} error(s))")
    return config_dict


def save_config(
    config: Union[FieldCoverConfig, Dict], config_path: Optional[Union[str, Path]] = None
) -> Path:
    """
    Save the configuration to a file.

    Args:
        config: The FieldCoverConfig object or dictionary to save
        config_path: Optional path to save the configuration (default: use _find_config_file())

    Returns:
        Path to the saved configuration file
    """
    if config_path is None:
        try:
            config_path = _find_config_file()
        except FileNotFoundError:
            config_path = USER_CONFIG_PATH
            USER_CONFIG_DIR.mkdir(exist_ok=True, parents=True)
    else:
        config_path = Path(config_path)
        config_path.parent.mkdir(exist_ok=True, parents=True)

    if isinstance(config, FieldCoverConfig):
        config_dict = config.model_dump(mode="json")
    else:
        config_dict = config

    with open(config_path, "w") as f:
        yaml.dump(config_dict, f, default_flow_style=False, sort_keys=False)
    return config_path
