import json
import logging

from pydantic import ValidationError

from hlflock.utils.config.config import SimConfig
from hlflock.utils.errors import ConfigError
from hlflock.utils.extension import CONFIG_EXTENSIONS, get_file_extension, is_config_file

logger = logging.getLogger(__name__)


def _describe(error: ValidationError):
    parts = []
    for item in error.errors():
        where = ".".join(str(piece) for piece in item["loc"]) or "config"
        parts.append(f"{where}: {item['msg']}")
    return "; ".join(parts)


def parse_config(data) -> SimConfig:
    """
    Validates a configuration mapping.

    Args:
        data (dict): Decoded configuration document.

    Returns:
        SimConfig: The validated configuration.
    """
    try:
        return SimConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(_describe(e)) from e


# Function to load a configuration file based on its extension
def load_config(config_path) -> SimConfig:
    """
    Reads and validates a configuration file.

    Args:
        config_path (str): Path to the configuration document.

    Returns:
        SimConfig: The validated configuration.
    """
    if not is_config_file(config_path):
        raise ConfigError(
            f"unsupported config type '{get_file_extension(config_path)}', expected one of {CONFIG_EXTENSIONS}"
        )
    try:
        with open(config_path, "r") as f:
            data = json.load(f)
    except OSError as e:
        logger.error(f"Error reading config: {e}")
        raise ConfigError(f"cannot read {config_path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{config_path} is not valid JSON: {e}") from e
    return parse_config(data)


def dump_config(config: SimConfig):
    """JSON-ready mapping; ``parse_config(dump_config(c)) == c``."""
    return config.model_dump(mode="json")


def apply_overrides(config: SimConfig, overrides) -> SimConfig:
    """
    Replaces fields addressed by dotted paths (``"model.p"``, ``"h"``) and
    re-validates the result.

    Args:
        config (SimConfig): Base configuration.
        overrides (dict): ``{dotted path: value}``.

    Returns:
        SimConfig: The updated configuration.
    """
    data = dump_config(config)
    for path, value in overrides.items():
        node = data
        keys = path.split(".")
        for key in keys[:-1]:
            if not isinstance(node.get(key), dict):
                raise ConfigError(f"unknown config path '{path}'")
            node = node[key]
        if keys[-1] not in node:
            raise ConfigError(f"unknown config path '{path}'")
        node[keys[-1]] = value
    return parse_config(data)
