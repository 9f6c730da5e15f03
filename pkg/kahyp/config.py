import os
import logging
from typing import Dict

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator

# Configure root logger if not already set
if not logging.getLogger().handlers:
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    )

logger = logging.getLogger("kahyp")
logger.setLevel(logging.INFO)

DEFAULT_CONFIG_FILE = os.path.join("config", "config.yml")


class ConfigModel(BaseModel):
    variant: str = "th"
    max_rounds: int = Field(32, ge=1)
    max_states: int = Field(10_000, ge=1)
    determinize_budget: int = Field(100_000, ge=1)
    max_expr_size: int = Field(50_000, ge=1)
    oracle_len: int = Field(6, ge=0)
    oracle_slack: int = Field(4, ge=0)
    output_format: str = "text"
    log_level: str = "INFO"

    @field_validator("variant")
    @classmethod
    def validate_variant(cls, v: str) -> str:
        v = v.lower()
        if v not in {"t0", "th"}:
            raise ValueError("variant must be 't0' or 'th'")
        return v

    @field_validator("output_format")
    @classmethod
    def validate_output_format(cls, v: str) -> str:
        v = v.lower()
        if v not in {"text", "json"}:
            raise ValueError("output_format must be 'text' or 'json'")
        return v

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        v = v.upper()
        if v not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level {v!r}")
        return v


# environment variable -> config key
_ENV_KEYS = {
    "KAHYP_VARIANT": "variant",
    "KAHYP_MAX_ROUNDS": "max_rounds",
    "KAHYP_MAX_STATES": "max_states",
    "KAHYP_DETERMINIZE_BUDGET": "determinize_budget",
    "KAHYP_MAX_EXPR_SIZE": "max_expr_size",
    "KAHYP_ORACLE_LEN": "oracle_len",
    "KAHYP_ORACLE_SLACK": "oracle_slack",
    "KAHYP_LOG_LEVEL": "log_level",
}


def _apply_file_config(config: Dict, file_config: Dict) -> None:
    if "closure" in file_config and isinstance(file_config["closure"], dict):
        for key, value in file_config["closure"].items():
            if key == "variant":
                config["variant"] = str(value)
            elif key == "max_rounds":
                config["max_rounds"] = value
            elif key == "max_states":
                config["max_states"] = value
            elif key == "determinize_budget":
                config["determinize_budget"] = value
            elif key == "max_expr_size":
                config["max_expr_size"] = value
            else:
                logger.warning("Ignoring unknown closure setting '%s'", key)

    if "oracle" in file_config and isinstance(file_config["oracle"], dict):
        for key, value in file_config["oracle"].items():
            if key == "len":
                config["oracle_len"] = value
            elif key == "slack":
                config["oracle_slack"] = value
            else:
                logger.warning("Ignoring unknown oracle setting '%s'", key)

    if "output" in file_config and isinstance(file_config["output"], dict):
        if "format" in file_config["output"]:
            config["output_format"] = str(file_config["output"]["format"])

    if "logging" in file_config and isinstance(file_config["logging"], dict):
        if "level" in file_config["logging"]:
            config["log_level"] = str(file_config["logging"]["level"])


def _load_config() -> Dict:
    """Load settings from defaults, the YAML config file and the environment.

    The environment wins over the file so a single run can raise a budget
    (``KAHYP_MAX_STATES=50000 kahyp reduce ...``) without editing config.
    """
    config: Dict = ConfigModel().model_dump()

    config_file = os.environ.get("CONFIG_FILE", DEFAULT_CONFIG_FILE)
    if os.path.exists(config_file):
        try:
            with open(config_file, "r") as f:
                file_config = yaml.safe_load(f)
            if file_config and isinstance(file_config, dict):
                _apply_file_config(config, file_config)
        except (yaml.YAMLError, IOError) as e:
            logger.error(f"Error loading config file: {e}")

    for env_name, key in _ENV_KEYS.items():
        value = os.environ.get(env_name)
        if value is not None and value.strip():
            config[key] = value.strip()

    try:
        validated = ConfigModel(**config)
    except ValidationError as e:
        raise ValueError(f"Invalid configuration: {e}")

    result = validated.model_dump()
    logger.setLevel(result["log_level"])
    logger.debug("Configuration loaded: %s", result)
    return result


__all__ = ["ConfigModel", "DEFAULT_CONFIG_FILE", "_load_config", "logger"]
