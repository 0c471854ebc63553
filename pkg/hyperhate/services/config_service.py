"""
Configuration service for training runs and model architectures.
"""

import copy
import json
import logging
import os
from typing import Any, Dict, List, Mapping, Optional, TypeVar, Union

from hyperhate.errors import SchemaError

logger = logging.getLogger(__name__)

# Generic type for default value
T = TypeVar('T')

ENV_PREFIX = "HYPERHATE_"

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off", ""}


def parse_flat_config(text: str, path: str = "<config>") -> Dict[str, str]:
    """
    Parse ``key=value`` lines. Blank lines and lines starting with ``#`` are skipped.

    Raises:
        SchemaError: If a line has no ``=``
    """
    values = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise SchemaError(f"expected key=value, got {line!r}", path, number)
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def coerce(value: Any, like: Any) -> Any:
    """
    Convert a string ``value`` to the type of ``like``; non-strings pass through.

    Lists are JSON arrays (as written to run_config.txt) or comma separated
    items; items take the type of the first element of ``like`` (strings
    when ``like`` is empty).
    """
    if not isinstance(value, str):
        return value
    if isinstance(like, bool):
        lowered = value.lower()
        if lowered in _TRUE:
            return True
        if lowered in _FALSE:
            return False
        raise ValueError(f"cannot read {value!r} as a boolean")
    if isinstance(like, int):
        return int(value)
    if isinstance(like, float):
        return float(value)
    if isinstance(like, list):
        if value.lstrip().startswith("["):
            items = json.loads(value)
        else:
            items = [item.strip() for item in value.split(",") if item.strip()]
        if like:
            return [coerce(item, like[0]) for item in items]
        return items
    if like is None and value == "":
        return None
    return value


class ConfigService:
    """
    Service for resolving run settings.

    Precedence, highest first: direct overrides (command-line flags),
    ``HYPERHATE_*`` environment variables, the user ``key=value`` file,
    then the JSON defaults shipped in ``config/defaults``.
    """

    def __init__(self,
                 config_path: Optional[str] = None,
                 config_override: Optional[Dict[str, Any]] = None,
                 environ: Optional[Mapping[str, str]] = None):
        """
        Initialize the ConfigService.

        Args:
            config_path: Path to a flat key=value configuration file (optional)
            config_override: Direct configuration override dictionary (optional)
            environ: Environment mapping; defaults to ``os.environ``
        """
        self.config_path = config_path
        self.config_override = {k: v for k, v in (config_override or {}).items() if v is not None}

        # Load configurations
        self.default_config = self._load_default_config()
        self.user_config = self._load_user_config() if config_path else {}
        self.env_config = self._load_env_config(os.environ if environ is None else environ)

    @staticmethod
    def _defaults_dir() -> str:
        base_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
        return os.path.join(base_dir, "config", "defaults")

    def _load_json(self, name: str) -> Dict[str, Any]:
        path = os.path.join(self._defaults_dir(), name)
        if not os.path.exists(path):
            logger.warning(f"Default configuration file missing: {path}")
            return {}
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)

    def _load_default_config(self) -> Dict[str, Any]:
        """
        Load default configuration from package files.

        Returns:
            Default configuration dictionary
        """
        return {
            "settings": self._load_json("train_defaults.json").get("settings", {}),
            "adapter_defaults": self._load_json("adapter_defaults.json"),
            "datasets": self._load_json("datasets.json"),
            "published": self._load_json("published_counts.json"),
        }

    def _known(self, key: str, source: str) -> bool:
        if key in self.default_config["settings"]:
            return True
        logger.warning(f"Ignoring unknown configuration key {key!r} from {source}")
        return False

    def _load_user_config(self) -> Dict[str, Any]:
        """
        Load the user key=value file.

        Returns:
            User configuration dictionary with values coerced to default types
        """
        if not os.path.exists(self.config_path):
            raise FileNotFoundError(f"configuration file not found: {self.config_path}")
        with open(self.config_path, "r", encoding="utf-8") as f:
            raw = parse_flat_config(f.read(), self.config_path)
        # run_config.txt carries the command name; it is not a setting
        raw.pop("command", None)
        return {k: self._coerce(k, v) for k, v in raw.items() if self._known(k, self.config_path)}

    def _load_env_config(self, environ: Mapping[str, str]) -> Dict[str, Any]:
        result = {}
        for name, value in environ.items():
            if not name.startswith(ENV_PREFIX):
                continue
            key = name[len(ENV_PREFIX):].lower()
            if self._known(key, f"environment variable {name}"):
                result[key] = self._coerce(key, value)
        return result

    def _coerce(self, key: str, value: Any) -> Any:
        return coerce(value, self.default_config["settings"].get(key))

    def _deep_merge(self, source: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
        """
        Deep merge two dictionaries, with override values taking precedence.
        """
        result = source.copy()

        for key, value in override.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = self._deep_merge(result[key], value)
            else:
                result[key] = value

        return result

    def get_value(self, key: str, default: T = None) -> Union[Any, T]:
        """
        Get a configuration value.

        Args:
            key: Configuration key to retrieve
            default: Default value if key is not found

        Returns:
            Configuration value or default if not found
        """
        if key in self.config_override:
            return self._coerce(key, self.config_override[key])
        if key in self.env_config:
            return self.env_config[key]
        if key in self.user_config:
            return self.user_config[key]
        if key in self.default_config["settings"]:
            return self.default_config["settings"][key]
        return default

    def settings(self) -> Dict[str, Any]:
        """All known settings, fully resolved."""
        return {key: self.get_value(key) for key in self.default_config["settings"]}

    def get_adapter_config(self, kind: str) -> Dict[str, Any]:
        """
        Get the architecture settings for a model kind.

        Args:
            kind: Model kind

        Returns:
            Shared defaults merged with the kind-specific section
        """
        adapter_defaults = self.default_config.get("adapter_defaults", {})
        config = adapter_defaults.get("default", {}) if kind != "cnngru" else {}
        if kind in adapter_defaults:
            config = self._deep_merge(config, adapter_defaults[kind])
        return copy.deepcopy(config)

    def get_dataset_info(self, name: str) -> Optional[Dict[str, Any]]:
        """Published size and hate fraction of a known corpus, or None."""
        return self.default_config.get("datasets", {}).get(name)

    def known_datasets(self) -> List[str]:
        return list(self.default_config.get("datasets", {}))

    def get_published(self, section: str) -> Dict[str, Any]:
        """A section of the published parameter counts ("layers", "aux", "totals", "model_sizes")."""
        return self.default_config.get("published", {}).get(section, {})
