"""Configuration management for lattice-approx."""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Any, Dict, Literal, Optional

import yaml
from pydantic import BaseModel, Field

from ..utils.paths import get_config_path

logger = logging.getLogger(__name__)

CONFIG_ENV_VAR = "LATTICE_APPROX_CONFIG"
LOG_LEVEL_ENV_VAR = "LATTICE_APPROX_LOG_LEVEL"

# Load .env file automatically if python-dotenv is available
try:
    from dotenv import load_dotenv

    for env_path in (Path.cwd() / ".env", Path.home() / ".lattice-approx" / ".env"):
        if env_path.exists():
            load_dotenv(env_path, override=False)
            break
except ImportError:
    pass


class LatticeConfig(BaseModel):
    """Reconstructing-lattice search settings."""

    strategy: Literal["grow-M-random-z", "cbc"] = "grow-M-random-z"
    draws_per_size: int = Field(default=16, ge=1)
    growth_factor: float = Field(default=1.25, gt=1.0)
    max_attempts: int = Field(default=64, ge=1)
    cbc_scan_limit: int = Field(default=4096, ge=1)
    cache_path: Optional[str] = None
    use_cache: bool = True


class IndexSetConfig(BaseModel):
    """Size caps for frequency-set enumeration."""

    max_cardinality: int = Field(default=10**8, ge=1)
    max_pairs: int = Field(default=10**9, ge=1)
    onthefly_threshold: int = Field(default=30_000, ge=1)


class SweepDefaults(BaseModel):
    """Defaults applied to sweeps when the CLI does not override them."""

    R: int = Field(default=100_000, ge=1)
    seed: int = 1
    threads: Optional[int] = Field(default=None, ge=1)
    format: Literal["csv", "json"] = "csv"
    boundary_margin: float = Field(default=1e-12, ge=0.0, lt=0.5)


class Config(BaseModel):
    """Main configuration."""

    lattice: LatticeConfig = Field(default_factory=LatticeConfig)
    index_sets: IndexSetConfig = Field(default_factory=IndexSetConfig)
    sweep: SweepDefaults = Field(default_factory=SweepDefaults)
    log_level: str = Field(default_factory=lambda: os.environ.get(LOG_LEVEL_ENV_VAR, "WARNING"))


def merge_sections(defaults: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Overlay `overrides` on `defaults`, recursing into nested sections."""
    merged = dict(defaults)
    for key, value in overrides.items():
        current = merged.get(key)
        merged[key] = (
            merge_sections(current, value)
            if isinstance(current, dict) and isinstance(value, dict)
            else value
        )
    return merged


def resolve_config_path(config_path: Optional[str] = None) -> Path:
    """Explicit path > LATTICE_APPROX_CONFIG > ./lattice-approx.yaml > app directory."""
    if config_path:
        return Path(config_path)
    env_path = os.environ.get(CONFIG_ENV_VAR)
    if env_path:
        return Path(env_path).expanduser()
    local_path = Path.cwd() / "lattice-approx.yaml"
    return local_path if local_path.exists() else get_config_path("config.yaml")


class ConfigManager:
    """Loads, edits and saves the YAML configuration file."""

    def __init__(self, config_path: Optional[str] = None):
        self.path = resolve_config_path(config_path)
        self.config = self.load()

    def load(self) -> Config:
        """Read the file over the defaults; an unreadable or invalid file gives the defaults."""
        if not self.path.exists():
            return Config()
        try:
            data = yaml.safe_load(self.path.read_text(encoding="utf-8")) or {}
            return Config(**merge_sections(Config().model_dump(), data))
        except (OSError, yaml.YAMLError, ValueError, TypeError) as e:
            logger.warning(f"Ignoring config file {self.path}: {e}")
            return Config()

    def save(self, config: Optional[Config] = None) -> None:
        """Write the current configuration (or `config`) to the file."""
        self.config = config or self.config
        text = yaml.safe_dump(
            self.config.model_dump(mode="json", exclude_none=True), sort_keys=False
        )
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text(text, encoding="utf-8")
        except OSError as e:
            logger.warning(f"Could not write {self.path}: {e}")

    def get(self, key: str, default: Any = None) -> Any:
        """Value at a dot-notation key such as `lattice.strategy`."""
        node: Any = self.config.model_dump()
        for part in key.split("."):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return node

    def set(self, key: str, value: Any) -> None:
        """Set a dot-notation key.

        Raises:
            KeyError: for keys that are not part of the schema.
            ValueError: if the new value fails validation.
        """
        *sections, name = key.split(".")
        data = self.config.model_dump()
        node = data
        for part in sections:
            node = node.get(part)
            if not isinstance(node, dict):
                raise KeyError(f"Invalid config path: {key}")
        if name not in node:
            raise KeyError(f"Invalid config key: {key}")
        node[name] = value
        self.config = Config(**data)


def load_config(path: Optional[str] = None) -> Config:
    """Configuration from `path` or the default location."""
    return ConfigManager(path).config
