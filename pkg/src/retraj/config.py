"""
Run configuration assembled from defaults, a TOML file, RTK_-prefixed
environment variables, and command-line flags, in increasing order of
precedence.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .clustering import LINKAGES
from .ingest import DEFAULT_ACCEPT, DEFAULT_REJECT
from .model import RetrajError

ENV_PREFIX = "RTK_"
OM_MODES = ("normalized", "dss")
MODAL_MODES = ("dss", "normalized")
FLAVORS = ("issues", "commits")


class ConfigError(RetrajError):
    """Raised for unusable configuration values or files."""


@dataclass
class RunConfig:
    issues: Path | None = None
    commits: Path | None = None
    manifest: Path | None = None
    output_dir: Path = Path("retraj-out")
    accept: frozenset[str] = DEFAULT_ACCEPT
    reject: frozenset[str] = DEFAULT_REJECT
    positions: int = 100
    indel: float = 1.0
    k: int = 6
    min_size: int = 5
    om_mode: str = "normalized"
    modal_mode: str = "dss"
    linkage: str = "ward"
    flavor: str = "issues"

    def validate(self) -> None:
        if self.positions < 1:
            raise ConfigError(f"positions must be positive, got {self.positions}")
        if self.indel < 0:
            raise ConfigError(f"indel must be non-negative, got {self.indel}")
        if self.k < 1:
            raise ConfigError(f"k must be positive, got {self.k}")
        if self.min_size < 1:
            raise ConfigError(f"min_size must be positive, got {self.min_size}")
        if self.om_mode not in OM_MODES:
            raise ConfigError(f"om_mode must be one of {OM_MODES}, got {self.om_mode!r}")
        if self.modal_mode not in MODAL_MODES:
            raise ConfigError(f"modal_mode must be one of {MODAL_MODES}, got {self.modal_mode!r}")
        if self.linkage not in LINKAGES:
            raise ConfigError(f"linkage must be one of {LINKAGES}, got {self.linkage!r}")
        if self.flavor not in FLAVORS:
            raise ConfigError(f"flavor must be one of {FLAVORS}, got {self.flavor!r}")
        if not self.accept:
            raise ConfigError("accept set must not be empty")


_PATH_FIELDS = ("issues", "commits", "manifest", "output_dir")
_SET_FIELDS = ("accept", "reject")
_INT_FIELDS = ("positions", "k", "min_size")
_FLOAT_FIELDS = ("indel",)


def _coerce(name: str, value: Any, origin: str) -> Any:
    """Normalize one raw setting (TOML value or env string) to the
    field's type; raise ConfigError on junk."""
    try:
        if name in _PATH_FIELDS:
            if not isinstance(value, (str, Path)):
                raise ValueError("expected a path string")
            return Path(value)
        if name in _SET_FIELDS:
            if isinstance(value, str):
                parts = [p.strip() for p in value.split(",")]
            elif isinstance(value, (list, tuple)):
                parts = [str(p).strip() for p in value]
            else:
                raise ValueError("expected a list or comma-separated string")
            return frozenset(p.lower() for p in parts if p)
        if name in _INT_FIELDS:
            if isinstance(value, bool) or not isinstance(value, (int, str)):
                raise ValueError("expected an integer")
            return int(value)
        if name in _FLOAT_FIELDS:
            if isinstance(value, bool) or not isinstance(value, (int, float, str)):
                raise ValueError("expected a number")
            return float(value)
        return str(value)
    except ValueError as exc:
        raise ConfigError(f"{origin}: bad value for {name!r}: {exc}") from exc


def load_config(
    config_file: Path | None = None,
    env: Mapping[str, str] | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> RunConfig:
    """Merge the three configuration layers over the defaults.

    `overrides` holds already-typed command-line values; None entries
    mean "not given" and are skipped.
    """
    field_names = {f.name for f in fields(RunConfig)}
    settings: dict[str, Any] = {}

    if config_file is not None:
        try:
            raw = tomllib.loads(Path(config_file).read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {config_file}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"config file {config_file}: {exc}") from exc
        for key, value in raw.items():
            if key not in field_names:
                raise ConfigError(f"config file {config_file}: unknown setting {key!r}")
            settings[key] = _coerce(key, value, f"config file {config_file}")

    if env is None:
        env = os.environ
    for key, value in sorted(env.items()):
        if not key.startswith(ENV_PREFIX):
            continue
        name = key[len(ENV_PREFIX):].lower()
        if name not in field_names:
            raise ConfigError(f"unknown environment variable {key}")
        settings[name] = _coerce(name, value, f"environment variable {key}")

    if overrides:
        for name, value in overrides.items():
            if value is None:
                continue
            if name not in field_names:
                raise ConfigError(f"unknown override {name!r}")
            settings[name] = _coerce(name, value, "command line")

    config = RunConfig(**settings)
    config.validate()
    return config
