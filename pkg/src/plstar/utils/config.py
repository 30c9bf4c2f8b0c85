"""
Loading ``plstar.toml`` and applying command-line overrides.
"""

import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from loguru import logger
from pydantic import ValidationError

from ..errors import ConfigError
from ..interp.semantics import Domain
from ..resources.schemas import PlstarConfig

CONFIG_FILE = "plstar.toml"

_DOMAIN_FLAG = re.compile(r"^(int|array|array-values|array-len):(-?\d+)\.\.(-?\d+)$")


def load_config(path: Union[str, Path, None] = None) -> PlstarConfig:
    """Read the configuration file.

    Without ``path`` the file is ``plstar.toml`` in the working directory, and a
    missing file means defaults. An explicit path must exist.

    Raises:
        ConfigError: unreadable file, invalid TOML or invalid values
    """
    explicit = path is not None
    source = Path(path) if explicit else Path.cwd() / CONFIG_FILE
    if not source.is_file():
        if explicit:
            raise ConfigError(f"config file not found: {source}")
        logger.debug(f"No {CONFIG_FILE}, using defaults")
        return PlstarConfig()
    try:
        raw = tomllib.loads(source.read_text(encoding="utf-8"))
    except (OSError, tomllib.TOMLDecodeError) as e:
        raise ConfigError(f"cannot read {source}: {e}") from e
    # relative signature paths resolve against the config file
    sigs = raw.get("signatures")
    if isinstance(sigs, str) and not Path(sigs).is_absolute():
        raw["signatures"] = str(source.parent / sigs)
    config = _validated(raw, str(source))
    logger.debug(f"Loaded configuration from {source}")
    return config


def _validated(raw: Mapping[str, Any], origin: str) -> PlstarConfig:
    try:
        return PlstarConfig.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first["loc"]) or "config"
        raise ConfigError(f"{origin}: {where}: {first['msg']}") from e


def parse_domain_flag(text: str) -> Dict[str, int]:
    """Parse ``int:-8..8``, ``array-values:1..5`` or ``array-len:0..4`` into DomainConfig fields.

    ``array:`` is a synonym for ``array-values:``.
    """
    match = _DOMAIN_FLAG.match(text.strip())
    if match is None:
        raise ConfigError(f"bad domain flag {text!r}; expected e.g. int:-8..8, array-values:1..5, array-len:0..4")
    kind, lo, hi = match.group(1), int(match.group(2)), int(match.group(3))
    if lo > hi:
        raise ConfigError(f"empty range in domain flag {text!r}")
    if kind == "int":
        return {"int_min": lo, "int_max": hi}
    if kind == "array-len":
        return {"array_min": lo, "array_max": hi}
    return {"array_min_value": lo, "array_max_value": hi}


def merge_overrides(config: PlstarConfig, overrides: Mapping[str, Any]) -> PlstarConfig:
    """A new configuration with flag values layered over ``config``.

    ``None`` values are ignored; ``domain`` and ``fuel`` merge field by field.
    """
    data = config.model_dump()
    for key, value in overrides.items():
        if value is None:
            continue
        if key in ("domain", "fuel"):
            data[key].update({k: v for k, v in value.items() if v is not None})
        else:
            data[key] = value
    return _validated(data, "command line")


def overlay_domain(domain: Domain, overrides: Mapping[str, int]) -> Domain:
    """``domain`` with the DomainConfig fields in ``overrides`` replaced; other bounds are kept."""
    if not overrides:
        return domain
    lo, hi = domain.int_range
    vlo, vhi = domain.array_values
    return replace(
        domain,
        int_range=(overrides.get("int_min", lo), overrides.get("int_max", hi)),
        array_min=overrides.get("array_min", domain.array_min),
        array_max=overrides.get("array_max", domain.array_max),
        array_values=(overrides.get("array_min_value", vlo), overrides.get("array_max_value", vhi)),
    )
