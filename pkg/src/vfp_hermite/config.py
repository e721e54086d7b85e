"""Flat sectioned key-value configuration files.

The format is one `key = value` pair per line grouped under `[section]`
headers; the full key is "section.key".  There is no nesting and no
interpolation.  Unknown keys are rejected so a typo in a sweep cannot
silently fall back to a default.
"""

from __future__ import annotations

import math


class ConfigError(ValueError):
    """Parse or validation failure with file/line context."""


def parse_flat_config(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse sectioned key=value text into a flat {"section.key": raw} map."""
    entries: dict[str, str] = {}
    section = None
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if not section:
                raise ConfigError(f"{source}:{lineno}: empty section name")
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw_line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        full_key = f"{section}.{key}" if section else key
        if full_key in entries:
            raise ConfigError(f"{source}:{lineno}: duplicate key {full_key!r}")
        entries[full_key] = value.strip()
    return entries


def coerce_bool(raw: str, key: str) -> bool:
    lowered = raw.lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {raw!r}")


def coerce_float(raw: str, key: str) -> float:
    try:
        value = float(raw)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from exc
    if not math.isfinite(value):
        raise ConfigError(f"{key}: value must be finite, got {raw!r}")
    return value


def coerce_int(raw: str, key: str) -> int:
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected an integer, got {raw!r}") from exc


def coerce_float_list(raw: str, key: str) -> list[float]:
    items = [item.strip() for item in raw.split(",") if item.strip()]
    if not items:
        raise ConfigError(f"{key}: expected a comma-separated list of numbers")
    return [coerce_float(item, key) for item in items]


def coerce_int_list(raw: str, key: str) -> list[int]:
    items = [item.strip() for item in raw.split(",") if item.strip()]
    return [coerce_int(item, key) for item in items]
