"""
Read and write config-like documents as JSON or TOML, chosen by file suffix.

JSON is the primary format for run configs and artifacts; TOML is accepted for
hand-written configs. TOML has no null, so `None` values are dropped on write.
"""

from __future__ import annotations

import json
import sys
from enum import Enum
from pathlib import Path
from typing import Any, Dict

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib


class ConfigFormat(str, Enum):
    JSON = "json"
    TOML = "toml"


def format_for_path(path: str | Path) -> ConfigFormat:
    suffix = Path(path).suffix.lower()
    if suffix == ".toml":
        return ConfigFormat.TOML
    if suffix in (".json", ""):
        return ConfigFormat.JSON
    raise ValueError(f"unsupported config file suffix {suffix!r} (expected .json or .toml): {path}")


def _drop_none(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {k: _drop_none(v) for k, v in obj.items() if v is not None}
    if isinstance(obj, (list, tuple)):
        return [_drop_none(v) for v in obj]
    return obj


def loads(s: str, fmt: ConfigFormat = ConfigFormat.JSON) -> Dict[str, Any]:
    if fmt is ConfigFormat.TOML:
        return tomllib.loads(s)
    data = json.loads(s)
    if not isinstance(data, dict):
        raise ValueError(f"top-level config must be an object, got {type(data).__name__}")
    return data


def dumps(d: Dict[str, Any], fmt: ConfigFormat = ConfigFormat.JSON) -> str:
    if fmt is ConfigFormat.TOML:
        return tomli_w.dumps(_drop_none(d))
    return json.dumps(d, indent=2, sort_keys=True) + "\n"


def loadf(path: str | Path) -> Dict[str, Any]:
    p = Path(path)
    return loads(p.read_text(encoding="utf-8"), format_for_path(p))


def dumpf(d: Dict[str, Any], path: str | Path) -> Path:
    """Write `d` to `path` atomically in the format implied by its suffix."""
    from ..file_utils import write_text_atomic

    p = Path(path)
    write_text_atomic(p, dumps(d, format_for_path(p)))
    return p
