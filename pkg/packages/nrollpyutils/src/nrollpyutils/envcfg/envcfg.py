"""
Typed defaults that the process environment and an optional .env file can override.

Precedence, lowest first: declared default, os.environ, the .env file.
"""

from __future__ import annotations

import os
import re
from pathlib import Path
from typing import Any, Mapping, Optional

from dotenv import dotenv_values

_BOOL_TRUE = {"1", "true", "yes", "on", "y", "t"}
_BOOL_FALSE = {"0", "false", "no", "off", "n", "f"}
_INT_RE = re.compile(r"^[+-]?\d[\d_]*$")


class DefaultValue:
    def __init__(self, default_value: Any, coerce_to_type: type):
        self.coerce_to_type = coerce_to_type
        self.default_value = self.coerce_value(default_value)

    def coerce_value(self, value: Any) -> Any:
        """Coerce a raw (usually string) value; empty strings and "none" mean unset."""
        if value is None:
            return None
        value_str = str(value).strip()
        if value_str == "" or value_str.lower() == "none":
            return None
        if self.coerce_to_type is int:
            if not _INT_RE.match(value_str):
                raise ValueError(f"not an integer: {value_str!r}")
            return int(value_str.replace("_", ""))
        if self.coerce_to_type is float:
            return float(value_str)
        if self.coerce_to_type is bool:
            low = value_str.lower()
            if low in _BOOL_TRUE:
                return True
            if low in _BOOL_FALSE:
                return False
            raise ValueError(f"invalid boolean literal: {value_str!r}")
        return value_str

    def __repr__(self) -> str:
        return f"DefaultValue({self.default_value!r}, {self.coerce_to_type.__name__})"


def load_env_file(path: str | Path, schema: Mapping[str, DefaultValue]) -> dict[str, Any]:
    """KEY=VALUE pairs from a .env file; keys in `schema` are coerced, others kept as strings."""
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f".env file not found: {path}")
    raw = dotenv_values(dotenv_path=p, interpolate=True, encoding="utf-8")
    out: dict[str, Any] = {}
    for k, v in raw.items():
        out[k] = schema[k].coerce_value(v) if k in schema else v
    return out


def resolve_defaults(
    schema: Mapping[str, DefaultValue],
    env_file_cfg: Optional[Mapping[str, Any]] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> dict[str, Any]:
    """Value of every schema key after applying the environment, then the .env file."""
    environ = os.environ if environ is None else environ
    ret = {k: d.default_value for k, d in schema.items()}
    for k, d in schema.items():
        if k in environ:
            ret[k] = d.coerce_value(environ[k])
    if env_file_cfg is not None:
        for k, v in env_file_cfg.items():
            if k in schema:
                ret[k] = v
    return ret
