"""
Build nested frozen dataclasses from plain dicts (parsed JSON or TOML).

Every problem is collected with its dotted key path and reported together in one
ConfigValidationError: unknown keys, wrong types, and the ValueErrors raised by each
dataclass's own __post_init__ checks.
"""

from __future__ import annotations

import copy
import dataclasses
import json
import types
from pathlib import Path
from typing import Any, Iterable, Literal, Mapping, TypeVar, Union, get_args, get_origin, get_type_hints

from nroll.errors import ConfigValidationError
from nrollpyutils.cfgio import loadf

T = TypeVar("T")

_MISSING = object()


def _join(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


def _where(path: str) -> str:
    return path or "<root>"


def _type_name(tp: Any) -> str:
    return getattr(tp, "__name__", None) or str(tp).replace("typing.", "")


def _convert(value: Any, tp: Any, path: str, problems: list[str]) -> Any:
    origin = get_origin(tp)

    if tp is Any:
        return value
    if origin in (Union, types.UnionType):
        args = get_args(tp)
        if value is None and type(None) in args:
            return None
        options = [a for a in args if a is not type(None)]
        for option in options:
            scratch: list[str] = []
            out = _convert(value, option, path, scratch)
            if not scratch:
                return out
            if len(options) == 1:
                problems.extend(scratch)
                return _MISSING
        problems.append(f"{_where(path)}: expected {_type_name(tp)}, got {value!r}")
        return _MISSING
    if origin is Literal:
        if value in get_args(tp):
            return value
        problems.append(f"{_where(path)}: must be one of {list(get_args(tp))}, got {value!r}")
        return _MISSING
    if origin in (tuple, list):
        if not isinstance(value, (list, tuple)):
            problems.append(f"{_where(path)}: expected a list, got {value!r}")
            return _MISSING
        args = get_args(tp)
        if origin is tuple and not (len(args) == 2 and args[1] is Ellipsis):
            if len(value) != len(args):
                problems.append(f"{_where(path)}: expected {len(args)} items, got {len(value)}")
                return _MISSING
            item_types = list(args)
        else:
            item_types = [args[0] if args else Any] * len(value)
        before = len(problems)
        items = [_convert(v, t, f"{path}[{i}]", problems) for i, (v, t) in enumerate(zip(value, item_types))]
        if len(problems) > before:
            return _MISSING
        return tuple(items) if origin is tuple else items
    if dataclasses.is_dataclass(tp):
        return _build(tp, value, path, problems)
    if tp is bool:
        if isinstance(value, bool):
            return value
    elif tp is int:
        if isinstance(value, int) and not isinstance(value, bool):
            return value
    elif tp is float:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
    elif tp is str:
        if isinstance(value, str):
            return value
    else:
        return value
    problems.append(f"{_where(path)}: expected {_type_name(tp)}, got {value!r}")
    return _MISSING


def _build(cls: type, data: Any, path: str, problems: list[str]) -> Any:
    if not isinstance(data, Mapping):
        problems.append(f"{_where(path)}: expected a table, got {data!r}")
        return _MISSING
    before = len(problems)
    hints = get_type_hints(cls)
    fields = {f.name: f for f in dataclasses.fields(cls) if f.init}
    rejected: Mapping[str, str] = getattr(cls, "REJECTED_KEYS", {})

    for key in data:
        if key in rejected:
            problems.append(f"{_join(path, key)}: not allowed here; {rejected[key]}")
        elif key not in fields:
            problems.append(f"{_join(path, key)}: unknown key")

    kwargs: dict[str, Any] = {}
    for name, f in fields.items():
        if name not in data:
            if f.default is dataclasses.MISSING and f.default_factory is dataclasses.MISSING:
                problems.append(f"{_join(path, name)}: required key missing")
            continue
        v = _convert(data[name], hints[name], _join(path, name), problems)
        if v is not _MISSING:
            kwargs[name] = v

    if len(problems) > before:
        return _MISSING
    try:
        return cls(**kwargs)
    except (ValueError, TypeError) as e:
        problems.append(f"{_where(path)}: {e}")
        return _MISSING


def from_dict(cls: type[T], data: Mapping[str, Any]) -> T:
    problems: list[str] = []
    out = _build(cls, data, "", problems)
    if problems:
        raise ConfigValidationError(problems)
    return out


def to_dict(obj: Any) -> dict[str, Any]:
    """Plain JSON-ready dict of a (nested) dataclass; tuples become lists."""

    def plain(v: Any) -> Any:
        if isinstance(v, dict):
            return {k: plain(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [plain(x) for x in v]
        return v

    return plain(dataclasses.asdict(obj))


def parse_override(text: str) -> tuple[list[str], Any]:
    """`a.b.c=value` -> (["a", "b", "c"], value); the value is JSON when it parses, else a string."""
    key, sep, raw = text.partition("=")
    keys = [k.strip() for k in key.split(".")]
    if not sep or not all(keys):
        raise ConfigValidationError([f"--set {text!r}: expected key.path=value"])
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return keys, value


def apply_overrides(data: Mapping[str, Any], overrides: Iterable[str]) -> dict[str, Any]:
    out = copy.deepcopy(dict(data))
    problems: list[str] = []
    for text in overrides:
        try:
            keys, value = parse_override(text)
        except ConfigValidationError as e:
            problems.extend(e.problems)
            continue
        node = out
        for i, k in enumerate(keys[:-1]):
            nxt = node.setdefault(k, {})
            if not isinstance(nxt, dict):
                problems.append(f"--set {text!r}: {'.'.join(keys[: i + 1])} is not a table")
                break
            node = nxt
        else:
            node[keys[-1]] = value
    if problems:
        raise ConfigValidationError(problems)
    return out


def load_mapping(path: str | Path) -> dict[str, Any]:
    """Parse a JSON or TOML config file; any read or parse failure is a ConfigValidationError."""
    try:
        return loadf(path)
    except (OSError, ValueError) as e:
        raise ConfigValidationError([f"{path}: {e}"]) from e
