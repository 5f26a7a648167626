"""Tiny key=value config text format shared by model and train configs.

One ``key = value`` pair per line; ``#`` starts a comment; blank lines are
ignored.  Values are coerced by the target dataclass field types (int,
float, bool, str).
"""
from __future__ import annotations

import dataclasses


class ConfigError(ValueError):
    """Bad key, value, or field combination in a config."""


def parse_kv(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, val = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = val.strip()
    return out


def format_kv(pairs) -> str:
    items = pairs.items() if isinstance(pairs, dict) else pairs
    return "".join(f"{k} = {v}\n" for k, v in items)


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _coerce(key: str, val: str, typ):
    try:
        if typ is bool:
            low = val.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(val)
        if typ is int:
            return int(val)
        if typ is float:
            return float(val)
        return val
    except ValueError:
        raise ConfigError(f"key {key!r}: cannot parse {val!r} as {typ.__name__}") from None


def apply_kv(instance, kv: dict):
    """Overlay parsed key=value pairs onto a dataclass instance in place."""
    fields = {f.name: f for f in dataclasses.fields(instance)}
    for key, val in kv.items():
        f = fields.get(key)
        if f is None:
            raise ConfigError(f"unknown key {key!r} (expected one of {sorted(fields)})")
        setattr(instance, key, _coerce(key, val, f.type if isinstance(f.type, type) else _runtime_type(f)))
    return instance


def _runtime_type(f):
    # Dataclass field annotations may be strings under future-import semantics.
    name = f.type if isinstance(f.type, str) else getattr(f.type, "__name__", "str")
    return {"int": int, "float": float, "bool": bool, "str": str}.get(name, str)


def dataclass_kv(instance) -> dict:
    return {f.name: getattr(instance, f.name) for f in dataclasses.fields(instance)}
