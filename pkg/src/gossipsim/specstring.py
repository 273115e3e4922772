"""Tiny shared parser for ``name:key=value,key=value`` spec strings."""

from __future__ import annotations

__all__ = ["SpecError", "split_spec", "parse_kv"]


class SpecError(ValueError):
    """Raised for malformed spec strings."""


def split_spec(spec: str) -> tuple[str, dict[str, str]]:
    """Split ``kind:key=value,...`` into the kind and a key/value dict."""
    kind, _, rest = spec.strip().partition(":")
    if not kind:
        raise SpecError(f"empty spec string {spec!r}")
    return kind, parse_kv(rest)


def parse_kv(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for item in filter(None, (p.strip() for p in text.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise SpecError(f"expected key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out
