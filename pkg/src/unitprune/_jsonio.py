"""Shared plumbing for the text file formats: strict JSON reading helpers.

The writers live with their types (model, scene, prune, report); they emit
deterministic, diff-friendly JSON by hand. Reading goes through the stdlib
parser plus the typed accessors here, which turn structural surprises into
FormatError with a usable path string.
"""

from __future__ import annotations

import json

from .errors import FormatError


def parse_doc(data: bytes | str, what: str) -> dict:
    """Parse a top-level JSON object, rejecting NaN/Infinity constants."""
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data

    def reject(name: str):
        raise FormatError(f"non-finite constant {name!r} is not allowed in {what} files")

    try:
        doc = json.loads(text, parse_constant=reject)
    except json.JSONDecodeError as e:
        raise FormatError(f"{what} parse error at line {e.lineno} column {e.colno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise FormatError(f"{what}: expected a top-level object")
    return doc


def get(obj, key: str, kind, where: str):
    """Fetch obj[key] checked against kind; bools never pass as numbers."""
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected an object")
    if key not in obj:
        raise FormatError(f"{where}: missing key {key!r}")
    val = obj[key]
    if kind is float:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise FormatError(f"{where}: key {key!r} must be a number")
        return float(val)
    if kind is int:
        if isinstance(val, bool) or not isinstance(val, int):
            raise FormatError(f"{where}: key {key!r} must be an integer")
        return val
    if not isinstance(val, kind):
        raise FormatError(f"{where}: key {key!r} has wrong type {type(val).__name__}")
    return val


def number_list(val, where: str) -> list[float]:
    if not isinstance(val, list):
        raise FormatError(f"{where}: expected an array of numbers")
    out = []
    for v in val:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise FormatError(f"{where}: expected numbers, found {type(v).__name__}")
        out.append(float(v))
    return out


def int_list(val, where: str) -> list[int]:
    if not isinstance(val, list):
        raise FormatError(f"{where}: expected an array of integers")
    out = []
    for v in val:
        if isinstance(v, bool) or not isinstance(v, int):
            raise FormatError(f"{where}: expected integers, found {type(v).__name__}")
        out.append(v)
    return out
