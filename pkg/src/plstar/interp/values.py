"""
Runtime values of data variables.

Integers and booleans are plain Python values, arrays are tuples indexed from
1 by the builtins, and two singletons stand for the unit value and ⊥.
"""

from __future__ import annotations

import json
from typing import Any, Tuple, Union

from ..errors import KindError
from ..ir.typesig import Sort


class _Undefined:
    _instance = None

    def __new__(cls) -> "_Undefined":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "undefined"

    def __reduce__(self) -> str:
        return "UNDEFINED"


class _Unit:
    _instance = None

    def __new__(cls) -> "_Unit":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "unit"

    def __reduce__(self) -> str:
        return "UNIT"


UNDEFINED = _Undefined()
UNIT = _Unit()

Value = Union[int, bool, Tuple[int, ...], _Unit, _Undefined]


def is_defined(value: Any) -> bool:
    return value is not UNDEFINED


def defined_leq(lower: Any, upper: Any) -> bool:
    """Flat definedness order: ⊥ is below everything, defined values only below themselves."""
    return lower is UNDEFINED or (lower == upper and type(lower) is type(upper))


def format_value(value: Any) -> str:
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, tuple):
        return "[" + ", ".join(format_value(v) for v in value) + "]"
    return str(value) if isinstance(value, int) else repr(value)


def parse_value(text: str, sort: Sort) -> Value:
    """Parse a command-line value for a variable of the given sort."""
    text = text.strip()
    if text == "undefined":
        return UNDEFINED
    try:
        if sort == Sort.BOOL:
            if text not in ("true", "false"):
                raise ValueError(text)
            return text == "true"
        if sort == Sort.INT:
            return int(text)
        if sort == Sort.INT_ARRAY:
            items = json.loads(text)
            if not isinstance(items, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in items):
                raise ValueError(text)
            return tuple(items)
        if sort == Sort.UNIT:
            return UNIT
    except ValueError as e:
        raise KindError(f"{text!r} is not a value of sort {sort.value}") from e
    raise KindError(f"cannot read values of sort {sort.value}")


def value_matches(value: Any, sort: Sort) -> bool:
    if value is UNDEFINED or sort == Sort.UNIVERSAL:
        return True
    if sort == Sort.BOOL:
        return isinstance(value, bool)
    if sort == Sort.INT:
        return isinstance(value, int) and not isinstance(value, bool)
    if sort == Sort.INT_ARRAY:
        return isinstance(value, tuple)
    return value is UNIT
