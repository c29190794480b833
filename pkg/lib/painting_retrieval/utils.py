"""
Utilities for validating values and working with Enums.

:author: Doug Skrypa
"""

from __future__ import annotations

import re
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Iterator, TypeVar

__all__ = [
    'MissingMixin',
    'positive_int',
    'odd_int',
    'bounded_float',
    'bounded_int',
    'str_to_bool',
    'enum_list',
    'label_from_path',
    'iter_image_paths',
]

T = TypeVar('T')
E = TypeVar('E', bound=Enum)

IMAGE_SUFFIXES = frozenset({'.png', '.jpg', '.jpeg'})
_LABEL_PAT = re.compile(r'(\d+)$')


class MissingMixin:
    @classmethod
    def _missing_(cls, value):
        if isinstance(value, str):
            try:
                return cls._member_map_[value.upper().replace('-', '_')]  # noqa
            except KeyError:
                pass
        return super()._missing_(value)  # noqa


# region Validators


def str_to_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    try:
        return bool(int(value))
    except (TypeError, ValueError):
        pass
    lower = str(value).lower()
    if lower in {'t', 'true', 'y', 'yes', 'on'}:
        return True
    elif lower in {'f', 'false', 'n', 'no', 'off'}:
        return False
    raise ValueError(f'Unable to parse boolean value from {value=}')


def positive_int(value: Any, expected: str = 'a positive integer', min_val: int = 0) -> int:
    if isinstance(value, bool):
        raise TypeError(f'Invalid {value=} - expected {expected} >= {min_val}')
    try:
        value = int(value)
    except (ValueError, TypeError) as e:
        raise TypeError(f'Invalid {value=} - expected {expected} >= {min_val}') from e
    if value < min_val:
        raise ValueError(f'Invalid {value=} - expected {expected} >= {min_val}')
    return value


def bounded_int(low: int, high: int = None) -> Callable[[Any], int]:
    def _bounded_int(value: Any) -> int:
        value = positive_int(value, 'an integer', low)
        if high is not None and value > high:
            raise ValueError(f'Invalid {value=} - expected an integer <= {high}')
        return value

    return _bounded_int


def odd_int(value: Any) -> int:
    value = positive_int(value, 'an odd integer', 1)
    if value % 2 == 0:
        raise ValueError(f'Invalid {value=} - expected an odd integer')
    return value


def bounded_float(low: float = None, high: float = None, low_inclusive: bool = True) -> Callable[[Any], float]:
    def _bounded_float(value: Any) -> float:
        if isinstance(value, bool):
            raise TypeError(f'Invalid {value=} - expected a number')
        try:
            value = float(value)
        except (TypeError, ValueError) as e:
            raise TypeError(f'Invalid {value=} - expected a number') from e
        if low is not None and (value < low or (not low_inclusive and value == low)):
            op = '>=' if low_inclusive else '>'
            raise ValueError(f'Invalid {value=} - expected a number {op} {low}')
        if high is not None and value > high:
            raise ValueError(f'Invalid {value=} - expected a number <= {high}')
        return value

    return _bounded_float


def enum_list(enum_cls: type[E]) -> Callable[[Any], tuple[E, ...]]:
    def _enum_list(values: Any) -> tuple[E, ...]:
        if isinstance(values, (str, enum_cls)):
            values = [values]
        return tuple(dict.fromkeys(enum_cls(v) for v in values))

    return _enum_list


# endregion

# region Paths


def label_from_path(path: Path) -> int:
    """Museum images are named ``<anything><digits>.<ext>``; the trailing digits are the painting's label."""
    if m := _LABEL_PAT.search(path.stem):
        return int(m.group(1))
    raise ValueError(f'Unable to determine a label from file name={path.name!r}')


def iter_image_paths(directory: Path) -> Iterator[Path]:
    """Yields PNG / JPEG files in the given directory sorted by name, skipping generated ground truth sidecars."""
    for path in sorted(directory.iterdir()):
        if path.is_file() and path.suffix.lower() in IMAGE_SUFFIXES and not path.stem.endswith('.mask'):
            yield path


# endregion
