"""
Descriptor vectors and the layout metadata that decides whether two vectors are comparable.

:author: Doug Skrypa
"""

from __future__ import annotations

import json
from enum import Enum
from typing import Any, Iterable, NamedTuple, Union

import numpy as np

from ..exceptions import LayoutMismatch
from ..utils import MissingMixin

__all__ = ['DescriptorKind', 'Layout', 'DescriptorVector', 'COLOR_KINDS', 'TEXTURE_KINDS']


class DescriptorKind(MissingMixin, Enum):
    GRAY1D = 'gray1d'
    HIST3D = 'hist3d'
    BLOCK = 'block'
    MULTIRES = 'multires'
    LBP = 'lbp'
    DCT = 'dct'
    HOG = 'hog'

    @property
    def is_color(self) -> bool:
        return self in COLOR_KINDS


COLOR_KINDS = frozenset({DescriptorKind.GRAY1D, DescriptorKind.HIST3D, DescriptorKind.BLOCK, DescriptorKind.MULTIRES})
TEXTURE_KINDS = frozenset({DescriptorKind.LBP, DescriptorKind.DCT, DescriptorKind.HOG})


class Layout(NamedTuple):
    """
    :param kind: The descriptor that produced the vector
    :param length: The number of values
    :param units: The number of independently L1-normalized sections (0 for vectors that are not normalized)
    :param params: Sorted ``(name, value)`` pairs for every parameter that affects the vector
    """

    kind: DescriptorKind
    length: int
    units: int
    params: tuple[tuple[str, Any], ...]

    @classmethod
    def build(cls, kind: DescriptorKind, length: int, units: int, **params) -> Layout:
        return cls(kind, length, units, tuple(sorted((k, _freeze(v)) for k, v in params.items())))

    def to_json(self) -> str:
        data = {'kind': self.kind.value, 'length': self.length, 'units': self.units, 'params': dict(self.params)}
        return json.dumps(data, sort_keys=True, separators=(',', ':'))

    @classmethod
    def from_json(cls, raw: Union[str, bytes]) -> Layout:
        data = json.loads(raw)
        return cls.build(DescriptorKind(data['kind']), data['length'], data['units'], **data['params'])


def _freeze(value: Any) -> Any:
    if isinstance(value, Enum):
        return value.value
    elif isinstance(value, (list, tuple)):
        return tuple(_freeze(v) for v in value)
    return value


class DescriptorVector:
    __slots__ = ('values', 'layout')

    def __init__(self, values: Union[np.ndarray, Iterable[float]], layout: Layout):
        values = np.ascontiguousarray(values, dtype=np.float64).reshape(-1)
        if len(values) != layout.length:
            raise LayoutMismatch(layout.length, len(values))
        values.flags.writeable = False
        self.values = values
        self.layout = layout

    def __repr__(self) -> str:
        return f'<{self.__class__.__name__}[{self.layout.kind.value}, length={self.layout.length}]>'

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other: DescriptorVector) -> bool:
        if not isinstance(other, DescriptorVector):
            return NotImplemented
        return self.layout == other.layout and np.array_equal(self.values, other.values)

    __hash__ = None

    @property
    def kind(self) -> DescriptorKind:
        return self.layout.kind

    def check_comparable(self, other: Union[DescriptorVector, Layout]):
        layout = other if isinstance(other, Layout) else other.layout
        if layout != self.layout:
            raise LayoutMismatch(self.layout, layout)

    def as_distribution(self) -> np.ndarray:
        """The values scaled to sum to 1 (unchanged if every value is 0)"""
        total = self.values.sum()
        return self.values / total if total > 0 else self.values.copy()
