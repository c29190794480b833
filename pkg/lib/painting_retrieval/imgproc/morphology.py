"""
Grayscale / binary morphology with flat rectangular or elliptical structuring elements.

:author: Doug Skrypa
"""

from __future__ import annotations

from enum import Enum
from functools import cached_property
from typing import Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..exceptions import InvalidArgument, MultiChannelInput
from ..utils import MissingMixin
from .raster import BinaryMask, RasterImage

__all__ = ['MorphOp', 'SEShape', 'StructuringElement', 'morphology', 'morph_mask', 'apply_morphology']


class MorphOp(MissingMixin, Enum):
    ERODE = 'erode'
    DILATE = 'dilate'
    OPEN = 'open'
    CLOSE = 'close'
    TOPHAT = 'tophat'
    BLACKHAT = 'blackhat'


class SEShape(MissingMixin, Enum):
    RECT = 'rect'
    ELLIPSE = 'ellipse'


class StructuringElement:
    """A flat structuring element anchored at its center.  Width and height must be odd."""

    __slots__ = ('shape', 'width', 'height', '__dict__')

    def __init__(self, width: int, height: int = None, shape: Union[SEShape, str] = SEShape.RECT):
        height = width if height is None else height
        for name, value in (('width', width), ('height', height)):
            if isinstance(value, bool) or not isinstance(value, int) or value < 1 or value % 2 == 0:
                raise InvalidArgument(f'Invalid structuring element {name}={value!r} - expected an odd integer >= 1')
        self.shape = SEShape(shape)
        self.width = width
        self.height = height

    @classmethod
    def square(cls, side: int, shape: Union[SEShape, str] = SEShape.RECT) -> StructuringElement:
        return cls(side, side, shape)

    def __repr__(self) -> str:
        return f'<{self.__class__.__name__}[{self.shape.name}, {self.width}x{self.height}]>'

    def __eq__(self, other: StructuringElement) -> bool:
        if not isinstance(other, StructuringElement):
            return NotImplemented
        return (self.shape, self.width, self.height) == (other.shape, other.width, other.height)

    def __hash__(self) -> int:
        return hash((self.__class__, self.shape, self.width, self.height))

    @cached_property
    def footprint(self) -> np.ndarray:
        """Boolean array with shape ``(height, width)`` marking the element's pixels"""
        if self.shape is SEShape.RECT:
            return np.ones((self.height, self.width), dtype=bool)
        dy = (np.arange(self.height) - self.height // 2)[:, None] / (self.height / 2)
        dx = (np.arange(self.width) - self.width // 2)[None, :] / (self.width / 2)
        return dx**2 + dy**2 <= 1


def morphology(kind: Union[MorphOp, str], img: RasterImage, se: StructuringElement) -> RasterImage:
    """
    Apply a morphological operation to a single-channel image.

    :param kind: The operation to apply
    :param img: A GRAY (or other single-channel) image
    :param se: The structuring element
    :return: A new image with the same dimensions
    """
    if img.channels != 1:
        raise MultiChannelInput
    return img.with_pixels(apply_morphology(kind, img.pixels, se))


def morph_mask(kind: Union[MorphOp, str], mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    return BinaryMask(apply_morphology(kind, mask.bits, se))


def apply_morphology(kind: Union[MorphOp, str], values: np.ndarray, se: StructuringElement) -> np.ndarray:
    """Array-level morphology for ``uint8`` or ``bool`` 2D arrays."""
    kind = MorphOp(kind)
    if kind is MorphOp.ERODE:
        return _erode(values, se)
    elif kind is MorphOp.DILATE:
        return _dilate(values, se)
    elif kind is MorphOp.OPEN:
        return _dilate(_erode(values, se), se)
    elif kind is MorphOp.CLOSE:
        return _erode(_dilate(values, se), se)
    elif kind is MorphOp.TOPHAT:
        opened = _dilate(_erode(values, se), se)
        return _saturating_sub(values, opened)
    else:
        closed = _erode(_dilate(values, se), se)
        return _saturating_sub(closed, values)


def _saturating_sub(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.dtype == bool:
        return a & ~b
    return np.clip(a.astype(np.int16) - b.astype(np.int16), 0, 255).astype(a.dtype)


def _erode(values: np.ndarray, se: StructuringElement) -> np.ndarray:
    return _window_reduce(values, se, np.min, np.minimum)


def _dilate(values: np.ndarray, se: StructuringElement) -> np.ndarray:
    return _window_reduce(values, se, np.max, np.maximum)


def _window_reduce(values: np.ndarray, se: StructuringElement, reduce, combine) -> np.ndarray:
    ry, rx = se.height // 2, se.width // 2
    if se.shape is SEShape.RECT:
        # Rectangles are separable: reduce along rows, then along columns
        out = values
        if rx:
            padded = np.pad(out, ((0, 0), (rx, rx)), mode='edge')
            out = reduce(sliding_window_view(padded, se.width, axis=1), axis=-1)
        if ry:
            padded = np.pad(out, ((ry, ry), (0, 0)), mode='edge')
            out = reduce(sliding_window_view(padded, se.height, axis=0), axis=-1)
        return np.ascontiguousarray(out, dtype=values.dtype)

    height, width = values.shape
    padded = np.pad(values, ((ry, ry), (rx, rx)), mode='edge')
    out = None
    for dy, dx in zip(*np.nonzero(se.footprint)):
        window = padded[dy : dy + height, dx : dx + width]
        out = window.copy() if out is None else combine(out, window, out=out)
    return out
