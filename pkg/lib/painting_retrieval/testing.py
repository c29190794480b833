"""
Helpers for unit tests

:author: Doug Skrypa
"""
# pylint: disable=R0913,C0103

from __future__ import annotations

import sys
from contextlib import AbstractContextManager
from io import StringIO
from pathlib import Path
from tempfile import TemporaryDirectory
from typing import IO, Any, Optional, Sequence, Type, Union
from unittest import TestCase

import numpy as np

from .imgproc.raster import ColorSpace, RasterImage, write_image

__all__ = [
    'RetrievalTestCase',
    'AssertRaisesWithStringContext',
    'RedirectStreams',
    'TemporaryDir',
    'gradient_image',
    'checkerboard',
    'painting_on_wall',
    'brute_force_ap',
    'brute_force_hamming',
    'MUSEUM_AUTHORS',
    'museum_painting',
    'write_museum',
]


class AssertRaisesWithStringContext:
    """
    Simplified version of the stdlib ``_AssertRaisesContext`` that tests whether the raised exception's string contains
    the given text rather than matching it against a regex pattern.
    """

    __slots__ = ('test_case', 'expected_exc', 'expected_text', 'msg')

    def __init__(
        self, test_case: TestCase, expected_exc: Type[BaseException], text: Optional[str] = None, msg: str = None
    ):
        self.test_case = test_case
        self.expected_exc = expected_exc
        self.expected_text = text
        self.msg = (' - ' + msg) if msg else ''

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if exc_type is None:
            self.test_case.fail(f'{self.expected_exc.__name__} not raised{self.msg}')
        elif not issubclass(exc_type, self.expected_exc):
            return False  # Let unexpected exceptions be propagated
        elif self.expected_text and self.expected_text not in str(exc_val):
            self.test_case.fail(f'{self.expected_text!r} not found in {str(exc_val)!r}{self.msg}')
        return True


class RetrievalTestCase(TestCase):
    def assert_raises_contains_str(self, expected_exc: Type[BaseException], expected_text: str, msg: str = None):
        return AssertRaisesWithStringContext(self, expected_exc, expected_text, msg)

    def assert_array_equal(self, expected: Any, actual: Any, msg: str = None):
        expected, actual = np.asarray(expected), np.asarray(actual)
        if expected.shape != actual.shape:
            self.fail(self._formatMessage(msg, f'shape {expected.shape} != {actual.shape}'))
        if not np.array_equal(expected, actual):
            diff = np.argwhere(expected != actual)
            self.fail(self._formatMessage(msg, f'{len(diff)} elements differ; first at {tuple(diff[0])}'))

    def assert_array_almost_equal(self, expected: Any, actual: Any, places: int = 7, msg: str = None):
        expected, actual = np.asarray(expected, dtype=np.float64), np.asarray(actual, dtype=np.float64)
        if expected.shape != actual.shape:
            self.fail(self._formatMessage(msg, f'shape {expected.shape} != {actual.shape}'))
        if not np.allclose(expected, actual, rtol=0, atol=0.5 * 10**-places):
            worst = float(np.abs(expected - actual).max())
            self.fail(self._formatMessage(msg, f'arrays differ by up to {worst}'))


class RedirectStreams(AbstractContextManager):
    def __init__(self):
        self._old: dict[str, IO] = {}
        self._stdout = StringIO()
        self._stderr = StringIO()

    @property
    def stdout(self) -> str:
        return self._stdout.getvalue()

    @property
    def stderr(self) -> str:
        return self._stderr.getvalue()

    def __enter__(self) -> RedirectStreams:
        for name, io in (('stdout', self._stdout), ('stderr', self._stderr)):
            self._old[name] = getattr(sys, name)
            setattr(sys, name, io)
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        while self._old:
            name, orig = self._old.popitem()
            setattr(sys, name, orig)


class TemporaryDir(TemporaryDirectory):
    def __enter__(self) -> Path:
        return Path(self.name)


# region Image Builders


def gradient_image(width: int = 64, height: int = 48, space: ColorSpace = ColorSpace.RGB) -> RasterImage:
    """A smooth image whose channels vary along x, along y, and diagonally"""
    xs = np.linspace(0, 255, width)[None, :].repeat(height, 0)
    ys = np.linspace(0, 255, height)[:, None].repeat(width, 1)
    if space is ColorSpace.GRAY:
        return RasterImage(((xs + ys) / 2).round().astype(np.uint8), space)
    pixels = np.stack([xs, ys, (xs + ys) / 2], axis=2).round().astype(np.uint8)
    return RasterImage(pixels, space)


def checkerboard(
    width: int = 64, height: int = 64, square: int = 8, low: int = 0, high: int = 255, color: bool = False
) -> RasterImage:
    ys, xs = np.indices((height, width))
    pixels = np.where(((xs // square) + (ys // square)) % 2 == 0, high, low).astype(np.uint8)
    if color:
        return RasterImage(np.stack([pixels, 255 - pixels, pixels // 2], axis=2), ColorSpace.RGB)
    return RasterImage(pixels, ColorSpace.GRAY)


def painting_on_wall(
    width: int = 160,
    height: int = 120,
    box: Sequence[int] = (40, 30, 120, 90),
    wall: Sequence[int] = (200, 200, 190),
    seed: int = 1,
) -> RasterImage:
    """A flat colored wall with a single textured painting occupying ``box = (x1, y1, x2, y2)``"""
    pixels = np.empty((height, width, 3), dtype=np.uint8)
    pixels[...] = np.asarray(wall, dtype=np.uint8)
    x1, y1, x2, y2 = box
    rng = np.random.default_rng(seed)
    blocks = rng.integers(0, 120, size=((y2 - y1 + 7) // 8, (x2 - x1 + 7) // 8, 3))
    painting = blocks.repeat(8, 0).repeat(8, 1)[: y2 - y1, : x2 - x1]
    pixels[y1:y2, x1:x2] = painting.astype(np.uint8)
    return RasterImage(pixels, ColorSpace.RGB)


# endregion

# region Oracles


def brute_force_ap(ranking: Sequence[int], relevant: Union[set[int], frozenset[int]], k: int) -> float:
    """The mean of precision@i for i in 1..k, computed one cutoff at a time"""
    total = 0.0
    for i in range(1, k + 1):
        top = list(ranking[:i])
        total += sum(1 for label in top if label in relevant) / i
    return total / k


def brute_force_hamming(a: bytes, b: bytes) -> int:
    return sum(bin(x ^ y).count('1') for x, y in zip(a, b))


# endregion

# region Museum Builders

MUSEUM_AUTHORS = ('Pablo Picasso', 'Frida Kahlo', 'Pablo Picasso', 'Claude Monet')


def museum_painting(label: int, width: int = 160, height: int = 120) -> RasterImage:
    """A frame-filling textured painting that is distinct for each label"""
    return painting_on_wall(width, height, (0, 0, width, height), seed=label + 10)


def write_museum(directory: Path, authors: Sequence[str] = MUSEUM_AUTHORS) -> Path:
    """Write one ``bbdd_<label>.png`` painting per author, and the matching catalog, into the given directory"""
    rows = []
    for label, author in enumerate(authors):
        write_image(museum_painting(label), directory.joinpath(f'bbdd_{label:05d}.png'))
        rows.append(f'{label}\t{author}\tPainting {label}\n')
    directory.joinpath('catalog.tsv').write_text(''.join(rows), encoding='utf-8')
    return directory


# endregion
