"""
Color histogram descriptors: global gray / 3D histograms, block-based histograms, and multiresolution (spatial pyramid)
histograms.  Every histogram is L1-normalized; block variants are normalized per tile.

:author: Doug Skrypa
"""

from __future__ import annotations

from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from ..exceptions import BadBinCount, GrayInput, ImageTooSmall, InvalidArgument
from ..imgproc.raster import BinaryMask, ColorSpace, RasterImage, convert_color, to_gray
from .base import DescriptorKind, DescriptorVector, Layout

__all__ = ['HistogramSpec', 'hist_gray_1d', 'hist_3d', 'block_histogram', 'multires_histogram', 'tile_bounds']


class HistogramSpec(NamedTuple):
    """Per-block histogram settings: GRAY uses ``bins`` bins; other spaces use ``bins`` per channel (joint 3D)."""

    space: ColorSpace = ColorSpace.GRAY
    bins: int = 32

    @property
    def length(self) -> int:
        return self.bins if self.space is ColorSpace.GRAY else self.bins**3

    def validate(self):
        if self.space is ColorSpace.GRAY:
            if not 2 <= self.bins <= 256:
                raise BadBinCount(self.bins, 2, 256)
        elif not 2 <= self.bins <= 32:
            raise BadBinCount(self.bins, 2, 32)

    def bin_indexes(self, img: RasterImage) -> np.ndarray:
        """The flat histogram bin of every pixel, with shape ``(height, width)``"""
        if self.space is ColorSpace.GRAY:
            gray = to_gray(img).pixels
            return gray.astype(np.int64) * self.bins // 256
        pixels = convert_color(img, self.space).pixels.astype(np.int64) * self.bins // 256
        return (pixels[:, :, 0] * self.bins + pixels[:, :, 1]) * self.bins + pixels[:, :, 2]


def _normalize_rows(counts: np.ndarray) -> np.ndarray:
    totals = counts.sum(axis=-1, keepdims=True)
    return np.divide(counts, totals, out=np.zeros(counts.shape, dtype=np.float64), where=totals > 0)


def _counts(indexes: np.ndarray, length: int, mask: Optional[BinaryMask]) -> np.ndarray:
    if mask is not None:
        indexes = indexes[mask.bits]
    return np.bincount(indexes.reshape(-1), minlength=length).astype(np.float64)


def hist_gray_1d(img: RasterImage, bins: int = 256, mask: Optional[BinaryMask] = None) -> DescriptorVector:
    """
    :param img: Any image (non-GRAY images are converted)
    :param bins: Number of uniform bins over ``[0, 256)``
    :param mask: Optional mask; only ``True`` pixels are counted
    """
    spec = HistogramSpec(ColorSpace.GRAY, bins)
    spec.validate()
    counts = _counts(spec.bin_indexes(img), bins, mask)
    return DescriptorVector(_normalize_rows(counts), Layout.build(DescriptorKind.GRAY1D, bins, 1, bins=bins))


def hist_3d(
    img: RasterImage, space: Union[ColorSpace, str] = ColorSpace.RGB, bins: int = 8, mask: Optional[BinaryMask] = None
) -> DescriptorVector:
    """
    Joint histogram over the 3 channels of the given color space, flattened in channel-major order
    (``index = (c0 * bins + c1) * bins + c2``).
    """
    space = ColorSpace(space)
    if space is ColorSpace.GRAY or img.space is ColorSpace.GRAY:
        raise GrayInput
    spec = HistogramSpec(space, bins)
    spec.validate()
    counts = _counts(spec.bin_indexes(img), spec.length, mask)
    layout = Layout.build(DescriptorKind.HIST3D, spec.length, 1, space=space, bins=bins)
    return DescriptorVector(_normalize_rows(counts), layout)


def tile_bounds(size: int, n: int) -> list[tuple[int, int]]:
    """Split ``size`` pixels into ``n`` tiles of ``size // n`` pixels; the last tile absorbs the remainder."""
    step = size // n
    return [(i * step, (i + 1) * step if i < n - 1 else size) for i in range(n)]


def _tile_index(size: int, n: int) -> np.ndarray:
    return np.minimum(np.arange(size) // (size // n), n - 1)


def _block_counts(img: RasterImage, grid: int, spec: HistogramSpec, mask: Optional[BinaryMask]) -> np.ndarray:
    if grid < 1:
        raise InvalidArgument(f'Invalid {grid=} - expected an integer >= 1')
    if img.width < grid or img.height < grid:
        raise ImageTooSmall(img.pixels.shape, grid)
    spec.validate()
    bins = spec.bin_indexes(img)
    tiles = _tile_index(img.height, grid)[:, None] * grid + _tile_index(img.width, grid)[None, :]
    indexes = tiles * spec.length + bins
    counts = _counts(indexes, grid * grid * spec.length, mask)
    return _normalize_rows(counts.reshape(grid * grid, spec.length)).reshape(-1)


def block_histogram(
    img: RasterImage, grid: int = 16, spec: HistogramSpec = HistogramSpec(), mask: Optional[BinaryMask] = None
) -> DescriptorVector:
    """
    Per-tile histograms over an ``n x n`` partition of the image, concatenated in row-major tile order.

    :param img: The image to describe
    :param grid: The number of tiles per row / column
    :param spec: The histogram computed for each tile
    :param mask: Optional mask; only ``True`` pixels are counted
    """
    values = _block_counts(img, grid, spec, mask)
    layout = Layout.build(
        DescriptorKind.BLOCK, len(values), grid * grid, grid=grid, space=spec.space, bins=spec.bins
    )
    return DescriptorVector(values, layout)


def multires_histogram(
    img: RasterImage,
    levels: Sequence[int] = (1, 4, 8, 16),
    spec: HistogramSpec = HistogramSpec(),
    mask: Optional[BinaryMask] = None,
) -> DescriptorVector:
    """Block histograms at each grid level, concatenated in the given level order."""
    levels = tuple(levels)
    values = np.concatenate([_block_counts(img, grid, spec, mask) for grid in levels])
    layout = Layout.build(
        DescriptorKind.MULTIRES,
        len(values),
        sum(n * n for n in levels),
        levels=levels,
        space=spec.space,
        bins=spec.bins,
    )
    return DescriptorVector(values, layout)
