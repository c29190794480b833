"""
Texture descriptors: local binary patterns, block DCT coefficients, and histograms of oriented gradients.

Each descriptor works on a square bilinear resize of its input (``analysis_size``) so vectors have a fixed length
regardless of the painting's size; ``analysis_size=None`` uses the input as-is.

:author: Doug Skrypa
"""

from __future__ import annotations

from functools import lru_cache
from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..exceptions import BadKeepCount, GeometryMismatch, ImageTooSmall, MultiChannelInput
from ..imgproc.filters import resize_array
from ..imgproc.raster import BinaryMask, RasterImage, to_gray
from .base import DescriptorKind, DescriptorVector, Layout

__all__ = [
    'texture_input',
    'lbp_codes',
    'lbp_descriptor',
    'dct_matrix',
    'zigzag_order',
    'dct_descriptor',
    'hog_descriptor',
]

HOG_EPSILON = 1e-6

# (dy, dx) for bits 0..7: clockwise from the top-left neighbor
_LBP_NEIGHBORS = ((-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1))


def texture_input(img: RasterImage, mask: Optional[BinaryMask] = None) -> RasterImage:
    """
    Gray version of the given image where pixels outside the mask are replaced by the mean gray level of the pixels
    inside it, so excluded regions add no gradients.
    """
    gray = to_gray(img)
    if mask is None or mask.bits.all() or not mask.bits.any():
        return gray
    fill = int(np.floor(gray.pixels[mask.bits].mean() + 0.5))
    return gray.with_pixels(np.where(mask.bits, gray.pixels, np.uint8(fill)).astype(np.uint8))


def _analysis_values(img: RasterImage, analysis_size: Optional[int]) -> np.ndarray:
    if img.channels != 1:
        raise MultiChannelInput
    if analysis_size is None or (img.width, img.height) == (analysis_size, analysis_size):
        return img.pixels.astype(np.float64)
    return np.floor(resize_array(img.pixels, analysis_size, analysis_size) + 0.5)


# region LBP


def lbp_codes(values: np.ndarray) -> np.ndarray:
    """
    8-neighbor, radius 1 LBP codes for every interior pixel.  A neighbor that is >= the center sets its bit.

    :param values: A 2D array with height and width >= 3
    :return: A ``uint8`` array with shape ``(height - 2, width - 2)``
    """
    height, width = values.shape
    center = values[1:-1, 1:-1]
    codes = np.zeros((height - 2, width - 2), dtype=np.uint8)
    for bit, (dy, dx) in enumerate(_LBP_NEIGHBORS):
        neighbor = values[1 + dy : height - 1 + dy, 1 + dx : width - 1 + dx]
        codes |= (neighbor >= center).astype(np.uint8) << bit
    return codes


def lbp_descriptor(img: RasterImage, grid: int = 4, analysis_size: Optional[int] = 256) -> DescriptorVector:
    """
    Per-tile 256-bin histograms of LBP codes over an ``n x n`` partition of the interior pixels, each L1-normalized.

    :param img: A single-channel image
    :param grid: The number of tiles per row / column
    :param analysis_size: Side length of the square resize applied first
    """
    values = _analysis_values(img, analysis_size)
    if values.shape[0] - 2 < grid or values.shape[1] - 2 < grid:
        raise ImageTooSmall(values.shape, grid)
    codes = lbp_codes(values).astype(np.int64)
    height, width = codes.shape
    rows = np.minimum(np.arange(height) // (height // grid), grid - 1)
    cols = np.minimum(np.arange(width) // (width // grid), grid - 1)
    tiles = rows[:, None] * grid + cols[None, :]
    counts = np.bincount((tiles * 256 + codes).reshape(-1), minlength=grid * grid * 256).reshape(grid * grid, 256)
    hist = counts / counts.sum(axis=1, keepdims=True)
    layout = Layout.build(DescriptorKind.LBP, hist.size, grid * grid, grid=grid, analysis_size=analysis_size)
    return DescriptorVector(hist.reshape(-1), layout)


# endregion

# region DCT


@lru_cache(1)
def dct_matrix(size: int = 8) -> np.ndarray:
    """Orthonormal type-II DCT matrix ``C`` such that the coefficients of block ``B`` are ``C @ B @ C.T``"""
    k = np.arange(size)[:, None]
    n = np.arange(size)[None, :]
    matrix = np.cos(np.pi * (2 * n + 1) * k / (2 * size)) * np.sqrt(2 / size)
    matrix[0] /= np.sqrt(2)
    return matrix


@lru_cache(1)
def zigzag_order(size: int = 8) -> np.ndarray:
    """Flat indexes of a ``size x size`` block in JPEG zigzag order"""
    cells = sorted(
        ((r, c) for r in range(size) for c in range(size)),
        key=lambda rc: (rc[0] + rc[1], rc[1] if (rc[0] + rc[1]) % 2 == 0 else rc[0]),
    )
    return np.array([r * size + c for r, c in cells], dtype=np.int64)


def dct_descriptor(img: RasterImage, keep: int = 10, analysis_size: Optional[int] = 256) -> DescriptorVector:
    """
    The first ``keep`` zigzag-ordered DCT coefficients of each 8x8 tile, concatenated in row-major tile order.
    Coefficients are signed and not normalized.  Partial tiles at the right / bottom edge are ignored.
    """
    if isinstance(keep, bool) or not 1 <= keep <= 64:
        raise BadKeepCount(keep)
    values = _analysis_values(img, analysis_size)
    rows, cols = values.shape[0] // 8, values.shape[1] // 8
    if not rows or not cols:
        raise ImageTooSmall(values.shape, 8)
    blocks = values[: rows * 8, : cols * 8].reshape(rows, 8, cols, 8).transpose(0, 2, 1, 3).reshape(-1, 8, 8)
    matrix = dct_matrix(8)
    coefficients = np.einsum('ij,tjk,lk->til', matrix, blocks, matrix).reshape(-1, 64)
    kept = coefficients[:, zigzag_order(8)[:keep]]
    layout = Layout.build(DescriptorKind.DCT, kept.size, 0, keep=keep, analysis_size=analysis_size, tiles=rows * cols)
    return DescriptorVector(kept.reshape(-1), layout)


# endregion

# region HOG


def hog_descriptor(
    img: RasterImage, cell: int = 8, block: int = 2, bins: int = 9, analysis_size: Optional[int] = 256
) -> DescriptorVector:
    """
    Histogram of oriented gradients with unsigned orientations, linear interpolation between adjacent bins (centered
    at ``k * 180 / bins`` degrees), L2 block normalization, and a block stride of 1 cell.

    :param img: A single-channel image
    :param cell: Cell side length in pixels
    :param block: Block side length in cells
    :param bins: The number of orientation bins
    :param analysis_size: Side length of the square resize applied first
    """
    values = _analysis_values(img, analysis_size)
    height, width = values.shape
    if cell < 1 or block < 1 or height % cell or width % cell or height // cell < block or width // cell < block:
        raise GeometryMismatch(
            f'Image with shape={values.shape} is incompatible with {cell}px cells and {block}x{block} blocks'
        )

    padded = np.pad(values, 1, mode='edge')
    gx = padded[1:-1, 2:] - padded[1:-1, :-2]
    gy = padded[2:, 1:-1] - padded[:-2, 1:-1]
    magnitude = np.hypot(gx, gy)
    position = (np.degrees(np.arctan2(gy, gx)) % 180) / (180 / bins)
    low = np.floor(position).astype(np.int64)
    high_weight = position - low
    low %= bins
    high = (low + 1) % bins

    cells_y, cells_x = height // cell, width // cell
    cell_index = (np.arange(height) // cell)[:, None] * cells_x + (np.arange(width) // cell)[None, :]
    size = cells_y * cells_x * bins
    hist = np.bincount((cell_index * bins + low).reshape(-1), (magnitude * (1 - high_weight)).reshape(-1), size)
    hist += np.bincount((cell_index * bins + high).reshape(-1), (magnitude * high_weight).reshape(-1), size)
    cells = hist.reshape(cells_y, cells_x, bins)

    windows = sliding_window_view(cells, (block, block), axis=(0, 1))  # (by, bx, bins, block, block)
    vectors = windows.transpose(0, 1, 3, 4, 2).reshape(-1, block * block * bins)
    norms = np.sqrt((vectors**2).sum(axis=1, keepdims=True) + HOG_EPSILON**2)
    descriptor = (vectors / norms).reshape(-1)
    layout = Layout.build(
        DescriptorKind.HOG,
        descriptor.size,
        0,
        cell=cell,
        block=block,
        bins=bins,
        analysis_size=analysis_size,
        shape=(height, width),
    )
    return DescriptorVector(descriptor, layout)


# endregion
