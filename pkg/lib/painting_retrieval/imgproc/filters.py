"""
Window filters, gradients, thresholding, and resampling.

All window operations replicate edge pixels at the borders.

:author: Doug Skrypa
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..exceptions import InvalidArgument
from .raster import RasterImage

__all__ = [
    'correlate',
    'gaussian_kernel',
    'gaussian_blur',
    'box_filter',
    'median_filter',
    'sobel',
    'otsu_threshold',
    'resize_bilinear',
    'resize_array',
]

SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
SOBEL_Y = SOBEL_X.T


def correlate(values: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """
    Correlate a 2D array with the given kernel (no kernel flip), replicating edge values.

    :param values: A 2D array
    :param kernel: A 2D kernel with odd height and width
    :return: A float64 array with the same shape as ``values``
    """
    kh, kw = kernel.shape
    ry, rx = kh // 2, kw // 2
    height, width = values.shape
    padded = np.pad(values.astype(np.float64, copy=False), ((ry, ry), (rx, rx)), mode='edge')
    out = np.zeros((height, width), dtype=np.float64)
    for dy in range(kh):
        for dx in range(kw):
            if weight := kernel[dy, dx]:
                out += weight * padded[dy : dy + height, dx : dx + width]
    return out


def gaussian_kernel(size: int = 5, sigma: float = 1.4) -> np.ndarray:
    offsets = np.arange(size, dtype=np.float64) - size // 2
    row = np.exp(-(offsets**2) / (2 * sigma**2))
    kernel = np.outer(row, row)
    return kernel / kernel.sum()


def gaussian_blur(values: np.ndarray, size: int = 5, sigma: float = 1.4) -> np.ndarray:
    return correlate(values, gaussian_kernel(size, sigma))


def box_filter(values: np.ndarray, size: int = 5) -> np.ndarray:
    return correlate(values, np.full((size, size), 1 / (size * size)))


def median_filter(img: RasterImage, radius: int = 1) -> RasterImage:
    """
    Replace each sample with the median of the ``(2r + 1)²`` window around it, per channel.

    :param img: The image to filter
    :param radius: The window radius (>= 1)
    :return: A new image with the same dimensions and color space
    """
    if radius < 1:
        raise InvalidArgument(f'Invalid {radius=} - expected an integer >= 1')
    size = 2 * radius + 1
    middle = size * size // 2
    if img.channels == 1:
        return img.with_pixels(_median_2d(img.pixels, radius, size, middle))
    channels = [_median_2d(img.pixels[:, :, c], radius, size, middle) for c in range(img.channels)]
    return img.with_pixels(np.stack(channels, axis=2))


def _median_2d(values: np.ndarray, radius: int, size: int, middle: int) -> np.ndarray:
    padded = np.pad(values, radius, mode='edge')
    windows = sliding_window_view(padded, (size, size)).reshape(values.shape[0], values.shape[1], size * size)
    return np.partition(windows, middle, axis=-1)[:, :, middle]


def sobel(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Horizontal and vertical 3x3 Sobel responses; ``gx`` is positive where values increase to the right."""
    return correlate(values, SOBEL_X), correlate(values, SOBEL_Y)


def otsu_threshold(values: np.ndarray, mask: Optional[np.ndarray] = None) -> int:
    """
    Find the 8-bit threshold that maximizes the between-class variance of ``values <= t`` vs ``values > t``.

    :param values: An array of 8-bit values
    :param mask: Optional boolean array selecting the values to consider
    :return: The threshold ``t``; when every value is equal, ``t`` is that value (so ``values > t`` is empty)
    """
    samples = values[mask] if mask is not None else values.reshape(-1)
    counts = np.bincount(samples.astype(np.int64).reshape(-1), minlength=256).astype(np.float64)
    total = counts.sum()
    if total == 0:
        return 255
    levels = np.arange(256, dtype=np.float64)
    weight_low = np.cumsum(counts)
    weight_high = total - weight_low
    sum_low = np.cumsum(counts * levels)
    mean_low = sum_low / np.where(weight_low > 0, weight_low, 1)
    mean_high = (sum_low[-1] - sum_low) / np.where(weight_high > 0, weight_high, 1)
    between = weight_low * weight_high * (mean_low - mean_high) ** 2
    between[(weight_low == 0) | (weight_high == 0)] = -1
    if between.max() < 0:
        return int(samples.max())
    return int(np.argmax(between))


def resize_array(values: np.ndarray, width: int, height: int) -> np.ndarray:
    """
    Bilinear resize of a 2D (or 3D channels-last) array using pixel-center alignment.

    :return: A float64 array with shape ``(height, width[, channels])``
    """
    src_h, src_w = values.shape[:2]
    values = values.astype(np.float64, copy=False)
    ys = np.clip((np.arange(height) + 0.5) * src_h / height - 0.5, 0, src_h - 1)
    xs = np.clip((np.arange(width) + 0.5) * src_w / width - 0.5, 0, src_w - 1)
    y0 = np.floor(ys).astype(np.int64)
    x0 = np.floor(xs).astype(np.int64)
    y1 = np.minimum(y0 + 1, src_h - 1)
    x1 = np.minimum(x0 + 1, src_w - 1)
    fy = ys - y0
    fx = xs - x0
    if values.ndim == 3:
        fy = fy[:, None, None]
        fx = fx[None, :, None]
    else:
        fy = fy[:, None]
        fx = fx[None, :]

    top = values[y0][:, x0] * (1 - fx) + values[y0][:, x1] * fx
    bottom = values[y1][:, x0] * (1 - fx) + values[y1][:, x1] * fx
    return top * (1 - fy) + bottom * fy


def resize_bilinear(img: RasterImage, width: int, height: int) -> RasterImage:
    if (width, height) == (img.width, img.height):
        return img
    resized = resize_array(img.pixels, width, height)
    return img.with_pixels(np.clip(np.floor(resized + 0.5), 0, 255).astype(np.uint8))
