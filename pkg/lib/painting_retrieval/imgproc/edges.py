"""
Canny edge detection: 5x5 gaussian (sigma 1.4), 3x3 Sobel, 4-direction non-maximum suppression, hysteresis.

:author: Doug Skrypa
"""

from __future__ import annotations

import numpy as np

from ..exceptions import InvalidThresholds, MultiChannelInput
from .contours import label_components
from .filters import gaussian_blur, sobel
from .raster import BinaryMask, RasterImage

__all__ = ['canny', 'canny_edges', 'non_max_suppression']


def canny(img: RasterImage, low: float, high: float) -> BinaryMask:
    """
    :param img: A single-channel image
    :param low: Gradient magnitude that weak edge pixels must reach
    :param high: Gradient magnitude that strong edge pixels must reach
    :return: A mask of edge pixels with the same dimensions as the image
    """
    if img.channels != 1:
        raise MultiChannelInput
    return BinaryMask(canny_edges(img.pixels, low, high))


def canny_edges(values: np.ndarray, low: float, high: float) -> np.ndarray:
    if low < 0 or low > high:
        raise InvalidThresholds(low, high)

    gx, gy = sobel(gaussian_blur(values))
    magnitude = np.hypot(gx, gy)
    thin = non_max_suppression(magnitude, gx, gy)
    strong = thin >= high
    weak = thin >= low
    if not strong.any():
        return np.zeros(values.shape, dtype=bool)

    labels, count = label_components(weak)
    keep = np.zeros(count + 1, dtype=bool)
    keep[np.unique(labels[strong])] = True
    keep[0] = False
    return keep[labels]


def non_max_suppression(magnitude: np.ndarray, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    """
    Zero every pixel that is not a maximum along its quantized gradient direction.  A pixel must be strictly greater
    than its neighbor on the negative side and at least equal to the one on the positive side, so symmetric ridges
    yield a single pixel.
    """
    height, width = magnitude.shape
    angle = np.degrees(np.arctan2(gy, gx)) % 180
    sector = np.zeros(magnitude.shape, dtype=np.int8)  # 0: horizontal gradient
    sector[(angle >= 22.5) & (angle < 67.5)] = 1
    sector[(angle >= 67.5) & (angle < 112.5)] = 2
    sector[(angle >= 112.5) & (angle < 157.5)] = 3

    padded = np.pad(magnitude, 1, constant_values=0)

    def shifted(dx: int, dy: int) -> np.ndarray:
        return padded[1 + dy : 1 + dy + height, 1 + dx : 1 + dx + width]

    keep = np.zeros(magnitude.shape, dtype=bool)
    for index, (dx, dy) in enumerate(((1, 0), (1, 1), (0, 1), (-1, 1))):
        selected = sector == index
        is_max = (magnitude > shifted(-dx, -dy)) & (magnitude >= shifted(dx, dy))
        keep |= selected & is_max

    return np.where(keep & (magnitude > 0), magnitude, 0.0)
