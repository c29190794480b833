"""
Rotation about the image center with bilinear (images) or nearest neighbor (masks) sampling.

Positive angles rotate counterclockwise as seen on screen.  Unless an explicit output size is given, the output canvas
is expanded to contain the whole rotated image; canvases always share their center.

:author: Doug Skrypa
"""

from __future__ import annotations

from math import ceil, cos, radians, sin
from typing import Optional, Sequence, Union

import numpy as np

from .raster import BinaryMask, RasterImage

__all__ = ['rotate', 'derotate', 'rotate_mask', 'rotated_size', 'rotate_points']

Fill = Union[int, Sequence[int]]


def rotated_size(width: int, height: int, angle: float) -> tuple[int, int]:
    """The ``(width, height)`` of the smallest canvas containing a ``width x height`` image rotated by ``angle``."""
    theta = radians(angle)
    c, s = abs(cos(theta)), abs(sin(theta))
    return ceil(width * c + height * s - 1e-6), ceil(width * s + height * c - 1e-6)


def rotate(
    img: RasterImage, angle: float, fill: Fill = 0, out_size: Optional[tuple[int, int]] = None
) -> RasterImage:
    """
    Rotate an image counterclockwise by ``angle`` degrees about its center.

    :param img: The image to rotate
    :param angle: Rotation angle in degrees
    :param fill: Value (or per-channel values) for output pixels that map outside the source image
    :param out_size: Output ``(width, height)`` (default: the expanded extent from :func:`rotated_size`)
    :return: A new image
    """
    out_w, out_h = out_size or rotated_size(img.width, img.height, angle)
    if angle == 0 and (out_w, out_h) == (img.width, img.height):
        return img.with_pixels(img.pixels.copy())

    sx, sy = _source_coords(img.width, img.height, angle, out_w, out_h)
    inside = (sx >= -1e-6) & (sx <= img.width - 1 + 1e-6) & (sy >= -1e-6) & (sy <= img.height - 1 + 1e-6)
    sx = np.clip(sx, 0, img.width - 1)
    sy = np.clip(sy, 0, img.height - 1)
    x0 = np.floor(sx).astype(np.int64)
    y0 = np.floor(sy).astype(np.int64)
    x1 = np.minimum(x0 + 1, img.width - 1)
    y1 = np.minimum(y0 + 1, img.height - 1)
    fx = sx - x0
    fy = sy - y0

    values = img.pixels.astype(np.float64)
    if values.ndim == 3:
        fx, fy, inside = fx[..., None], fy[..., None], inside[..., None]
    top = values[y0, x0] * (1 - fx) + values[y0, x1] * fx
    bottom = values[y1, x0] * (1 - fx) + values[y1, x1] * fx
    sampled = np.floor(top * (1 - fy) + bottom * fy + 0.5)

    fill_values = np.broadcast_to(np.asarray(fill, dtype=np.float64), sampled.shape[2:] or ())
    out = np.where(inside, sampled, fill_values)
    return img.with_pixels(np.clip(out, 0, 255).astype(np.uint8))


def derotate(
    img: RasterImage, angle: float, fill: Fill = 0, out_size: Optional[tuple[int, int]] = None
) -> RasterImage:
    """Undo a counterclockwise rotation of ``angle`` degrees (i.e., rotate by ``-angle``)."""
    return rotate(img, -angle, fill, out_size)


def rotate_mask(mask: BinaryMask, angle: float, out_size: Optional[tuple[int, int]] = None) -> BinaryMask:
    out_w, out_h = out_size or rotated_size(mask.width, mask.height, angle)
    if angle == 0 and (out_w, out_h) == (mask.width, mask.height):
        return mask
    sx, sy = _source_coords(mask.width, mask.height, angle, out_w, out_h)
    xi = np.floor(sx + 0.5).astype(np.int64)
    yi = np.floor(sy + 0.5).astype(np.int64)
    inside = (xi >= 0) & (xi < mask.width) & (yi >= 0) & (yi < mask.height)
    bits = np.zeros((out_h, out_w), dtype=bool)
    bits[inside] = mask.bits[yi[inside], xi[inside]]
    return BinaryMask(bits)


def rotate_points(
    points: np.ndarray, angle: float, src_size: tuple[int, int], out_size: Optional[tuple[int, int]] = None
) -> np.ndarray:
    """
    Map ``(x, y)`` points from a ``src_size`` canvas into the canvas produced by :func:`rotate` with the same angle.

    :return: A float64 array with shape ``(n, 2)``
    """
    src_w, src_h = src_size
    out_w, out_h = out_size or rotated_size(src_w, src_h, angle)
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    theta = radians(angle)
    c, s = cos(theta), sin(theta)
    dx = points[:, 0] - (src_w - 1) / 2
    dy = points[:, 1] - (src_h - 1) / 2
    x = (out_w - 1) / 2 + dx * c + dy * s
    y = (out_h - 1) / 2 - dx * s + dy * c
    return np.stack([x, y], axis=1)


def _source_coords(width: int, height: int, angle: float, out_w: int, out_h: int) -> tuple[np.ndarray, np.ndarray]:
    theta = radians(angle)
    c, s = cos(theta), sin(theta)
    oy, ox = np.mgrid[0:out_h, 0:out_w].astype(np.float64)
    ox -= (out_w - 1) / 2
    oy -= (out_h - 1) / 2
    sx = (width - 1) / 2 + ox * c - oy * s
    sy = (height - 1) / 2 + ox * s + oy * c
    return sx, sy
