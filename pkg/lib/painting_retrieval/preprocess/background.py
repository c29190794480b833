"""
Background removal: separates up to three paintings from the wall they hang on.

:author: Doug Skrypa
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, NamedTuple

import numpy as np

from ..exceptions import NoPaintingFound
from ..imgproc.contours import fill_contours, find_contours
from ..imgproc.edges import canny_edges
from ..imgproc.morphology import MorphOp, StructuringElement, apply_morphology
from ..imgproc.raster import BinaryMask, RasterImage, to_gray
from .base import PaintingCrop, border_ring

if TYPE_CHECKING:
    from ..config import RunConfig

__all__ = ['BackgroundParams', 'has_wall', 'painting_masks', 'remove_background']
log = logging.getLogger(__name__)


class BackgroundParams(NamedTuple):
    canny_low: float = 30.0
    canny_high: float = 80.0
    close_size: int = 15
    min_area_fraction: float = 0.02
    max_paintings: int = 3
    wall_tolerance: int = 12
    flat_ring_fraction: float = 0.5

    @classmethod
    def from_config(cls, config: RunConfig) -> BackgroundParams:
        return cls(
            config.canny_low,
            config.canny_high,
            config.close_size,
            config.min_area_fraction,
            config.max_paintings,
            config.wall_tolerance,
            config.flat_ring_fraction,
        )


def has_wall(img: RasterImage, params: BackgroundParams = BackgroundParams()) -> bool:
    """
    Whether the image border shows a flat wall: at least ``flat_ring_fraction`` of the border pixels are within
    ``wall_tolerance`` gray levels of the border's median.
    """
    ring = border_ring(to_gray(img))[:, 0].astype(np.int64)
    near = np.abs(ring - np.median(ring)) <= params.wall_tolerance
    return near.mean() >= params.flat_ring_fraction


def _edges(img: RasterImage, params: BackgroundParams, wall: bool) -> tuple[np.ndarray, int]:
    gray = to_gray(img)
    if wall:
        # Pad with the wall so paintings near the border still get a closed outline
        pad = params.close_size // 2 + 3
        fill = int(np.median(border_ring(gray)))
        padded = np.pad(gray.pixels, pad, mode='constant', constant_values=fill)
        return canny_edges(padded.astype(np.float64), params.canny_low, params.canny_high), pad

    # The painting fills the frame, so the image boundary is its outline
    edges = canny_edges(gray.pixels.astype(np.float64), params.canny_low, params.canny_high)
    edges[0, :] = edges[-1, :] = edges[:, 0] = edges[:, -1] = True
    return edges, 0


def painting_masks(img: RasterImage, params: BackgroundParams = BackgroundParams()) -> list[BinaryMask]:
    """
    Find the filled outline of each painting.  Candidates are processed in descending area order, and each one loses
    the pixels claimed by larger ones, so the returned masks never overlap.

    :return: Up to ``max_paintings`` masks with the same size as the image, in descending area order
    """
    wall = has_wall(img, params)
    edges, pad = _edges(img, params, wall)
    closed = apply_morphology(MorphOp.CLOSE, edges, StructuringElement.square(params.close_size))
    height, width = closed.shape
    min_area = params.min_area_fraction * img.width * img.height

    claimed = np.zeros((img.height, img.width), dtype=bool)
    candidates = []
    for contour in find_contours(BinaryMask(closed)):
        if contour.area < min_area:  # Sorted by descending area, so every remaining contour is smaller
            break
        filled = fill_contours([contour], width, height).bits[pad : height - pad, pad : width - pad] & ~claimed
        if (area := int(filled.sum())) >= min_area:
            claimed |= filled
            candidates.append((area, len(candidates), filled))

    candidates.sort(key=lambda c: (-c[0], c[1]))
    log.debug(f'Found {len(candidates)} painting candidates in {img} ({wall=})')
    return [BinaryMask(bits) for _, _, bits in candidates[: params.max_paintings]]


def remove_background(img: RasterImage, params: BackgroundParams = BackgroundParams()) -> list[PaintingCrop]:
    """
    Separate the paintings in the given image from the wall.

    :param img: A query image
    :param params: Edge, closing, and area settings
    :return: One crop per painting (at most ``max_paintings``), ordered left to right
    :raises: :class:`NoPaintingFound` if no contour encloses at least ``min_area_fraction`` of the image
    """
    if not (masks := painting_masks(img, params)):
        raise NoPaintingFound

    boxes = []
    for mask in masks:
        ys, xs = np.nonzero(mask.bits)
        boxes.append((int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1))

    order = sorted(range(len(masks)), key=lambda i: (boxes[i][0], boxes[i][1]))
    crops = []
    for index, i in enumerate(order):
        x1, y1, x2, y2 = boxes[i]
        image = RasterImage(img.pixels[y1:y2, x1:x2], img.space, img.source, index)
        crops.append(PaintingCrop(image, masks[i].crop(x1, y1, x2, y2), (x1, y1)))
    return crops
