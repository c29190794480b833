"""
FAST corner detection over a small image pyramid, and intensity-centroid orientation.

:author: Doug Skrypa
"""

from __future__ import annotations

import logging
from enum import Enum
from functools import lru_cache
from math import atan2, degrees
from typing import NamedTuple, Optional, Union

import numpy as np

from ..exceptions import InvalidArgument, PatchOutOfBounds
from ..imgproc.filters import box_filter
from ..imgproc.morphology import MorphOp, StructuringElement, apply_morphology
from ..imgproc.raster import BinaryMask, ColorSpace, RasterImage, convert_color, to_gray
from ..utils import MissingMixin

__all__ = [
    'FeatureChannel',
    'Keypoint',
    'Pyramid',
    'feature_plane',
    'keypoint_region',
    'fast_scores',
    'fast_detect',
    'detect_keypoints',
    'orient_keypoint',
    'PATCH_RADIUS',
]
log = logging.getLogger(__name__)

PATCH_RADIUS = 15
ARC_LENGTH = 9

# (dx, dy) for the 16 pixels of a radius 3 Bresenham circle, clockwise from the top
CIRCLE = (
    (0, -3), (1, -3), (2, -2), (3, -1), (3, 0), (3, 1), (2, 2), (1, 3),
    (0, 3), (-1, 3), (-2, 2), (-3, 1), (-3, 0), (-3, -1), (-2, -2), (-1, -3),
)  # fmt: skip


#: Keypoints closer than this to a pixel outside the mask are dropped
MASK_MARGIN = 4


class FeatureChannel(MissingMixin, Enum):
    LUMA = 'luma'
    #: ``max(R, G, B)``, which hue rotations leave unchanged
    VALUE = 'value'


def feature_plane(img: RasterImage, channel: Union[FeatureChannel, str] = FeatureChannel.VALUE) -> RasterImage:
    """The single-channel image that keypoints are detected and described on"""
    if img.channels == 1 or FeatureChannel(channel) is FeatureChannel.LUMA:
        return to_gray(img)
    return convert_color(img, ColorSpace.HSV).channel(2)


def keypoint_region(mask: BinaryMask, margin: int = MASK_MARGIN) -> np.ndarray:
    """The pixels of the mask that are at least ``margin`` pixels away from any excluded pixel"""
    if margin < 1:
        return mask.bits
    return apply_morphology(MorphOp.ERODE, mask.bits, StructuringElement.square(2 * margin + 1))


class Keypoint(NamedTuple):
    """
    :param x: Column in the full resolution image
    :param y: Row in the full resolution image
    :param score: FAST corner response
    :param orientation: Degrees in ``[0, 360)``, counterclockwise on screen
    :param octave: The pyramid level the keypoint was detected in
    """

    x: float
    y: float
    score: float
    orientation: float = 0.0
    octave: int = 0


class Pyramid:
    """
    Half-scale pyramid of a gray image; each level is the rounded 2x2 mean of the previous one.  Coordinate ``x`` at
    level ``n`` corresponds to ``x * 2**n + (2**n - 1) / 2`` at level 0.
    """

    __slots__ = ('levels', '_smoothed')

    def __init__(self, img: RasterImage, levels: int = 3):
        current = to_gray(img).pixels.astype(np.int16)
        self.levels = [current]
        for _ in range(levels - 1):
            height, width = current.shape[0] // 2 * 2, current.shape[1] // 2 * 2
            if height < 2 or width < 2:
                break
            quads = current[:height, :width].reshape(height // 2, 2, width // 2, 2).sum(axis=(1, 3))
            current = ((quads + 2) // 4).astype(np.int16)
            self.levels.append(current)
        self._smoothed = {}

    def __len__(self) -> int:
        return len(self.levels)

    def smoothed(self, octave: int) -> np.ndarray:
        """The given level after a 5x5 box filter"""
        try:
            return self._smoothed[octave]
        except KeyError:
            self._smoothed[octave] = values = box_filter(self.levels[octave].astype(np.float64), 5)
            return values

    @staticmethod
    def to_level(kp: Keypoint) -> tuple[int, int]:
        """The integer ``(x, y)`` position of the given keypoint within its own pyramid level"""
        scale = 2**kp.octave
        offset = (scale - 1) / 2
        return int(round((kp.x - offset) / scale)), int(round((kp.y - offset) / scale))

    @staticmethod
    def from_level(x: int, y: int, octave: int) -> tuple[float, float]:
        scale = 2**octave
        offset = (scale - 1) / 2
        return x * scale + offset, y * scale + offset


# region Detection


def fast_scores(values: np.ndarray, threshold: int, border: int = 3) -> np.ndarray:
    """
    FAST-16 corner responses.  A pixel is a corner when at least 9 contiguous circle pixels are all brighter than
    ``p + threshold`` or all darker than ``p - threshold``; its score is the sum of absolute differences between ``p``
    and the circle pixels of that polarity.

    :param values: A 2D integer array
    :param threshold: Intensity difference threshold (>= 1)
    :param border: Pixels closer than this to the edge are never corners (at least 3)
    :return: A float64 array with the same shape as ``values``; 0 where the pixel is not a corner
    """
    if threshold < 1:
        raise InvalidArgument(f'Invalid {threshold=} - expected an integer >= 1')
    border = max(border, 3)
    height, width = values.shape
    scores = np.zeros((height, width), dtype=np.float64)
    if height <= 2 * border or width <= 2 * border:
        return scores

    values = values.astype(np.int32)
    center = values[border : height - border, border : width - border]
    diffs = np.stack(
        [values[border + dy : height - border + dy, border + dx : width - border + dx] - center for dx, dy in CIRCLE]
    )
    brighter = diffs > threshold
    darker = diffs < -threshold
    bright_score = np.where(_longest_arc(brighter) >= ARC_LENGTH, np.where(brighter, diffs, 0).sum(axis=0), 0)
    dark_score = np.where(_longest_arc(darker) >= ARC_LENGTH, np.where(darker, -diffs, 0).sum(axis=0), 0)
    scores[border : height - border, border : width - border] = np.maximum(bright_score, dark_score)
    return scores


def _longest_arc(flags: np.ndarray) -> np.ndarray:
    """Longest run of ``True`` values around the circle (capped at 16) for each pixel"""
    wrapped = np.concatenate([flags, flags[: ARC_LENGTH - 1]])
    run = np.zeros(flags.shape[1:], dtype=np.int16)
    longest = np.zeros(flags.shape[1:], dtype=np.int16)
    for ring_flags in wrapped:
        run = (run + 1) * ring_flags
        np.maximum(longest, run, out=longest)
    return longest


def _suppress_non_max(scores: np.ndarray) -> np.ndarray:
    height, width = scores.shape
    padded = np.pad(scores, 1)
    keep = scores > 0
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy == dx == 0:
                continue
            neighbor = padded[1 + dy : 1 + dy + height, 1 + dx : 1 + dx + width]
            # Plateaus keep only their first pixel in raster order
            keep &= scores > neighbor if (dy, dx) < (0, 0) else scores >= neighbor
    return keep


def detect_keypoints(
    pyramid: Pyramid, threshold: int, max_keypoints: int, border: int = 3, region: Optional[np.ndarray] = None
) -> list[Keypoint]:
    """
    Detect non-max-suppressed FAST corners on every pyramid level and keep the strongest ``max_keypoints``.

    :param region: Optional boolean array shaped like pyramid level 0; corners outside it are dropped before the
      strongest are kept
    :return: Keypoints in level 0 coordinates sorted by descending score (ties: octave, row, column)
    """
    found = []
    for octave, values in enumerate(pyramid.levels):
        scores = fast_scores(values, threshold, border)
        ys, xs = np.nonzero(_suppress_non_max(scores))
        found.extend((scores[y, x], octave, y, x) for y, x in zip(ys.tolist(), xs.tolist()))

    found.sort(key=lambda f: (-f[0], f[1], f[2], f[3]))
    keypoints = []
    for score, octave, y, x in found:
        kx, ky = Pyramid.from_level(x, y, octave)
        if region is not None and not region[int(ky + 0.5), int(kx + 0.5)]:
            continue
        keypoints.append(Keypoint(kx, ky, float(score), 0.0, octave))
        if len(keypoints) == max_keypoints:
            break
    return keypoints


def fast_detect(img: RasterImage, threshold: int = 20, max_keypoints: int = 500, levels: int = 3) -> list[Keypoint]:
    """
    :param img: The image to search (non-GRAY images are converted)
    :param threshold: Intensity difference threshold
    :param max_keypoints: The maximum number of keypoints to return
    :param levels: The number of pyramid levels to search
    :return: Keypoints in full resolution coordinates sorted by descending score
    """
    return detect_keypoints(Pyramid(img, levels), threshold, max_keypoints)


# endregion

# region Orientation


@lru_cache(4)
def disc_offsets(radius: int) -> tuple[np.ndarray, np.ndarray]:
    """``(dx, dy)`` offsets of every pixel within ``radius`` of the center"""
    dy, dx = np.mgrid[-radius : radius + 1, -radius : radius + 1]
    inside = dx * dx + dy * dy <= radius * radius
    return dx[inside], dy[inside]


def check_patch(values: np.ndarray, x: int, y: int, radius: int):
    height, width = values.shape
    if x - radius < 0 or y - radius < 0 or x + radius >= width or y + radius >= height:
        raise PatchOutOfBounds(x, y, radius)


def orient_keypoint(
    source: Union[RasterImage, Pyramid], kp: Keypoint, radius: int = PATCH_RADIUS
) -> Keypoint:
    """
    Assign the intensity-centroid orientation of the circular patch around the keypoint.  A patch whose moments are
    both zero gets orientation 0.

    :param source: The image (or its pyramid) the keypoint was detected in
    :param kp: The keypoint to orient
    :param radius: The patch radius, in pixels of the keypoint's pyramid level
    :return: A copy of the keypoint with its orientation set
    """
    pyramid = source if isinstance(source, Pyramid) else Pyramid(source, kp.octave + 1)
    values = pyramid.levels[kp.octave]
    x, y = Pyramid.to_level(kp)
    check_patch(values, x, y, radius)
    dx, dy = disc_offsets(radius)
    intensities = values[y + dy, x + dx].astype(np.int64)
    m10 = int((dx * intensities).sum())
    m01 = int((dy * intensities).sum())
    if m10 == 0 and m01 == 0:
        return kp._replace(orientation=0.0)
    # Rows increase downward, so m01 is negated for a counterclockwise angle
    angle = degrees(atan2(-m01, m10)) % 360
    return kp._replace(orientation=0.0 if angle >= 360 else angle)


# endregion
