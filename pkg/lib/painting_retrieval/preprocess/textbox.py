"""
Detection of the superimposed text boxes that carry each painting's author name.

Every LAB channel is searched with both a top-hat and a black-hat transform.  A hat picks out either a whole box or
only the letters printed on it (dark letters on a bright box respond to the black-hat), so each region found is also
grown to the straight edges around it.  The candidate whose geometry best matches where text boxes are placed wins.

:author: Doug Skrypa
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple, Optional, Sequence, Union

import numpy as np

from ..exceptions import BoxOutsideCrop
from ..imgproc.contours import find_contours
from ..imgproc.filters import otsu_threshold
from ..imgproc.morphology import MorphOp, StructuringElement, apply_morphology
from ..imgproc.raster import BinaryMask, ColorSpace, RasterImage, convert_color
from ..metrics import Box
from .base import PaintingCrop

if TYPE_CHECKING:
    from ..config import RunConfig

__all__ = [
    'TextBoxParams',
    'TextBoxCandidate',
    'score_candidate',
    'score_indicators',
    'edge_profile',
    'snap_to_box',
    'detect_textbox_channel',
    'detect_textbox',
    'erase_textbox',
]
log = logging.getLogger(__name__)

HATS = (MorphOp.TOPHAT, MorphOp.BLACKHAT)
#: Target width / height ratio of a text box
TARGET_ASPECT = 4


class TextBoxParams(NamedTuple):
    hat_fraction: float = 0.3
    close_width: int = 25
    close_height: int = 5
    min_area_fraction: float = 0.01
    weights: tuple[float, ...] = (1.0, 1.0, 1.0, 1.0, 1.0)
    ceiling: float = 0.5
    edge_strength: float = 10.0
    edge_margin: float = 0.08

    @classmethod
    def from_config(cls, config: RunConfig) -> TextBoxParams:
        return cls(
            config.textbox_hat_fraction,
            config.textbox_close_width,
            config.textbox_close_height,
            config.textbox_min_area_fraction,
            config.textbox_weights,
            config.textbox_ceiling,
            config.textbox_edge_strength,
            config.textbox_edge_margin,
        )


@dataclass(frozen=True)
class TextBoxCandidate:
    box: Box
    channel: str
    hat: MorphOp
    score: float


# region Scoring


def score_indicators(box: Box, width: int, height: int) -> tuple[float, float, float, float, float]:
    """
    The five placement indicators for a box in a ``width x height`` painting, each 0 for an ideally placed box:

    1. Horizontal distance between the box center and the image center, over ``width``
    2. Vertical distance between the box center and the nearer of ``1/5`` or ``4/5`` of ``height``, over ``height``
    3. Difference between the box's extent left and right of the vertical center line, over ``width``
    4. Total distance of the left and right edges from ``1/6`` and ``5/6`` of ``width``, over ``width``
    5. Distance of the width / height ratio from 4, over 4
    """
    cx, cy = box.center
    centering = abs(cx - width / 2) / width
    band = min(abs(cy - height / 5), abs(cy - 4 * height / 5)) / height
    asymmetry = abs((width / 2 - box.x1) - (box.x2 - width / 2)) / width
    edges = (abs(box.x1 - width / 6) + abs(box.x2 - 5 * width / 6)) / width
    aspect = abs(box.width / box.height - TARGET_ASPECT) / TARGET_ASPECT
    return centering, band, asymmetry, edges, aspect


def score_candidate(box: Box, width: int, height: int, weights: Sequence[float] = (1.0,) * 5) -> float:
    """Weighted sum of the placement indicators (lower is better)"""
    return sum(w * v for w, v in zip(weights, score_indicators(box, width, height)))


# endregion

# region Detection


def _hat_element(channel: RasterImage, params: TextBoxParams) -> StructuringElement:
    side = max(3, round(params.hat_fraction * min(channel.width, channel.height)))
    return StructuringElement.square(side if side % 2 else side + 1)


def edge_profile(plane: np.ndarray, boundaries: np.ndarray, span: slice) -> np.ndarray:
    """
    Strength of a straight horizontal edge between rows ``b - 1`` and ``b`` for each boundary ``b``: the lower quartile,
    over the columns in ``span``, of the difference between the means of rows ``b, b + 1`` and rows ``b - 2, b - 1``.
    Edges that only cross part of the span (letters, painted shapes) stay weak.

    :param plane: A 2D float array
    :param boundaries: Row indexes in ``[2, height - 2]``
    :param span: The columns to consider
    """
    section = plane[:, span]
    inside = section[boundaries] + section[boundaries + 1]
    outside = section[boundaries - 1] + section[boundaries - 2]
    return np.percentile(np.abs(inside - outside) / 2, 25, axis=1)


def _snap_axis(
    plane: np.ndarray, low: int, high: int, span: slice, margin: int, min_strength: float, gap: int = 2
) -> tuple[int, int]:
    """
    Move ``low`` up and ``high`` down onto the strongest pair of full-width edges at least ``gap`` pixels outside the
    current extent, which skips the edges of the outermost letters.  Text is centered in its box, so the two offsets
    may differ by at most a quarter of the current extent (4 px minimum).
    """
    size = plane.shape[0]
    margin = max(2, margin)
    below_low = np.arange(gap, low - margin + 1)
    above_high = np.arange(gap, size - margin - high + 1)
    if not len(below_low) or not len(above_high):
        return low, high
    top = edge_profile(plane, low - below_low, span)
    bottom = edge_profile(plane, high + above_high, span)
    tolerance = max(4, round(0.25 * (high - low)))

    best, pair = -1.0, None
    for i, strength in enumerate(top):
        lo, hi = max(0, i - tolerance), min(len(bottom), i + tolerance + 1)
        if lo >= hi:
            break
        j = lo + int(np.argmax(bottom[lo:hi]))
        if (combined := min(strength, bottom[j])) > best:
            best, pair = combined, (i, j)

    if pair is None or best < min_strength:
        return low, high
    return low - int(below_low[pair[0]]), high + int(above_high[pair[1]])


def snap_to_box(channel: RasterImage, box: Box, params: TextBoxParams = TextBoxParams()) -> Box:
    """
    Grow a candidate (usually the strip of letters) to the edges of the box that surrounds it.  Each side moves to the
    strongest straight edge that crosses the candidate's whole extent and is matched by a similar edge on the opposite
    side.  Sides without such an edge stay where they are.  Left and right edges are not searched within
    ``edge_margin`` of the crop's sides, where painting frames would compete with the box.
    """
    plane = channel.pixels.astype(np.float64)
    y1, y2 = _snap_axis(plane, box.y1, box.y2, slice(box.x1, box.x2), 2, params.edge_strength)
    margin = round(params.edge_margin * channel.width)
    x1, x2 = _snap_axis(plane.T, box.x1, box.x2, slice(box.y1, box.y2), margin, params.edge_strength)
    return Box(x1, y1, x2, y2)


def detect_textbox_channel(
    channel: RasterImage, hat: Union[MorphOp, str], params: TextBoxParams = TextBoxParams(), name: str = 'L'
) -> list[TextBoxCandidate]:
    """
    :param channel: A single-channel image
    :param hat: TOPHAT to find boxes brighter than their surroundings, BLACKHAT for darker boxes
    :param params: Element sizes, area limit, and indicator weights
    :param name: The name of the channel, recorded in each candidate
    :return: Candidates sorted by ascending score.  Each region yields its own bounding box, plus the box that
      :func:`snap_to_box` grows it to when that differs.
    """
    hat = MorphOp(hat)
    values = apply_morphology(hat, channel.pixels, _hat_element(channel, params))
    threshold = otsu_threshold(values)
    foreground = values > threshold
    if not foreground.any():
        return []

    bridge = StructuringElement(params.close_width, params.close_height)
    closed = apply_morphology(MorphOp.CLOSE, foreground, bridge)
    width, height = channel.width, channel.height
    min_area = params.min_area_fraction * width * height
    candidates = []
    for contour in find_contours(BinaryMask(closed)):
        box = Box(*contour.bbox)
        if box.area < min_area:
            continue
        snapped = snap_to_box(channel, box, params)
        for found in {box, snapped}:
            score = score_candidate(found, width, height, params.weights)
            candidates.append(TextBoxCandidate(found, name, hat, score))

    candidates.sort(key=lambda c: c.score)
    return candidates


def detect_textbox(img: RasterImage, params: TextBoxParams = TextBoxParams()) -> Optional[TextBoxCandidate]:
    """
    Search the L, A, and B channels with both hat transforms, and return the best scoring candidate if its score is
    below the acceptance ceiling.
    """
    if img.channels == 1:
        channels = [('L', img)]
    else:
        lab = convert_color(img, ColorSpace.LAB)
        channels = [(name, lab.channel(i)) for i, name in enumerate('LAB')]

    best = None
    for name, channel in channels:
        for hat in HATS:
            for candidate in detect_textbox_channel(channel, hat, params, name):
                if best is None or candidate.score < best.score:
                    best = candidate
                break  # Candidates are sorted, so only the first can win

    if best is None or best.score >= params.ceiling:
        log.debug(f'No text box found in {img} (best={best})')
        return None
    log.debug(f'Found text box={best.box} in {img} with score={best.score:.4f} ({best.channel}, {best.hat.name})')
    return best


def erase_textbox(crop: PaintingCrop, box: Box) -> PaintingCrop:
    """
    Exclude the given box from the crop's mask so descriptors ignore it.

    :raises: :class:`BoxOutsideCrop` if the box does not fit within the crop
    """
    width, height = crop.image.width, crop.image.height
    if box.x1 < 0 or box.y1 < 0 or box.x2 > width or box.y2 > height:
        raise BoxOutsideCrop(box, width, height)
    bits = crop.mask.bits.copy()
    bits[box.y1 : box.y2, box.x1 : box.x2] = False
    return crop.replace(mask=BinaryMask(bits), text_box=box)


# endregion
