"""
Rotation estimation for photographed paintings, using either the minimum-area rectangle around the largest contour or
the mean angle of the strongest near-horizontal Hough lines.

All angles are in degrees, counterclockwise on screen, within ``(-90, 90]``.

:author: Doug Skrypa
"""

from __future__ import annotations

import logging
from enum import Enum
from math import pi, radians
from typing import TYPE_CHECKING, NamedTuple, Union

import numpy as np

from ..exceptions import NoLinesFound, NoPaintingFound
from ..imgproc.contours import find_contours, lowest_edge_angle, min_area_rect
from ..imgproc.edges import canny
from ..imgproc.hough import hough_lines
from ..imgproc.morphology import MorphOp, StructuringElement, morph_mask
from ..imgproc.raster import RasterImage, to_gray
from ..utils import MissingMixin

if TYPE_CHECKING:
    from ..config import RunConfig

__all__ = [
    'RotationMethod',
    'RotationParams',
    'estimate_rotation',
    'estimate_rotation_rect',
    'estimate_rotation_hough',
    'robust_mean_angle',
]
log = logging.getLogger(__name__)


class RotationMethod(MissingMixin, Enum):
    RECT = 'rect'  #: Minimum-area rectangle around the largest contour
    HOUGH = 'hough'  #: Mean angle of the strongest near-horizontal lines


class RotationParams(NamedTuple):
    canny_low: float = 30.0
    canny_high: float = 80.0
    close_size: int = 15
    rho_step: float = 1.0
    #: Hough theta resolution, in degrees
    theta_step: float = 0.5
    vote_fraction: float = 0.15
    max_lines: int = 10
    outlier_mads: float = 2.5

    @classmethod
    def from_config(cls, config: RunConfig) -> RotationParams:
        return cls(
            config.canny_low,
            config.canny_high,
            config.close_size,
            config.hough_rho_step,
            config.hough_theta_step,
            config.hough_vote_fraction,
            config.hough_max_lines,
            config.hough_outlier_mads,
        )


def estimate_rotation(
    img: RasterImage,
    method: Union[RotationMethod, str] = RotationMethod.HOUGH,
    params: RotationParams = RotationParams(),
) -> float:
    if RotationMethod(method) is RotationMethod.RECT:
        return estimate_rotation_rect(img, params)
    return estimate_rotation_hough(img, params)


def estimate_rotation_rect(img: RasterImage, params: RotationParams = RotationParams()) -> float:
    """
    Fit the minimum-area rectangle around the largest closed edge contour, and return the angle of the segment that
    joins its two lowest corners.

    :raises: :class:`NoPaintingFound` if the image contains no edges
    """
    edges = canny(to_gray(img), params.canny_low, params.canny_high)
    closed = morph_mask(MorphOp.CLOSE, edges, StructuringElement.square(params.close_size))
    if not (contours := find_contours(closed)):
        raise NoPaintingFound
    rect = min_area_rect(contours[0].points)
    angle = lowest_edge_angle(rect.corners())
    log.debug(f'Estimated rotation={angle:.2f} from {rect}')
    return angle


def estimate_rotation_hough(img: RasterImage, params: RotationParams = RotationParams()) -> float:
    """
    Average the angles of the strongest near-horizontal Hough lines (normals within 45 degrees of vertical), after
    discarding angles that are more than ``outlier_mads`` median absolute deviations from the median.

    :raises: :class:`NoLinesFound` if no near-horizontal line has enough support
    """
    gray = to_gray(img)
    edges = canny(gray, params.canny_low, params.canny_high)
    threshold = max(1, round(params.vote_fraction * min(gray.width, gray.height)))
    lines = hough_lines(edges, params.rho_step, radians(params.theta_step), threshold)
    horizontal = [line for line in lines if abs(line.theta - pi / 2) <= pi / 4 + 1e-9][: params.max_lines]
    if not horizontal:
        raise NoLinesFound
    angle = robust_mean_angle([line.angle for line in horizontal], params.outlier_mads)
    log.debug(f'Estimated rotation={angle:.2f} from {len(horizontal)} lines')
    return angle


def robust_mean_angle(angles: list[float], outlier_mads: float = 2.5) -> float:
    """
    Mean of the given angles after discarding outliers.  When more than half of the angles are identical (so the
    median absolute deviation is 0), only the angles equal to the median are kept.
    """
    if not angles:
        raise NoLinesFound
    values = np.asarray(angles, dtype=np.float64)
    median = np.median(values)
    deviation = np.abs(values - median)
    mad = np.median(deviation)
    kept = values[deviation <= outlier_mads * mad + 1e-9]
    angle = float(kept.mean())
    return angle + 180 if angle <= -90 else angle
