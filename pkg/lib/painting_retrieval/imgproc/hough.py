"""
Standard (rho, theta) Hough transform for straight lines.

:author: Doug Skrypa
"""

from __future__ import annotations

import logging
from math import ceil, cos, degrees, hypot, pi, sin

import numpy as np

from ..exceptions import InvalidArgument
from .raster import BinaryMask

__all__ = ['LineSegment', 'hough_accumulator', 'hough_lines']
log = logging.getLogger(__name__)

_CHUNK = 2048


class LineSegment:
    """
    A line in normal form: ``x * cos(theta) + y * sin(theta) = rho``, with ``y`` increasing downward.

    :param rho: Signed distance from the origin, in pixels
    :param theta: Normal angle in radians, in ``[0, pi)``
    :param support: The number of accumulator votes
    """

    __slots__ = ('rho', 'theta', 'support')

    def __init__(self, rho: float, theta: float, support: int):
        self.rho = rho
        self.theta = theta
        self.support = support

    def __repr__(self) -> str:
        theta = degrees(self.theta)
        return f'<{self.__class__.__name__}[rho={self.rho:.1f}, theta={theta:.2f}, support={self.support}]>'

    @property
    def angle(self) -> float:
        """On-screen counterclockwise angle of the line itself, in degrees within ``(-90, 90]``"""
        angle = 90 - degrees(self.theta)
        return angle - 180 if angle > 90 else angle

    def y_at(self, x: float) -> float:
        return (self.rho - x * cos(self.theta)) / sin(self.theta)


def hough_accumulator(
    edges: BinaryMask, rho_step: float = 1.0, theta_step: float = pi / 360
) -> tuple[np.ndarray, np.ndarray, float]:
    """
    Accumulate votes from every edge pixel.

    :return: Tuple of (int64 votes with shape ``(rho bins, theta bins)``, theta values, rho offset) where rho bin
      ``i`` corresponds to ``rho = i * rho_step - offset``
    """
    if rho_step <= 0 or theta_step <= 0:
        raise InvalidArgument(f'Invalid {rho_step=} / {theta_step=} - both must be > 0')
    thetas = np.arange(0, pi, theta_step)
    offset = float(ceil(hypot(edges.width, edges.height)))
    n_rho = int(ceil(2 * offset / rho_step)) + 1
    ys, xs = np.nonzero(edges.bits)
    votes = np.zeros(n_rho * len(thetas), dtype=np.int64)
    cos_t, sin_t, columns = np.cos(thetas)[None, :], np.sin(thetas)[None, :], np.arange(len(thetas))[None, :]
    for start in range(0, len(xs), _CHUNK):
        x, y = xs[start : start + _CHUNK, None], ys[start : start + _CHUNK, None]
        rho_idx = np.floor((x * cos_t + y * sin_t + offset) / rho_step + 0.5).astype(np.int64)
        votes += np.bincount((rho_idx * len(thetas) + columns).reshape(-1), minlength=votes.size)
    return votes.reshape(n_rho, len(thetas)), thetas, offset


def hough_lines(
    edges: BinaryMask, rho_step: float = 1.0, theta_step: float = pi / 360, vote_threshold: int = 1
) -> list[LineSegment]:
    """
    Find lines as local maxima of the accumulator.

    :param edges: The edge mask
    :param rho_step: Rho resolution in pixels
    :param theta_step: Theta resolution in radians
    :param vote_threshold: The minimum number of votes for a line
    :return: Lines sorted by descending support (ties: ascending rho, then theta)
    """
    if vote_threshold < 1:
        raise InvalidArgument(f'Invalid {vote_threshold=} - expected an integer >= 1')
    votes, thetas, offset = hough_accumulator(edges, rho_step, theta_step)
    if not votes.any():
        return []

    n_rho, n_theta = votes.shape
    padded = np.pad(votes, 1, constant_values=-1)
    peak = votes >= vote_threshold
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy == dx == 0:
                continue
            neighbor = padded[1 + dy : 1 + dy + n_rho, 1 + dx : 1 + dx + n_theta]
            # Plateaus keep only their first cell in raster order
            if (dy, dx) < (0, 0):
                peak &= votes > neighbor
            else:
                peak &= votes >= neighbor

    rho_idx, theta_idx = np.nonzero(peak)
    support = votes[rho_idx, theta_idx]
    order = np.lexsort((theta_idx, rho_idx, -support))
    lines = [
        LineSegment(float(rho_idx[i] * rho_step - offset), float(thetas[theta_idx[i]]), int(support[i])) for i in order
    ]
    log.debug(f'Found {len(lines)} hough lines from {edges.count} edge pixels')
    return lines
