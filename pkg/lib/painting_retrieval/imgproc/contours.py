"""
Connected components, outer border following, polygon filling, convex hulls, and minimum-area rectangles.

Coordinates are ``(x, y)`` with ``y`` increasing downward.  Angles are reported in degrees, counterclockwise as seen on
screen, normalized to ``(-90, 90]``.

:author: Doug Skrypa
"""

from __future__ import annotations

import logging
from math import atan2, cos, degrees, radians, sin
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from ..exceptions import InvalidArgument, OutOfBounds
from .raster import BinaryMask

if TYPE_CHECKING:
    from ..typing import BoxTuple, Points, PointF

__all__ = [
    'Contour',
    'OrientedRect',
    'label_components',
    'find_contours',
    'fill_contours',
    'convex_hull',
    'min_area_rect',
    'lowest_edge_angle',
]
log = logging.getLogger(__name__)

# Clockwise on screen, starting east
_DIRECTIONS = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))
_DIRECTION_INDEX = {step: i for i, step in enumerate(_DIRECTIONS)}


class Contour:
    """An ordered, closed sequence of 8-connected ``(x, y)`` pixel coordinates."""

    __slots__ = ('points',)

    def __init__(self, points: Points):
        points = np.asarray(points, dtype=np.int64).reshape(-1, 2)
        if not len(points):
            raise InvalidArgument('A contour requires at least 1 point')
        self.points = points

    def __repr__(self) -> str:
        return f'<{self.__class__.__name__}[points={len(self.points)}, bbox={self.bbox}]>'

    def __len__(self) -> int:
        return len(self.points)

    @property
    def area(self) -> float:
        """Area enclosed by the polygon through the pixel centers"""
        x, y = self.points[:, 0].astype(np.float64), self.points[:, 1].astype(np.float64)
        return abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))) / 2

    @property
    def bbox(self) -> BoxTuple:
        """The inclusive-exclusive ``(x1, y1, x2, y2)`` box containing every point"""
        x1, y1 = self.points.min(axis=0)
        x2, y2 = self.points.max(axis=0)
        return int(x1), int(y1), int(x2) + 1, int(y2) + 1


class OrientedRect:
    __slots__ = ('center', 'size', 'angle')

    def __init__(self, center: PointF, size: PointF, angle: float):
        self.center = center
        self.size = size
        self.angle = angle

    def __repr__(self) -> str:
        (x, y), (w, h) = self.center, self.size
        name = self.__class__.__name__
        return f'<{name}[center=({x:.2f}, {y:.2f}), size=({w:.2f}, {h:.2f}), angle={self.angle:.2f}]>'

    @property
    def area(self) -> float:
        return self.size[0] * self.size[1]

    def corners(self) -> np.ndarray:
        """The 4 corners as a float array with shape ``(4, 2)``, clockwise on screen starting from the top-left"""
        phi = -radians(self.angle)
        u = np.array([cos(phi), sin(phi)])
        v = np.array([-sin(phi), cos(phi)])
        half_w, half_h = self.size[0] / 2, self.size[1] / 2
        center = np.asarray(self.center, dtype=np.float64)
        return np.array(
            [
                center - u * half_w - v * half_h,
                center + u * half_w - v * half_h,
                center + u * half_w + v * half_h,
                center - u * half_w + v * half_h,
            ]
        )


# region Connected Components


def label_components(bits: np.ndarray) -> tuple[np.ndarray, int]:
    """
    Label 8-connected foreground components in raster order of their first pixel.

    :param bits: A 2D boolean array
    :return: Tuple of (int32 label array with 0 for background and 1..N for components, N)
    """
    height, width = bits.shape
    parent: list[int] = [0]
    row_runs: list[tuple[np.ndarray, np.ndarray, list[int]]] = []

    def find(node: int) -> int:
        root = node
        while parent[root] != root:
            root = parent[root]
        while parent[node] != root:
            parent[node], node = root, parent[node]
        return root

    prev_starts = prev_ends = np.empty(0, dtype=np.int64)
    prev_ids: list[int] = []
    for y in range(height):
        diff = np.diff(np.concatenate(([0], bits[y].astype(np.int8), [0])))
        starts = np.flatnonzero(diff == 1)
        ends = np.flatnonzero(diff == -1) - 1  # inclusive
        ids = []
        j = 0
        for start, end in zip(starts.tolist(), ends.tolist()):
            run_id = len(parent)
            parent.append(run_id)
            ids.append(run_id)
            while j < len(prev_ends) and prev_ends[j] < start - 1:
                j += 1
            k = j
            while k < len(prev_starts) and prev_starts[k] <= end + 1:
                a, b = find(run_id), find(prev_ids[k])
                if a != b:
                    parent[max(a, b)] = min(a, b)
                k += 1
        row_runs.append((starts, ends, ids))
        prev_starts, prev_ends, prev_ids = starts, ends, ids

    labels = np.zeros((height, width), dtype=np.int32)
    root_labels: dict[int, int] = {}
    for y, (starts, ends, ids) in enumerate(row_runs):
        for start, end, run_id in zip(starts.tolist(), ends.tolist(), ids):
            root = find(run_id)
            try:
                label = root_labels[root]
            except KeyError:
                label = root_labels[root] = len(root_labels) + 1
            labels[y, start : end + 1] = label

    return labels, len(root_labels)


# endregion

# region Contours


def find_contours(mask: BinaryMask) -> list[Contour]:
    """
    Trace the outer border of each 8-connected foreground component.  Holes are ignored.

    :param mask: The mask to trace
    :return: One contour per component, sorted by descending enclosed area (ties: raster order of the first pixel)
    """
    labels, count = label_components(mask.bits)
    if not count:
        return []

    flat = labels.reshape(-1)
    label_ids, first_indexes = np.unique(flat, return_index=True)
    padded = np.pad(mask.bits, 1, constant_values=False)
    width = mask.width
    contours = []
    for label, index in zip(label_ids.tolist(), first_indexes.tolist()):
        if label == 0:
            continue
        y, x = divmod(index, width)
        contours.append(Contour(_trace_border(padded, x, y)))

    contours.sort(key=lambda c: -c.area)  # stable, so ties keep raster order
    log.debug(f'Found {len(contours)} contours')
    return contours


def _trace_border(padded: np.ndarray, x: int, y: int) -> list[tuple[int, int]]:
    # Moore neighbor tracing with Jacob's stopping criterion; ``padded`` has a 1px False border
    start = (x, y)
    points = [start]
    px, py = start
    back = 4  # The west neighbor of the first pixel in raster order is always background
    first_step = None
    while True:
        for i in range(1, 9):
            d = (back + i) % 8
            dx, dy = _DIRECTIONS[d]
            if padded[py + dy + 1, px + dx + 1]:
                break
        else:
            return points  # isolated pixel

        qx, qy = px + dx, py + dy
        if (px, py) == start:
            if first_step is None:
                first_step = (qx, qy)
            elif (qx, qy) == first_step:
                points.pop()  # the start pixel was appended again
                return points

        bx, by = _DIRECTIONS[(d - 1) % 8]
        back = _DIRECTION_INDEX[(px + bx - qx, py + by - qy)]
        px, py = qx, qy
        points.append((px, py))


def fill_contours(contours: Iterable[Contour], width: int, height: int) -> BinaryMask:
    """
    Fill each contour's interior (even-odd rule at pixel centers) including its boundary pixels.

    :param contours: The contours to fill
    :param width: Width of the output mask
    :param height: Height of the output mask
    :return: A new mask
    """
    bits = np.zeros((height, width), dtype=bool)
    for contour in contours:
        points = contour.points
        xs, ys = points[:, 0], points[:, 1]
        if xs.min() < 0 or ys.min() < 0 or xs.max() >= width or ys.max() >= height:
            raise OutOfBounds(f'Contour with bbox={contour.bbox} does not fit within a {width}x{height} mask')
        _fill_polygon(bits, points)
        bits[ys, xs] = True
    return BinaryMask(bits)


def _fill_polygon(bits: np.ndarray, points: np.ndarray):
    if len(points) < 3:
        return
    x0 = points[:, 0].astype(np.float64)
    y0 = points[:, 1].astype(np.float64)
    x1 = np.roll(x0, -1)
    y1 = np.roll(y0, -1)
    sloped = y0 != y1
    x0, y0, x1, y1 = x0[sloped], y0[sloped], x1[sloped], y1[sloped]
    y_low = np.minimum(y0, y1)
    y_high = np.maximum(y0, y1)
    inv_slope = (x1 - x0) / (y1 - y0)
    for y in range(int(y_low.min()), int(y_high.max())):
        active = (y_low <= y) & (y < y_high)
        if not active.any():
            continue
        crossings = np.sort(x0[active] + (y - y0[active]) * inv_slope[active])
        for xa, xb in zip(crossings[::2], crossings[1::2]):
            start, stop = int(np.ceil(xa)), int(np.floor(xb))
            if start <= stop:
                bits[y, start : stop + 1] = True


# endregion

# region Geometric Fitting


def convex_hull(points: Points) -> np.ndarray:
    """
    Monotone chain convex hull.

    :param points: ``(x, y)`` points
    :return: Hull vertices (no repeated endpoint) as a float64 array with shape ``(n, 2)``
    """
    pts = np.unique(np.asarray(points, dtype=np.float64).reshape(-1, 2), axis=0)  # sorted by x, then y
    if len(pts) <= 2:
        return pts

    def cross(o, a, b) -> float:
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def min_area_rect(points: Points) -> OrientedRect:
    """
    Find the minimum-area rectangle enclosing the given points.  One side of the optimal rectangle is always collinear
    with a hull edge, so each hull edge direction is evaluated.

    The reported angle is that of the rectangle's ``width`` side, normalized to ``(-45, 45]``.
    """
    hull = convex_hull(points)
    if not len(hull):
        raise InvalidArgument('At least 1 point is required')
    if len(hull) == 1:
        x, y = hull[0]
        return OrientedRect((float(x), float(y)), (0.0, 0.0), 0.0)

    best = None
    for i in range(len(hull)):
        dx, dy = hull[(i + 1) % len(hull)] - hull[i]
        if not dx and not dy:
            continue
        angle = _normalize_quarter(-degrees(atan2(dy, dx)))
        rect = _aligned_rect(hull, angle)
        if best is None or rect.area < best.area - 1e-12:
            best = rect
    return best


def _normalize_quarter(angle: float) -> float:
    while angle > 45:
        angle -= 90
    while angle <= -45:
        angle += 90
    return angle


def _aligned_rect(hull: np.ndarray, angle: float) -> OrientedRect:
    phi = -radians(angle)
    u = np.array([cos(phi), sin(phi)])
    v = np.array([-sin(phi), cos(phi)])
    pu = hull @ u
    pv = hull @ v
    u_min, u_max, v_min, v_max = pu.min(), pu.max(), pv.min(), pv.max()
    center = u * (u_min + u_max) / 2 + v * (v_min + v_max) / 2
    return OrientedRect((float(center[0]), float(center[1])), (float(u_max - u_min), float(v_max - v_min)), angle)


def lowest_edge_angle(corners: Sequence[Sequence[float]]) -> float:
    """
    The on-screen counterclockwise angle of the segment joining the two lowest corners of a rectangle, in
    ``(-90, 90]``.
    """
    ordered = sorted(corners, key=lambda p: (-p[1], p[0]))
    (ax, ay), (bx, by) = ordered[0], ordered[1]
    if ax > bx:
        ax, ay, bx, by = bx, by, ax, ay
    angle = -degrees(atan2(by - ay, bx - ax))
    if angle <= -90:
        angle += 180
    elif angle > 90:
        angle -= 180
    return angle


# endregion
