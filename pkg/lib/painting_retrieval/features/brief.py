"""
Rotation-steered BRIEF binary descriptors and the per-image feature sets stored in the museum index.

:author: Doug Skrypa
"""

from __future__ import annotations

import logging
import struct
from math import cos, radians, sin
from typing import TYPE_CHECKING, Iterable, Iterator, NamedTuple, Optional, Sequence, Union

import numpy as np

from ..exceptions import CorruptIndex, InvalidArgument
from ..imgproc.raster import BinaryMask, RasterImage
from .keypoints import PATCH_RADIUS, FeatureChannel, Keypoint, Pyramid, check_patch, detect_keypoints, feature_plane
from .keypoints import keypoint_region, orient_keypoint

if TYPE_CHECKING:
    from ..config import RunConfig

__all__ = [
    'BRIEF_PAIRS',
    'DESCRIPTOR_BYTES',
    'BinaryDescriptor',
    'brief_describe',
    'describe_keypoints',
    'FeatureSet',
    'DetectParams',
    'extract_features',
]
log = logging.getLogger(__name__)

DESCRIPTOR_BITS = 256
DESCRIPTOR_BYTES = DESCRIPTOR_BITS // 8
_KEYPOINT_RECORD = struct.Struct('<ffffi')
_COUNT = struct.Struct('<I')

# fmt: off
#: ``(px, py, qx, qy)`` sampling offsets drawn once from an isotropic Gaussian (sigma = 31 / 5, seed 20190514), with
#: both points inside the radius 15 patch
BRIEF_PAIRS = np.array([
    (10, -4, 9, -5), (3, -4, -5, -5), (0, 7, 0, -1), (-5, -14, -3, 1), (0, -5, -5, -5), (4, -1, -5, 0),
    (5, 2, 4, 3), (-6, 9, 0, 10), (1, -1, -2, 6), (-4, -5, -1, 3), (-2, -6, -2, -7), (4, -1, -3, -2),
    (0, 7, -4, -12), (3, 4, -5, 2), (3, 1, -3, 4), (-4, -2, -2, 4), (-3, -5, 3, 3), (-2, -3, 0, -9),
    (-12, -2, -11, 4), (-12, 5, 14, 1), (-5, 10, 5, 1), (6, -3, 8, -1), (-2, 6, 4, -1), (-8, -10, 5, -1),
    (-5, 11, 0, 2), (11, -4, -12, 1), (-1, -6, -6, 5), (3, -8, -5, 3), (11, 3, 9, -9), (-5, 0, -6, 6),
    (4, 6, 1, 5), (-10, -2, 5, 3), (-5, 11, 0, 7), (-6, -4, -3, 3), (1, -7, 8, 4), (-6, 0, 2, -1),
    (4, -5, -2, 1), (6, 2, 10, 4), (0, -1, 0, 12), (2, -10, 0, 6), (6, 0, -11, 2), (6, 1, -7, -2),
    (5, -6, 8, -4), (-9, -4, 4, 6), (10, -3, -6, 2), (8, 4, -3, 8), (-5, 4, -4, 7), (4, -7, 9, -1),
    (-2, -2, 1, -2), (-4, 2, 4, 5), (3, -2, -3, -4), (-1, 1, -2, 4), (-6, 2, 3, -1), (2, -6, 7, -3),
    (-2, 5, 6, 1), (6, 13, 1, 11), (-7, 11, 4, -3), (12, -3, -3, 1), (5, -14, 6, -4), (7, 7, -12, -1),
    (10, -5, 9, -3), (11, 1, 1, -5), (6, -1, -3, -1), (3, 11, 11, 2), (0, -6, 8, 10), (9, -9, 0, -10),
    (4, -8, -6, -9), (-2, 5, 6, 9), (10, 2, -6, -9), (2, 6, -4, -10), (-2, 7, -5, -1), (-7, 0, 6, 8),
    (-5, 5, -4, 3), (0, -2, 1, -2), (-1, -5, -3, 7), (8, -2, 4, -4), (0, -6, -9, 7), (-6, -6, -4, -2),
    (-4, -1, 10, -6), (-3, 4, 5, -3), (2, 4, -2, 0), (-4, -6, -3, -14), (-2, -2, -6, -2), (1, 4, -6, -4),
    (-5, 7, -2, -6), (9, 3, 1, -1), (-5, 3, 3, 2), (-11, 5, 3, 2), (7, -2, -9, -2), (0, -4, -1, 2),
    (-3, -11, -8, -4), (4, -5, -3, -14), (-7, -3, 2, 6), (-6, -3, -11, 0), (-2, 1, 3, 11), (-1, 3, -2, 3),
    (10, -11, 0, 7), (6, -4, 6, -2), (-5, -7, -7, -4), (-9, -7, -5, -8), (-5, -3, -6, -2), (-1, 8, 7, 4),
    (4, 4, 3, 1), (2, -2, 0, -10), (-3, 2, -2, -1), (-4, -5, -3, 4), (0, -1, -1, -3), (-6, -2, 0, -2),
    (2, 1, 3, 6), (0, 6, -6, 4), (2, 1, 4, 6), (-4, -3, -3, -7), (2, -1, -2, -8), (-13, 4, -2, 4),
    (1, -1, -11, 4), (2, 7, 0, 1), (0, 2, -1, -6), (5, -4, 6, -4), (0, -14, -6, -5), (2, -4, 4, -3),
    (-11, -3, -4, -11), (12, -5, 10, -7), (3, 3, 3, -4), (-1, -8, -1, -14), (1, 5, -9, 2), (-7, -2, 10, 3),
    (-11, 5, 5, -3), (8, 4, -2, 10), (-14, 3, 3, 5), (-1, -1, 0, -6), (-2, -8, 10, -5), (-8, -6, 1, -3),
    (3, 4, 4, 3), (-2, -2, 1, 0), (-8, -5, -4, -5), (3, -7, -6, 9), (-1, -3, -4, 4), (-1, -6, 11, 0),
    (3, -6, 5, 0), (2, 11, 14, 4), (-6, -4, 1, 3), (5, -1, -1, -7), (-7, 3, 5, -6), (-14, 3, 7, 0),
    (-5, -2, 4, 0), (8, -1, 7, -3), (9, 4, -14, 2), (1, 7, -8, -2), (-1, -13, -8, 4), (0, -2, -4, -2),
    (0, -6, 3, -2), (3, -1, 7, -1), (6, 5, -2, 8), (1, 4, -8, -5), (5, -10, 2, -2), (-1, -3, -5, 0),
    (0, 8, -6, 2), (6, -9, -12, 6), (5, 1, 1, 12), (-4, -7, 12, -5), (2, 13, -2, -8), (-2, 7, -12, -8),
    (5, 8, -4, 0), (4, 0, -3, -3), (-10, -3, 3, -2), (2, -5, 5, 11), (-9, 0, 3, -11), (3, -4, 0, -2),
    (9, 8, -1, -4), (-7, 1, 6, 0), (7, 0, 0, -2), (2, 0, 0, 1), (5, 9, 1, -2), (-11, 3, -2, 6),
    (3, 4, 1, 0), (1, -10, -9, -11), (-4, 0, -6, 0), (-5, 5, 0, 6), (0, 3, -3, -3), (-14, -5, 0, 4),
    (8, 2, 7, 6), (0, 5, -7, -5), (3, 4, -3, 6), (-5, 0, 5, 14), (2, -3, 11, 1), (4, 5, -4, 2),
    (3, -8, -11, 8), (-3, -7, -10, 5), (-6, 1, 1, 1), (-2, 2, 1, 13), (-1, -1, 6, -7), (-10, 9, -8, 8),
    (-3, 5, -5, 0), (3, -4, -5, -2), (-11, -1, 7, -1), (-6, 1, 1, 0), (-4, 5, -3, -3), (-11, 4, -1, 6),
    (6, -1, -4, 1), (-5, -12, 3, 1), (-11, -1, -3, 2), (-4, 1, 1, -10), (-4, -12, 8, 5), (0, 8, 1, 5),
    (-6, 6, -8, 6), (5, 1, -1, 1), (-9, -3, 2, 5), (8, -6, -2, 3), (-6, 4, -1, -7), (-1, -3, 2, -3),
    (6, 6, 1, -4), (-5, -1, -5, 1), (-2, 2, -5, 7), (0, -3, -1, -4), (10, -8, 1, -6), (1, 7, -1, 6),
    (7, -2, 1, -4), (-4, 11, 1, -3), (3, -13, -3, 8), (-6, 0, -8, 6), (6, 9, 5, 2), (-4, 1, -6, 3),
    (4, -3, -2, 4), (-8, -7, -1, -1), (6, 0, 5, 4), (-9, -6, 8, 3), (1, -4, -5, 6), (4, -5, 1, 9),
    (-4, 2, -10, 5), (0, 9, -10, -1), (-4, 5, -8, 1), (2, 8, -7, -2), (3, -4, 2, 2), (2, -2, -1, 7),
    (-9, -10, 0, -8), (-6, 5, -2, -4), (-4, 1, 0, 1), (3, -1, 1, -4), (-3, 0, -2, -5), (1, -2, -6, 3),
    (-3, -3, 3, 4), (8, 12, -5, 9), (-1, -2, 7, -2), (-1, -3, -7, 4), (-11, 6, 8, -3), (11, -7, 7, 7),
    (2, -3, -2, 5), (1, 0, -4, 7), (3, -1, 5, 1), (-2, 4, 2, -9), (-8, -5, -2, 0), (-7, 0, -1, 11),
    (9, -9, 4, -6), (-5, -5, 2, 2), (10, 5, -8, 0), (0, 3, 10, -1),
], dtype=np.float64)
# fmt: on


class BinaryDescriptor:
    """256 comparison bits, packed most significant bit first into 32 bytes."""

    __slots__ = ('packed',)

    def __init__(self, packed: Union[np.ndarray, bytes]):
        packed = np.frombuffer(packed, dtype=np.uint8) if isinstance(packed, bytes) else np.asarray(packed, np.uint8)
        if packed.shape != (DESCRIPTOR_BYTES,):
            raise InvalidArgument(f'Invalid descriptor shape={packed.shape} - expected ({DESCRIPTOR_BYTES},)')
        self.packed = packed

    @classmethod
    def from_bits(cls, bits: Sequence[bool]) -> BinaryDescriptor:
        bits = np.asarray(bits, dtype=bool)
        if bits.shape != (DESCRIPTOR_BITS,):
            raise InvalidArgument(f'Invalid bit count={bits.size} - expected {DESCRIPTOR_BITS}')
        return cls(np.packbits(bits))

    def __repr__(self) -> str:
        return f'<{self.__class__.__name__}[{self.packed.tobytes().hex()}]>'

    def __eq__(self, other: BinaryDescriptor) -> bool:
        if not isinstance(other, BinaryDescriptor):
            return NotImplemented
        return np.array_equal(self.packed, other.packed)

    def __hash__(self) -> int:
        return hash(self.packed.tobytes())

    @property
    def bits(self) -> np.ndarray:
        return np.unpackbits(self.packed).astype(bool)


# region Description


def _steered_offsets(orientation: float) -> np.ndarray:
    """The pair table rotated counterclockwise (on screen) by ``orientation``, as rounded ``(dx, dy)`` offsets"""
    theta = radians(orientation)
    c, s = cos(theta), sin(theta)
    px, py, qx, qy = BRIEF_PAIRS.T
    steered = np.stack([px * c + py * s, -px * s + py * c, qx * c + qy * s, -qx * s + qy * c], axis=1)
    return np.floor(steered + 0.5).astype(np.int64)


def _describe(pyramid: Pyramid, kp: Keypoint) -> np.ndarray:
    values = pyramid.smoothed(kp.octave)
    x, y = Pyramid.to_level(kp)
    check_patch(values, x, y, PATCH_RADIUS)
    offsets = _steered_offsets(kp.orientation)
    p = values[y + offsets[:, 1], x + offsets[:, 0]]
    q = values[y + offsets[:, 3], x + offsets[:, 2]]
    return np.packbits(p < q)


def brief_describe(source: Union[RasterImage, Pyramid], kp: Keypoint) -> BinaryDescriptor:
    """
    Compute the steered BRIEF descriptor of an oriented keypoint: bit ``i`` is set when the box-filtered intensity at
    the first point of pair ``i`` is lower than at the second point.

    :param source: The image (or its pyramid) the keypoint was detected in
    :param kp: A keypoint whose orientation has been assigned
    """
    pyramid = source if isinstance(source, Pyramid) else Pyramid(source, kp.octave + 1)
    return BinaryDescriptor(_describe(pyramid, kp))


def describe_keypoints(pyramid: Pyramid, keypoints: Iterable[Keypoint]) -> np.ndarray:
    """Packed descriptors with shape ``(n, 32)`` for the given oriented keypoints"""
    rows = [_describe(pyramid, kp) for kp in keypoints]
    return np.array(rows, dtype=np.uint8).reshape(-1, DESCRIPTOR_BYTES)


# endregion

# region Feature Sets


class DetectParams(NamedTuple):
    threshold: int = 20
    max_keypoints: int = 500
    levels: int = 3
    channel: FeatureChannel = FeatureChannel.VALUE

    @classmethod
    def from_config(cls, config: RunConfig) -> DetectParams:
        return cls(config.fast_threshold, config.max_keypoints, config.pyramid_levels, config.feature_channel)


class FeatureSet:
    """Oriented keypoints and their packed descriptors (row ``i`` describes keypoint ``i``)."""

    __slots__ = ('keypoints', 'descriptors')

    def __init__(self, keypoints: Sequence[Keypoint], descriptors: np.ndarray):
        descriptors = np.ascontiguousarray(descriptors, dtype=np.uint8).reshape(-1, DESCRIPTOR_BYTES)
        if len(keypoints) != len(descriptors):
            raise InvalidArgument(f'Keypoint count={len(keypoints)} != descriptor count={len(descriptors)}')
        self.keypoints = tuple(keypoints)
        self.descriptors = descriptors

    @classmethod
    def empty(cls) -> FeatureSet:
        return cls((), np.zeros((0, DESCRIPTOR_BYTES), dtype=np.uint8))

    def __repr__(self) -> str:
        return f'<{self.__class__.__name__}[keypoints={len(self.keypoints)}]>'

    def __len__(self) -> int:
        return len(self.keypoints)

    def __iter__(self) -> Iterator[tuple[Keypoint, BinaryDescriptor]]:
        for kp, row in zip(self.keypoints, self.descriptors):
            yield kp, BinaryDescriptor(row)

    def __eq__(self, other: FeatureSet) -> bool:
        if not isinstance(other, FeatureSet):
            return NotImplemented
        return self.keypoints == other.keypoints and np.array_equal(self.descriptors, other.descriptors)

    __hash__ = None

    def to_bytes(self) -> bytes:
        """
        A ``uint32`` keypoint count, then one little-endian ``(x, y, score, orientation, octave)`` record per keypoint
        (4 float32 values and an int32), then one 32-byte descriptor row per keypoint.
        """
        pack = _KEYPOINT_RECORD.pack
        records = b''.join(pack(kp.x, kp.y, kp.score, kp.orientation, kp.octave) for kp in self.keypoints)
        return _COUNT.pack(len(self)) + records + self.descriptors.tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> FeatureSet:
        try:
            (count,) = _COUNT.unpack_from(data)
        except struct.error as e:
            raise CorruptIndex(f'Invalid feature block: {e}') from e
        rows_start = _COUNT.size + count * _KEYPOINT_RECORD.size
        if len(data) != rows_start + count * DESCRIPTOR_BYTES:
            raise CorruptIndex(f'Invalid feature block length={len(data)} for {count} keypoints')
        keypoints = [
            Keypoint(*_KEYPOINT_RECORD.unpack_from(data, _COUNT.size + i * _KEYPOINT_RECORD.size)) for i in range(count)
        ]
        descriptors = np.frombuffer(data, dtype=np.uint8, offset=rows_start).reshape(count, DESCRIPTOR_BYTES)
        return cls(keypoints, descriptors)


def extract_features(
    img: RasterImage, params: DetectParams = DetectParams(), mask: Optional[BinaryMask] = None
) -> FeatureSet:
    """
    Detect, orient, and describe keypoints on the plane selected by ``params.channel``.  Keypoints whose patch would
    extend past their pyramid level are never detected, and keypoints whose descriptor is bit-identical to a stronger
    keypoint's are dropped.  When a mask is given, keypoints within a few pixels of an excluded pixel (the wall or an
    erased text box) are dropped before the strongest ``params.max_keypoints`` are kept.

    Keypoint values are rounded to float32 so they match the values restored from an index.
    """
    pyramid = Pyramid(feature_plane(img, params.channel), params.levels)
    region = None if mask is None else keypoint_region(mask)
    found = detect_keypoints(pyramid, params.threshold, params.max_keypoints, PATCH_RADIUS + 1, region)
    keypoints, rows, seen = [], [], set()
    for kp in found:
        kp = _as_float32(orient_keypoint(pyramid, kp))
        row = _describe(pyramid, kp)
        if (key := row.tobytes()) in seen:
            continue
        seen.add(key)
        keypoints.append(kp)
        rows.append(row)

    log.debug(f'Extracted {len(keypoints)} keypoints ({len(found) - len(keypoints)} duplicates) from {img}')
    if not keypoints:
        return FeatureSet.empty()
    return FeatureSet(keypoints, np.array(rows, dtype=np.uint8))


def _as_float32(kp: Keypoint) -> Keypoint:
    x, y, score, orientation = (float(v) for v in np.array(kp[:4], dtype=np.float32))
    return Keypoint(x, y, score, orientation, int(kp.octave))


# endregion
