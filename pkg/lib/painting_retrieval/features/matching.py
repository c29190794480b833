"""
Hamming matching of binary descriptors and the image-level SIMILAR / DISSIMILAR verdict.

:author: Doug Skrypa
"""

from __future__ import annotations

from enum import Enum
from typing import TYPE_CHECKING, NamedTuple, Sequence, Union

import numpy as np

from ..imgproc.raster import RasterImage
from ..metrics import hamming_matrix
from ..utils import MissingMixin
from .brief import DESCRIPTOR_BYTES, BinaryDescriptor, DetectParams, FeatureSet, extract_features

if TYPE_CHECKING:
    from ..config import RunConfig

__all__ = ['Verdict', 'MatchParams', 'MatchPair', 'MatchResult', 'match_descriptors', 'image_feature_similarity']

Descriptors = Union[np.ndarray, Sequence[BinaryDescriptor], FeatureSet]


class Verdict(MissingMixin, Enum):
    SIMILAR = 'similar'
    DISSIMILAR = 'dissimilar'


class MatchParams(NamedTuple):
    """
    :param max_distance: Max Hamming distance for a match
    :param ratio: A match's distance must be below ``ratio`` times the second best distance (in both directions)
    :param ratio_test: Whether the ratio test is applied
    :param min_matches: The number of matches required for a SIMILAR verdict
    """

    max_distance: int = 64
    ratio: float = 0.8
    ratio_test: bool = True
    min_matches: int = 4

    @classmethod
    def from_config(cls, config: RunConfig) -> MatchParams:
        return cls(config.max_distance, config.ratio, config.ratio_test, config.min_matches)


class MatchPair(NamedTuple):
    query: int
    gallery: int
    distance: int


class MatchResult(NamedTuple):
    pairs: tuple[MatchPair, ...]
    verdict: Verdict

    @property
    def count(self) -> int:
        return len(self.pairs)


def _packed(descriptors: Descriptors) -> np.ndarray:
    if isinstance(descriptors, FeatureSet):
        return descriptors.descriptors
    elif isinstance(descriptors, np.ndarray):
        return descriptors.reshape(-1, DESCRIPTOR_BYTES)
    return np.array([d.packed for d in descriptors], dtype=np.uint8).reshape(-1, DESCRIPTOR_BYTES)


def _passes_ratio(distances: np.ndarray, best: np.ndarray, ratio: float) -> np.ndarray:
    """Whether each row's best distance is below ``ratio`` times its second best (rows with 1 column always pass)"""
    if distances.shape[1] < 2:
        return np.ones(len(distances), dtype=bool)
    second = np.partition(distances, 1, axis=1)[:, 1]
    return best < ratio * second


def match_descriptors(query: Descriptors, gallery: Descriptors, params: MatchParams = MatchParams()) -> MatchResult:
    """
    Brute-force mutual nearest neighbor matching.  A pair survives when each descriptor is the other's nearest
    neighbor (ties resolve to the lower index), its distance is at most ``max_distance``, and (when enabled) it passes
    the ratio test from both sides.

    :param query: Packed query descriptors
    :param gallery: Packed gallery descriptors
    :param params: Matching thresholds
    :return: The surviving pairs in query order, and the verdict
    """
    query, gallery = _packed(query), _packed(gallery)
    if not len(query) or not len(gallery):
        return MatchResult((), Verdict.DISSIMILAR)

    distances = hamming_matrix(query, gallery)
    best_gallery = distances.argmin(axis=1)
    best_query = distances.argmin(axis=0)
    rows = np.arange(len(query))
    best = distances[rows, best_gallery]
    keep = (best_query[best_gallery] == rows) & (best <= params.max_distance)
    if params.ratio_test:
        keep &= _passes_ratio(distances, best, params.ratio)
        column_best = distances[best_query, np.arange(len(gallery))]
        keep &= _passes_ratio(distances.T, column_best, params.ratio)[best_gallery]

    pairs = tuple(MatchPair(int(i), int(best_gallery[i]), int(best[i])) for i in np.nonzero(keep)[0])
    verdict = Verdict.SIMILAR if len(pairs) >= params.min_matches else Verdict.DISSIMILAR
    return MatchResult(pairs, verdict)


def image_feature_similarity(
    a: Union[RasterImage, FeatureSet],
    b: Union[RasterImage, FeatureSet],
    detect: DetectParams = DetectParams(),
    match: MatchParams = MatchParams(),
) -> tuple[int, Verdict]:
    """
    :param a: An image, or features that were already extracted from one
    :param b: An image, or features that were already extracted from one
    :param detect: Keypoint detection settings for images that need feature extraction
    :param match: Matching thresholds
    :return: Tuple of (surviving match count, verdict)
    """
    if isinstance(a, RasterImage):
        a = extract_features(a, detect)
    if isinstance(b, RasterImage):
        b = extract_features(b, detect)
    result = match_descriptors(a, b, match)
    return result.count, result.verdict
