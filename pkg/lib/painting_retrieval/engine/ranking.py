"""
Ranking of museum entries against the descriptors of one query crop.

Every ranking is a list of :class:`Scored` labels, best first, with ties broken by ascending label.

:author: Doug Skrypa
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, NamedTuple, Optional, Union

import numpy as np

from ..descriptors.base import DescriptorVector
from ..descriptors.text import match_author
from ..exceptions import InvalidArgument, MissingDescriptor, NoActiveDescriptor
from ..features.brief import FeatureSet
from ..features.matching import MatchParams, Verdict, match_descriptors
from ..metrics import UNKNOWN_LABEL, Metric, Polarity, measure_many

if TYPE_CHECKING:
    from ..config import RunConfig
    from .index import MuseumIndex

__all__ = [
    'Scored',
    'DescriptorWeights',
    'CropDescriptors',
    'rank_by_descriptor',
    'combine_rankings',
    'rank_by_features',
    'rank_by_text',
    'UNKNOWN_RANKING',
]
log = logging.getLogger(__name__)


class Scored(NamedTuple):
    label: int
    score: float


#: The ranking returned for a painting that is not in the museum
UNKNOWN_RANKING = (Scored(UNKNOWN_LABEL, 0.0),)


class DescriptorWeights(NamedTuple):
    color: float = 0.3
    texture: float = 0.5
    text: float = 0.2

    @classmethod
    def from_config(cls, config: RunConfig) -> DescriptorWeights:
        return cls(config.weight_color, config.weight_texture, config.weight_text)

    def normalized(self) -> DescriptorWeights:
        """These weights scaled to sum to 1"""
        if any(w < 0 for w in self):
            raise InvalidArgument(f'Invalid weights={self} - expected values >= 0')
        total = sum(self)
        if total <= 0:
            raise NoActiveDescriptor
        return DescriptorWeights(*(w / total for w in self))


class CropDescriptors(NamedTuple):
    """
    :param color: The crop's color descriptor
    :param texture: The crop's texture descriptor
    :param authors: Labels of every painting by the author whose name best matched the crop's text
    """

    color: Optional[DescriptorVector] = None
    texture: Optional[DescriptorVector] = None
    authors: Optional[frozenset[int]] = None


# region Descriptor Distances


def _distribution_rows(matrix: np.ndarray) -> np.ndarray:
    totals = matrix.sum(axis=1, keepdims=True)
    return np.divide(matrix, totals, out=np.zeros_like(matrix), where=totals > 0)


def _index_scores(index: MuseumIndex, vector: DescriptorVector, metric: Metric) -> np.ndarray:
    vector.check_comparable(index.layout(vector.kind))
    gallery = index.matrix(vector.kind)
    if metric.requires_normalized:
        return measure_many(metric, vector.as_distribution(), _distribution_rows(gallery), check=False)
    return measure_many(metric, vector.values, gallery, check=False)


def _sorted(labels: np.ndarray, keys: np.ndarray, scores: np.ndarray) -> list[Scored]:
    order = np.lexsort((labels, keys))
    return [Scored(int(labels[i]), float(scores[i])) for i in order]


def rank_by_descriptor(
    index: MuseumIndex, vector: DescriptorVector, metric: Union[Metric, str] = Metric.HELLINGER
) -> list[Scored]:
    """
    Rank every entry by the given metric between its stored descriptor and the crop's descriptor of the same kind.
    Measures that require normalized histograms are given L1-normalized copies of both.

    :param index: The museum index
    :param vector: A descriptor computed from a query crop
    :param metric: The histogram measure to use
    :return: Every entry, best first, with its raw score
    """
    metric = Metric(metric)
    if not len(index):
        return []
    scores = _index_scores(index, vector, metric)
    keys = -scores if metric.polarity is Polarity.HIGHER_IS_CLOSER else scores
    return _sorted(index.labels, keys, scores)


def _normalized_distances(scores: np.ndarray, metric: Metric) -> np.ndarray:
    """Min-max normalize scores over the index to [0, 1] distances (0 = closest)"""
    low, high = scores.min(), scores.max()
    if high <= low:
        return np.zeros_like(scores)
    if metric.polarity is Polarity.HIGHER_IS_CLOSER:
        return (high - scores) / (high - low)
    return (scores - low) / (high - low)


def combine_rankings(
    index: MuseumIndex,
    crop: CropDescriptors,
    weights: DescriptorWeights = DescriptorWeights(),
    color_metric: Union[Metric, str] = Metric.HELLINGER,
    texture_metric: Union[Metric, str] = Metric.CORRELATION,
) -> list[Scored]:
    """
    Rank every entry by the weighted sum of its normalized color, texture, and text distances.  The text distance is
    0 for paintings by the matched author and 1 for every other painting.

    :param index: The museum index
    :param crop: The crop's descriptors; a descriptor only needs to be present if its weight is non-zero
    :param weights: The contribution of each descriptor (normalized to sum to 1)
    :param color_metric: The measure used for the color descriptor
    :param texture_metric: The measure used for the texture descriptor
    :return: Every entry, best first, with its combined distance
    """
    weights = weights.normalized()
    if not len(index):
        return []

    total = np.zeros(len(index), dtype=np.float64)
    for weight, vector, metric, name in (
        (weights.color, crop.color, Metric(color_metric), 'color'),
        (weights.texture, crop.texture, Metric(texture_metric), 'texture'),
    ):
        if not weight:
            continue
        if vector is None:
            raise MissingDescriptor(f'query {name}')
        total += weight * _normalized_distances(_index_scores(index, vector, metric), metric)

    if weights.text:
        authors = crop.authors or frozenset()
        total += weights.text * np.array([0.0 if label in authors else 1.0 for label in index.labels])

    return _sorted(index.labels, total, total)


# endregion

# region Features & Text


def rank_by_features(
    index: MuseumIndex, features: FeatureSet, params: MatchParams = MatchParams()
) -> Union[list[Scored], tuple[Scored, ...]]:
    """
    Match the crop's keypoints against every entry.  Entries with a SIMILAR verdict are ranked by descending match
    count; when no entry is similar, the painting is considered to be absent from the museum.

    :return: The similar entries with their match counts, or :data:`UNKNOWN_RANKING`
    """
    similar = []
    for entry in index:
        result = match_descriptors(features, entry.features, params)
        if result.verdict is Verdict.SIMILAR:
            similar.append(Scored(entry.label, float(result.count)))

    if not similar:
        log.debug(f'No similar painting found for {features}')
        return UNKNOWN_RANKING
    similar.sort(key=lambda s: (-s.score, s.label))
    return similar


def rank_by_text(index: MuseumIndex, text: str) -> list[Scored]:
    """
    Paintings by the catalog author whose name is closest to the recognized text are ranked first (by ascending
    label), followed by every other painting.

    :return: Every entry, with the normalized edit distance for the best author's paintings and 1 for the rest
    """
    labels, distance = match_author(text, index.catalog)
    best = [Scored(label, distance) for label in sorted(labels)]
    return best + [Scored(entry.label, 1.0) for entry in index if entry.label not in labels]


# endregion
