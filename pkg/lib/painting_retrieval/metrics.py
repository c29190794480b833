"""
Comparison and evaluation measures: histogram similarity, mAP@K, mask precision / recall / F1, IoU, PSNR, angular
error, Hamming distance, and the adjusted Rand index.

Degenerate 0/0 cases (empty chi-squared bins, constant histograms, empty masks) resolve to 0.

:author: Doug Skrypa
"""

from __future__ import annotations

from enum import Enum
from math import comb, inf, log10
from typing import Any, Collection, Iterable, NamedTuple, Optional, Sequence, Union

import numpy as np

from .exceptions import DimensionMismatch, EmptyInput, EmptyRelevantSet, InvalidArgument, LengthMismatch, NotNormalized
from .utils import MissingMixin

__all__ = [
    'Polarity',
    'Metric',
    'SimilarityScore',
    'RankedRetrieval',
    'Box',
    'histogram_measure',
    'measure_many',
    'ap_at_k',
    'map_at_k',
    'mask_prf',
    'iou',
    'match_boxes',
    'mean_iou',
    'psnr',
    'mean_angular_error',
    'hamming_distance',
    'hamming_matrix',
    'adjusted_rand_index',
    'UNKNOWN_LABEL',
]

#: The label that means "this painting is not in the museum"
UNKNOWN_LABEL = -1
NORMALIZED_TOLERANCE = 1e-9

_POPCOUNT = np.array([bin(i).count('1') for i in range(256)], dtype=np.uint16)


class Polarity(Enum):
    HIGHER_IS_CLOSER = 'higher'
    LOWER_IS_CLOSER = 'lower'


class Metric(MissingMixin, Enum):
    HELLINGER = 'hellinger'
    CHI2 = 'chi2'
    INTERSECT = 'intersect'
    CORRELATION = 'correlation'

    @property
    def polarity(self) -> Polarity:
        return Polarity.LOWER_IS_CLOSER if self is Metric.CHI2 else Polarity.HIGHER_IS_CLOSER

    @property
    def requires_normalized(self) -> bool:
        return self in (Metric.HELLINGER, Metric.INTERSECT)


class SimilarityScore(NamedTuple):
    value: float
    polarity: Polarity

    def is_closer_than(self, other: SimilarityScore) -> bool:
        if self.polarity is Polarity.HIGHER_IS_CLOSER:
            return self.value > other.value
        return self.value < other.value


# region Histogram Measures


def _as_values(hist: Any) -> np.ndarray:
    return np.asarray(getattr(hist, 'values', hist), dtype=np.float64)


def histogram_measure(kind: Union[Metric, str], h1: Any, h2: Any, check: bool = True) -> SimilarityScore:
    """
    Compare two histograms.

    :param kind: The measure to use
    :param h1: A histogram (array-like, or any object with a ``values`` array)
    :param h2: A histogram with the same length as ``h1``
    :param check: Whether measures that require L1-normalized input should verify it
    :return: The score, with the polarity of the given measure
    """
    kind = Metric(kind)
    a, b = _as_values(h1).reshape(-1), _as_values(h2).reshape(-1)
    if len(a) != len(b):
        raise LengthMismatch(len(a), len(b))
    return SimilarityScore(float(measure_many(kind, a, b[None, :], check)[0]), kind.polarity)


def measure_many(kind: Union[Metric, str], query: np.ndarray, gallery: np.ndarray, check: bool = True) -> np.ndarray:
    """
    Compare one histogram against each row of a matrix.

    :param kind: The measure to use
    :param query: A 1D array with length N
    :param gallery: A 2D array with shape ``(M, N)``
    :param check: Whether measures that require L1-normalized input should verify it
    :return: A 1D array with M scores
    """
    kind = Metric(kind)
    query = np.asarray(query, dtype=np.float64).reshape(-1)
    gallery = np.asarray(gallery, dtype=np.float64)
    if gallery.ndim == 1:
        gallery = gallery[None, :]
    if gallery.shape[1] != len(query):
        raise LengthMismatch(len(query), gallery.shape[1])
    if check and kind.requires_normalized:
        _check_normalized(query)
        for row in gallery:
            _check_normalized(row)

    if kind is Metric.HELLINGER:
        return np.sqrt(np.clip(query[None, :], 0, None) * np.clip(gallery, 0, None)).sum(axis=1)
    elif kind is Metric.INTERSECT:
        return np.minimum(query[None, :], gallery).sum(axis=1)
    elif kind is Metric.CHI2:
        total = query[None, :] + gallery
        diff_sq = (query[None, :] - gallery) ** 2
        terms = np.divide(diff_sq, total, out=np.zeros_like(total), where=total != 0)
        return terms.sum(axis=1)
    else:
        q_dev = query - query.mean()
        g_dev = gallery - gallery.mean(axis=1, keepdims=True)
        numerator = g_dev @ q_dev
        denominator = np.sqrt((q_dev**2).sum() * (g_dev**2).sum(axis=1))
        return np.divide(numerator, denominator, out=np.zeros_like(numerator), where=denominator > 0)


def _check_normalized(values: np.ndarray):
    if abs(values.sum() - 1) > NORMALIZED_TOLERANCE or (values < 0).any():
        raise NotNormalized


# endregion

# region Retrieval Evaluation


class RankedRetrieval:
    """
    :param ranking: Museum labels, best first
    :param relevant: The ground truth label(s)
    :param k: The rank cutoff
    """

    __slots__ = ('ranking', 'relevant', 'k')

    def __init__(self, ranking: Sequence[int], relevant: Union[int, Collection[int]], k: int):
        if k < 1:
            raise InvalidArgument(f'Invalid {k=} - expected an integer >= 1')
        ranking = tuple(ranking)
        if len(set(ranking)) != len(ranking):
            raise InvalidArgument(f'Invalid {ranking=} - labels must be distinct')
        self.ranking = ranking
        self.relevant = frozenset((relevant,) if isinstance(relevant, int) else relevant)
        self.k = k

    def __repr__(self) -> str:
        return f'<{self.__class__.__name__}[k={self.k}, relevant={set(self.relevant)}, ranking={self.ranking}]>'

    @property
    def is_unknown(self) -> bool:
        return self.relevant == {UNKNOWN_LABEL}


def ap_at_k(r: RankedRetrieval) -> float:
    """
    The mean of P@1 .. P@K, where P@i is the fraction of the first ``i`` ranked labels that are relevant.  Ranks past
    the end of a short ranking keep the last numerator.
    """
    if not r.relevant:
        raise EmptyRelevantSet
    hits = 0
    total = 0.0
    for i in range(1, r.k + 1):
        if i <= len(r.ranking) and r.ranking[i - 1] in r.relevant:
            hits += 1
        total += hits / i
    return total / r.k


def map_at_k(rs: Iterable[RankedRetrieval]) -> float:
    """
    Mean of :func:`ap_at_k` over all queries.  A query whose ground truth is the unknown label scores 1 only when its
    ranking is exactly the unknown label, and 0 otherwise.
    """
    scores = [(float(r.ranking == (UNKNOWN_LABEL,)) if r.is_unknown else ap_at_k(r)) for r in rs]
    if not scores:
        raise EmptyInput
    return sum(scores) / len(scores)


# endregion

# region Masks & Boxes


def mask_prf(pred: Any, gt: Any) -> tuple[float, float, float]:
    """Pixel-level precision, recall, and F1 of a predicted mask (or bool array) against ground truth."""
    p = np.asarray(getattr(pred, 'bits', pred), dtype=bool)
    g = np.asarray(getattr(gt, 'bits', gt), dtype=bool)
    if p.shape != g.shape:
        raise DimensionMismatch(p.shape, g.shape)
    tp = int(np.count_nonzero(p & g))
    fp = int(np.count_nonzero(p & ~g))
    fn = int(np.count_nonzero(~p & g))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


class Box:
    """An axis-aligned box with inclusive ``x1, y1`` and exclusive ``x2, y2``."""

    __slots__ = ('x1', 'y1', 'x2', 'y2')

    def __init__(self, x1: int, y1: int, x2: int, y2: int):
        if not (x1 < x2 and y1 < y2):
            raise InvalidArgument(f'Invalid box=({x1}, {y1}, {x2}, {y2}) - expected x1 < x2 and y1 < y2')
        self.x1, self.y1, self.x2, self.y2 = int(x1), int(y1), int(x2), int(y2)

    def __repr__(self) -> str:
        return f'Box({self.x1}, {self.y1}, {self.x2}, {self.y2})'

    def __iter__(self):
        yield from (self.x1, self.y1, self.x2, self.y2)

    def __eq__(self, other: Box) -> bool:
        if not isinstance(other, Box):
            return NotImplemented
        return tuple(self) == tuple(other)

    def __hash__(self) -> int:
        return hash(tuple(self))

    @property
    def width(self) -> int:
        return self.x2 - self.x1

    @property
    def height(self) -> int:
        return self.y2 - self.y1

    @property
    def area(self) -> int:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return (self.x1 + self.x2) / 2, (self.y1 + self.y2) / 2

    def shifted(self, dx: int, dy: int) -> Box:
        return Box(self.x1 + dx, self.y1 + dy, self.x2 + dx, self.y2 + dy)

    def intersection(self, other: Box) -> int:
        w = min(self.x2, other.x2) - max(self.x1, other.x1)
        h = min(self.y2, other.y2) - max(self.y1, other.y1)
        return w * h if w > 0 and h > 0 else 0


def iou(a: Box, b: Box) -> float:
    inter = a.intersection(b)
    return inter / (a.area + b.area - inter)


def match_boxes(preds: Sequence[Box], gts: Sequence[Box]) -> list[tuple[Optional[Box], Box]]:
    """
    Pair predicted boxes with ground truth boxes greedily by descending IoU.

    :return: One ``(pred, gt)`` pair per ground truth box, in ground truth order; ``pred`` is None when unmatched
    """
    candidates = sorted(
        ((iou(p, g), pi, gi) for pi, p in enumerate(preds) for gi, g in enumerate(gts)),
        key=lambda c: (-c[0], c[1], c[2]),
    )
    matched: dict[int, int] = {}
    used = set()
    for score, pi, gi in candidates:
        if score <= 0:
            break
        if gi not in matched and pi not in used:
            matched[gi] = pi
            used.add(pi)
    return [(preds[matched[gi]] if gi in matched else None, g) for gi, g in enumerate(gts)]


def mean_iou(pairs: Iterable[tuple[Optional[Box], Box]]) -> float:
    """Mean IoU over ``(pred, gt)`` pairs; unmatched ground truth boxes (``pred=None``) count as 0."""
    scores = [iou(pred, gt) if pred is not None else 0.0 for pred, gt in pairs]
    if not scores:
        raise EmptyInput
    return sum(scores) / len(scores)


# endregion

# region Image Measures


def psnr(a: Any, b: Any) -> float:
    """Peak signal-to-noise ratio in dB for 8-bit images; identical images yield ``inf``."""
    x = np.asarray(getattr(a, 'pixels', a), dtype=np.float64)
    y = np.asarray(getattr(b, 'pixels', b), dtype=np.float64)
    if x.shape != y.shape:
        raise DimensionMismatch(x.shape, y.shape)
    mse = float(np.mean((x - y) ** 2))
    if mse == 0:
        return inf
    return 10 * log10(255**2 / mse)


def mean_angular_error(pred: Sequence[float], gt: Sequence[float]) -> float:
    """Mean difference between undirected line angles in degrees (so 89 vs -89 differ by 2)."""
    if len(pred) != len(gt):
        raise LengthMismatch(len(pred), len(gt))
    if not len(pred):
        raise EmptyInput
    delta = np.abs(np.asarray(pred, dtype=np.float64) - np.asarray(gt, dtype=np.float64)) % 180
    return float(np.minimum(delta, 180 - delta).mean())


# endregion

# region Binary Descriptors


def hamming_distance(a: np.ndarray, b: np.ndarray) -> int:
    """Number of differing bits between two packed ``uint8`` descriptors."""
    a, b = np.asarray(a, dtype=np.uint8), np.asarray(b, dtype=np.uint8)
    if a.shape != b.shape:
        raise LengthMismatch(a.size, b.size)
    return int(_POPCOUNT[np.bitwise_xor(a, b)].sum())


def hamming_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Pairwise Hamming distances between rows of packed descriptors.

    :param a: ``uint8`` array with shape ``(n, bytes)``
    :param b: ``uint8`` array with shape ``(m, bytes)``
    :return: An int64 array with shape ``(n, m)``
    """
    a, b = np.asarray(a, dtype=np.uint8), np.asarray(b, dtype=np.uint8)
    if not len(a) or not len(b):
        return np.zeros((len(a), len(b)), dtype=np.int64)
    if a.shape[1] != b.shape[1]:
        raise LengthMismatch(a.shape[1], b.shape[1])
    out = np.empty((len(a), len(b)), dtype=np.int64)
    step = max(1, 65536 // max(1, len(b)))
    for start in range(0, len(a), step):
        xor = np.bitwise_xor(a[start : start + step, None, :], b[None, :, :])
        out[start : start + step] = _POPCOUNT[xor].sum(axis=2)
    return out


# endregion

# region Clustering


def adjusted_rand_index(labels_a: Sequence[int], labels_b: Sequence[int]) -> float:
    """Agreement between two partitions of the same items, corrected for chance (1 = identical partitions)."""
    if len(labels_a) != len(labels_b):
        raise LengthMismatch(len(labels_a), len(labels_b))
    n = len(labels_a)
    if n < 2:
        return 1.0
    _, a_idx = np.unique(np.asarray(labels_a), return_inverse=True)
    _, b_idx = np.unique(np.asarray(labels_b), return_inverse=True)
    table = np.zeros((a_idx.max() + 1, b_idx.max() + 1), dtype=np.int64)
    np.add.at(table, (a_idx.reshape(-1), b_idx.reshape(-1)), 1)

    index = sum(comb(int(v), 2) for v in table.reshape(-1))
    sum_a = sum(comb(int(v), 2) for v in table.sum(axis=1))
    sum_b = sum(comb(int(v), 2) for v in table.sum(axis=0))
    expected = sum_a * sum_b / comb(n, 2)
    max_index = (sum_a + sum_b) / 2
    if max_index == expected:
        return 1.0
    return (index - expected) / (max_index - expected)


# endregion
