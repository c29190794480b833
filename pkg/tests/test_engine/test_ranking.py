#!/usr/bin/env python

from math import sqrt
from unittest import main

import numpy as np

from painting_retrieval.descriptors.base import DescriptorKind, DescriptorVector, Layout
from painting_retrieval.engine.index import GalleryEntry, MuseumIndex
from painting_retrieval.engine.ranking import UNKNOWN_RANKING, CropDescriptors, DescriptorWeights, Scored
from painting_retrieval.engine.ranking import combine_rankings, rank_by_descriptor, rank_by_features, rank_by_text
from painting_retrieval.exceptions import InvalidArgument, LayoutMismatch, MissingDescriptor, NoActiveDescriptor
from painting_retrieval.features.brief import FeatureSet
from painting_retrieval.features.keypoints import Keypoint
from painting_retrieval.features.matching import MatchParams
from painting_retrieval.metrics import Metric
from painting_retrieval.testing import RetrievalTestCase

GRAY2 = Layout.build(DescriptorKind.GRAY1D, 2, 1, bins=2)
VALUES = {0: (1, 0), 1: (0.5, 0.5), 2: (0, 1), 3: (0.5, 0.5)}
AUTHORS = {0: 'Pablo Picasso', 1: 'Frida Kahlo', 2: 'Pablo Picasso', 3: 'Claude Monet'}


def _rows(seed: int, count: int = 10) -> np.ndarray:
    return np.random.default_rng(seed).integers(0, 256, size=(count, 32), dtype=np.uint8)


def _features(seed: int, count: int = 10) -> FeatureSet:
    return FeatureSet([Keypoint(float(i), 0.0, 1.0) for i in range(count)], _rows(seed, count))


def _vector(values) -> DescriptorVector:
    return DescriptorVector(values, GRAY2)


def _index() -> MuseumIndex:
    entries = [
        GalleryEntry(label, AUTHORS[label], '', 0.0, {DescriptorKind.GRAY1D: _vector(values)}, _features(label + 1))
        for label, values in VALUES.items()
    ]
    return MuseumIndex(entries, 'abc')


def _labels(ranking) -> list[int]:
    return [scored.label for scored in ranking]


class WeightsTest(RetrievalTestCase):
    def test_normalized(self):
        self.assertEqual(DescriptorWeights(0.25, 0.25, 0.5), DescriptorWeights(1, 1, 2).normalized())

    def test_negative(self):
        with self.assert_raises_contains_str(InvalidArgument, 'expected values >= 0'):
            DescriptorWeights(-1, 1, 1).normalized()

    def test_all_zero(self):
        with self.assertRaises(NoActiveDescriptor):
            DescriptorWeights(0, 0, 0).normalized()


class DescriptorRankingTest(RetrievalTestCase):
    def test_similarity_measure(self):
        ranking = rank_by_descriptor(_index(), _vector((1, 0)), Metric.HELLINGER)
        self.assertEqual([0, 1, 3, 2], _labels(ranking))
        self.assertAlmostEqual(1.0, ranking[0].score)
        self.assertAlmostEqual(sqrt(0.5), ranking[1].score)
        self.assertAlmostEqual(0.0, ranking[3].score)

    def test_distance_measure(self):
        ranking = rank_by_descriptor(_index(), _vector((0, 1)), 'chi2')
        self.assertEqual([2, 1, 3, 0], _labels(ranking))
        self.assertAlmostEqual(0.0, ranking[0].score)

    def test_unnormalized_query(self):
        ranking = rank_by_descriptor(_index(), _vector((4, 0)), Metric.INTERSECT)
        self.assertEqual(Scored(0, 1.0), ranking[0])

    def test_layout_mismatch(self):
        other = DescriptorVector((1, 0), Layout.build(DescriptorKind.GRAY1D, 2, 1, bins=3))
        with self.assertRaises(LayoutMismatch):
            rank_by_descriptor(_index(), other)

    def test_missing_kind(self):
        hog = DescriptorVector((1, 0), Layout.build(DescriptorKind.HOG, 2, 0))
        with self.assertRaises(MissingDescriptor):
            rank_by_descriptor(_index(), hog)

    def test_empty_index(self):
        self.assertEqual([], rank_by_descriptor(MuseumIndex([], 'abc'), _vector((1, 0))))


class CombinedRankingTest(RetrievalTestCase):
    def test_color_only(self):
        crop = CropDescriptors(color=_vector((1, 0)))
        ranking = combine_rankings(_index(), crop, DescriptorWeights(1, 0, 0))
        self.assertEqual([0, 1, 3, 2], _labels(ranking))
        self.assertAlmostEqual(0.0, ranking[0].score)
        self.assertAlmostEqual(1 - sqrt(0.5), ranking[1].score)
        self.assertAlmostEqual(1.0, ranking[3].score)

    def test_text_only(self):
        crop = CropDescriptors(authors=frozenset({0, 2}))
        ranking = combine_rankings(_index(), crop, DescriptorWeights(0, 0, 1))
        self.assertEqual([Scored(0, 0.0), Scored(2, 0.0), Scored(1, 1.0), Scored(3, 1.0)], ranking)

    def test_weighted(self):
        crop = CropDescriptors(_vector((0, 1)), _vector((0, 1)), frozenset({0}))
        ranking = combine_rankings(_index(), crop, DescriptorWeights(0.3, 0.3, 0.4), Metric.HELLINGER, Metric.CHI2)
        self.assertEqual(2, ranking[0].label)
        self.assertAlmostEqual(0.4, ranking[0].score)
        self.assertAlmostEqual(0.6, [s.score for s in ranking if s.label == 0][0])

    def test_missing_weighted_descriptor(self):
        with self.assert_raises_contains_str(MissingDescriptor, 'query texture'):
            combine_rankings(_index(), CropDescriptors(color=_vector((1, 0))), DescriptorWeights(1, 1, 0))

    def test_no_weights(self):
        with self.assertRaises(NoActiveDescriptor):
            combine_rankings(_index(), CropDescriptors(), DescriptorWeights(0, 0, 0))


class FeatureRankingTest(RetrievalTestCase):
    def test_known_painting(self):
        ranking = rank_by_features(_index(), _features(3))
        self.assertEqual([Scored(2, 10.0)], ranking)

    def test_unknown_painting(self):
        self.assertEqual(UNKNOWN_RANKING, rank_by_features(_index(), _features(99)))
        self.assertEqual(UNKNOWN_RANKING, rank_by_features(_index(), FeatureSet.empty()))

    def test_more_matches_rank_first(self):
        rows = np.concatenate([_rows(2), _rows(4)[:6]])
        query = FeatureSet([Keypoint(float(i), 0.0, 1.0) for i in range(16)], rows)
        ranking = rank_by_features(_index(), query)
        self.assertEqual([Scored(1, 10.0), Scored(3, 6.0)], ranking)
        self.assertEqual([Scored(1, 10.0)], rank_by_features(_index(), query, MatchParams(min_matches=7)))


class TextRankingTest(RetrievalTestCase):
    def test_author_first(self):
        ranking = rank_by_text(_index(), 'Pablo Picaso')
        self.assertEqual([0, 2, 1, 3], _labels(ranking))
        self.assertAlmostEqual(1 / 13, ranking[0].score)
        self.assertEqual(Scored(1, 1.0), ranking[2])

    def test_no_text(self):
        self.assertEqual([Scored(label, 1.0) for label in range(4)], rank_by_text(_index(), ''))


if __name__ == '__main__':
    try:
        main(verbosity=2, exit=False)
    except KeyboardInterrupt:
        print()
