#!/usr/bin/env python

from pathlib import Path
from unittest import main

from painting_retrieval.config import DEFAULT_CONFIG, Profile, QueryMode, RunConfig
from painting_retrieval.engine.index import build_index
from painting_retrieval.engine.query import QueryOutcome, crop_text, query, query_paths
from painting_retrieval.engine.storage import dump_index
from painting_retrieval.evaluation import GroundTruth, Results, retrieval_report
from painting_retrieval.exceptions import InvalidArgument
from painting_retrieval.metrics import UNKNOWN_LABEL, Box
from painting_retrieval.preprocess.base import PaintingCrop
from painting_retrieval.synthetic import DatasetGenerator, SyntheticDataset
from painting_retrieval.testing import RetrievalTestCase, TemporaryDir, museum_painting, write_museum
from painting_retrieval.utils import iter_image_paths

CONFIG = RunConfig(rotation=False, denoise=False, background=False, textbox=False, analysis_size=64)


class RecordingOcr:
    def __init__(self, text: str):
        self.text = text
        self.images = []

    def recognize(self, image) -> str:
        self.images.append(image)
        return self.text


class QueryTest(RetrievalTestCase):
    @classmethod
    def setUpClass(cls):
        cls._tmp_dir = TemporaryDir()
        cls.museum = write_museum(Path(cls._tmp_dir.name))
        cls.index = build_index(cls.museum, CONFIG)

    @classmethod
    def tearDownClass(cls):
        cls._tmp_dir.cleanup()

    def test_self_retrieval_by_features(self):
        for label in range(4):
            with self.subTest(label=label):
                outcome = query(self.index, museum_painting(label), 3, QueryMode.FEATURE, CONFIG)
                self.assertEqual(label, outcome.labels[0][0])
                self.assertEqual(1, outcome.report.painting_count)

    def test_self_retrieval_by_descriptors(self):
        for mode in (QueryMode.COLOR, QueryMode.TEXTURE, QueryMode.COMBINED):
            for label in range(4):
                with self.subTest(mode=mode, label=label):
                    outcome = query(self.index, museum_painting(label), 4, mode, CONFIG)
                    self.assertEqual(label, outcome.labels[0][0])
                    self.assertEqual(4, len(outcome.labels[0]))

    def test_k_truncates(self):
        outcome = query(self.index, museum_painting(1), 2, 'color', CONFIG)
        self.assertEqual(2, len(outcome.rankings[0]))

    def test_invalid_k(self):
        with self.assert_raises_contains_str(InvalidArgument, 'k=0'):
            query(self.index, museum_painting(1), 0, config=CONFIG)

    def test_text_without_box(self):
        ocr = RecordingOcr('Frida Kahlo')
        outcome = query(self.index, museum_painting(1), 4, QueryMode.TEXT, CONFIG, ocr)
        self.assertEqual([[0, 1, 2, 3]], outcome.labels)
        self.assertEqual([], ocr.images)

    def test_crop_text(self):
        crop = PaintingCrop.full(museum_painting(0)).replace(text_box=Box(10, 10, 50, 20))
        ocr = RecordingOcr('Pablo Picasso')
        self.assertEqual('Pablo Picasso', crop_text(crop, ocr))
        self.assertEqual([(40, 10)], [(img.width, img.height) for img in ocr.images])
        self.assertEqual('', crop_text(PaintingCrop.full(museum_painting(0)), ocr))

    def test_query_paths(self):
        paths = list(iter_image_paths(self.museum))[::-1]
        outcomes = query_paths(self.index, paths, 2, QueryMode.FEATURE, CONFIG.copy(jobs=2))
        names = [outcome.source.name for outcome in outcomes]
        self.assertEqual(['bbdd_00000.png', 'bbdd_00001.png', 'bbdd_00002.png', 'bbdd_00003.png'], names)
        self.assertEqual([0, 1, 2, 3], [outcome.labels[0][0] for outcome in outcomes])

    def test_outcome_labels(self):
        outcome = QueryOutcome(None)
        self.assertEqual([], outcome.labels)
        self.assertEqual(0, outcome.report.painting_count)



def _retrieve(dataset: SyntheticDataset, mode: QueryMode, config: RunConfig = DEFAULT_CONFIG) -> Results:
    index = build_index(dataset.museum_dir, config)
    gt = GroundTruth.load(dataset.ground_truth)
    outcomes = query_paths(index, [gt.query_dir.joinpath(q.image) for q in gt], 1, mode, config)
    return [outcome.labels for outcome in outcomes]


class SyntheticDatasetTest(RetrievalTestCase):
    @classmethod
    def setUpClass(cls):
        cls._tmp_dir = TemporaryDir()
        cls.root = Path(cls._tmp_dir.name)
        cls._datasets = {}
        cls._results = {}

    @classmethod
    def tearDownClass(cls):
        cls._tmp_dir.cleanup()

    def dataset(self, profile: Profile, museum_size: int = 10, query_count: int = 8) -> SyntheticDataset:
        key = (profile, museum_size, query_count)
        try:
            return self._datasets[key]
        except KeyError:
            out_dir = self.root.joinpath('{}_{}_{}'.format(profile.value, museum_size, query_count))
            generator = DatasetGenerator(profile, 7, museum_size, query_count)
            self._datasets[key] = dataset = generator.write(out_dir)
            return dataset

    def results(self, profile: Profile, mode: QueryMode, query_count: int = 8) -> Results:
        key = (profile, mode, query_count)
        try:
            return self._results[key]
        except KeyError:
            self._results[key] = results = _retrieve(self.dataset(profile, query_count=query_count), mode)
            return results

    def map_at_1(self, profile: Profile, mode: QueryMode, query_count: int = 8) -> float:
        gt = GroundTruth.load(self.dataset(profile, query_count=query_count).ground_truth)
        return retrieval_report(self.results(profile, mode, query_count), gt, 1)['map@1']

    def test_self_retrieval(self):
        dataset = self.dataset(Profile.DS1, 12, 1)
        index = build_index(dataset.museum_dir, DEFAULT_CONFIG)
        paths = list(iter_image_paths(dataset.museum_dir))
        config = DEFAULT_CONFIG.copy(rotation=False, denoise=False, background=False, textbox=False)
        for mode in (QueryMode.COLOR, QueryMode.TEXTURE, QueryMode.COMBINED, QueryMode.FEATURE):
            with self.subTest(mode=mode):
                outcomes = query_paths(index, paths, 1, mode, config)
                self.assertEqual([[label] for label in range(12)], [outcome.labels[0] for outcome in outcomes])

    def test_feature_retrieval_on_clean_scenes(self):
        for profile in (Profile.DS1, Profile.DS2):
            with self.subTest(profile=profile):
                self.assertGreaterEqual(self.map_at_1(profile, QueryMode.FEATURE), 0.9)

    def test_feature_retrieval_on_corrupted_scenes(self):
        self.assertGreaterEqual(self.map_at_1(Profile.DS3, QueryMode.FEATURE), 0.85)

    def test_feature_retrieval_with_unknown_paintings(self):
        self.assertGreaterEqual(self.map_at_1(Profile.DS4, QueryMode.FEATURE, 16), 0.85)
        gt = GroundTruth.load(self.dataset(Profile.DS4, query_count=16).ground_truth)
        answers = []
        for rankings, expected in zip(self.results(Profile.DS4, QueryMode.FEATURE, 16), gt):
            for i, label in enumerate(expected.labels):
                if label == UNKNOWN_LABEL:
                    answers.append(rankings[i][0] if i < len(rankings) and rankings[i] else None)
        self.assertTrue(answers)
        self.assertGreaterEqual(answers.count(UNKNOWN_LABEL) / len(answers), 0.9)

    def test_texture_beats_color_on_corrupted_scenes(self):
        texture = self.map_at_1(Profile.DS3, QueryMode.TEXTURE)
        self.assertGreater(texture, self.map_at_1(Profile.DS3, QueryMode.COLOR))

    def test_block_histograms_match_global_histograms_on_clean_scenes(self):
        dataset = self.dataset(Profile.DS1)
        gt = GroundTruth.load(dataset.ground_truth)
        config = RunConfig(color_descriptor='hist3d')
        global_hist = retrieval_report(_retrieve(dataset, QueryMode.COLOR, config), gt, 1)['map@1']
        self.assertGreaterEqual(self.map_at_1(Profile.DS1, QueryMode.COLOR), global_hist)

    def test_repeated_runs_match(self):
        dataset = self.dataset(Profile.DS2)
        first = dump_index(build_index(dataset.museum_dir, DEFAULT_CONFIG))
        self.assertEqual(first, dump_index(build_index(dataset.museum_dir, DEFAULT_CONFIG.copy(jobs=3))))
        results = self.results(Profile.DS2, QueryMode.FEATURE)
        self.assertEqual(results, _retrieve(dataset, QueryMode.FEATURE, DEFAULT_CONFIG.copy(jobs=2)))


if __name__ == '__main__':
    try:
        main(verbosity=2, exit=False)
    except KeyboardInterrupt:
        print()
