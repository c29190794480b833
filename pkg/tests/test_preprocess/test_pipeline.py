#!/usr/bin/env python

from unittest import main

import numpy as np

from painting_retrieval.config import Profile, RunConfig
from painting_retrieval.imgproc.geometry import rotate
from painting_retrieval.imgproc.raster import ColorSpace, RasterImage
from painting_retrieval.metrics import mask_prf, match_boxes, mean_angular_error, mean_iou
from painting_retrieval.preprocess.background import has_wall
from painting_retrieval.preprocess.pipeline import preprocess_pipeline
from painting_retrieval.preprocess.rotation import RotationMethod
from painting_retrieval.synthetic import DatasetGenerator
from painting_retrieval.testing import RetrievalTestCase, museum_painting, painting_on_wall

ONLY_BACKGROUND = RunConfig(rotation=False, denoise=False, textbox=False)


class PipelineTest(RetrievalTestCase):
    def test_every_stage_disabled(self):
        img = painting_on_wall()
        config = RunConfig(rotation=False, denoise=False, background=False, textbox=False)
        crops, report = preprocess_pipeline(img, config)
        self.assertEqual(1, len(crops))
        self.assertEqual(img, crops[0].image)
        self.assertEqual(img.width * img.height, crops[0].mask.count)
        self.assertEqual(1, report.painting_count)
        self.assertEqual(0.0, report.angle)
        self.assertEqual(img.width * img.height, report.mask.count)

    def test_background_only(self):
        crops, report = preprocess_pipeline(painting_on_wall(), ONLY_BACKGROUND)
        self.assertEqual(1, len(crops))
        self.assertEqual((160, 120), (report.mask.width, report.mask.height))
        self.assertGreater(report.mask.count, 0.9 * 80 * 60)
        self.assertLess(report.mask.count, 1.1 * 80 * 60)
        self.assertFalse(report.mask.bits[:20].any())
        self.assertEqual([], report.text_boxes)

    def test_blank_wall(self):
        img = RasterImage.blank(100, 80, 200, ColorSpace.RGB)
        with self.assertLogs('painting_retrieval.preprocess.pipeline', 'WARNING'):
            crops, report = preprocess_pipeline(img, ONLY_BACKGROUND)
        self.assertEqual([], crops)
        self.assertEqual(0, report.painting_count)
        self.assertEqual(0, report.mask.count)

    def test_rotated_painting(self):
        img = rotate(painting_on_wall(), 10, (200, 200, 190))
        crops, report = preprocess_pipeline(img, RunConfig(denoise=False, textbox=False))
        self.assertLessEqual(abs(report.angle - 10), 2)
        self.assertEqual(1, len(crops))
        self.assertEqual(report.angle, crops[0].rotation)
        self.assertEqual((img.width, img.height), (report.mask.width, report.mask.height))
        self.assertGreater(report.mask.count, 0.85 * 80 * 60)

    def test_level_painting_is_not_rotated(self):
        crops, report = preprocess_pipeline(painting_on_wall(), RunConfig(denoise=False, textbox=False))
        self.assertEqual(0.0, report.angle)
        self.assertEqual(0.0, crops[0].rotation)

    def test_frame_filling_painting_is_not_derotated(self):
        # Slanted content with no wall around it
        img = rotate(museum_painting(0, 240, 200), 20).crop(97, 95, 197, 175)
        self.assertFalse(has_wall(img))
        crops, report = preprocess_pipeline(img, RunConfig(denoise=False, textbox=False))
        self.assertEqual(0.0, report.angle)
        self.assertTrue(all(crop.rotation == 0.0 for crop in crops))

    def test_noisy_image(self):
        rng = np.random.default_rng(11)
        pixels = np.full((60, 80), 128, dtype=np.uint8)
        noise = rng.random(pixels.shape)
        pixels[noise < 0.05] = 0
        pixels[noise > 0.95] = 255
        config = RunConfig(rotation=False, background=False, textbox=False)
        crops, report = preprocess_pipeline(RasterImage(pixels), config)
        self.assertTrue(report.noisy)
        self.assertLess(report.psnr, 30)
        self.assertGreater(np.mean(crops[0].image.pixels == 128), 0.95)


class SyntheticProfileTest(RetrievalTestCase):
    def test_ds1_background_removal(self):
        precision, recall = [], []
        for scene in DatasetGenerator(Profile.DS1, seed=4, museum_size=8, query_count=8).scenes():
            _, report = preprocess_pipeline(scene.image, RunConfig(textbox=False))
            p, r, _ = mask_prf(report.mask, scene.mask)
            precision.append(p)
            recall.append(r)
        self.assertGreaterEqual(np.mean(recall), 0.98)
        self.assertGreaterEqual(np.mean(precision), 0.92)

    def test_ds4_rotation(self):
        scenes = DatasetGenerator(Profile.DS4, seed=5, museum_size=6, query_count=8).scenes()
        expected = [scene.angle for scene in scenes]
        for method in RotationMethod:
            with self.subTest(method=method):
                config = RunConfig(rotation_method=method, background=False, textbox=False)
                angles = [preprocess_pipeline(scene.image, config)[1].angle for scene in scenes]
                self.assertLessEqual(mean_angular_error(angles, expected), 1.0)

    def test_ds2_text_boxes(self):
        pairs = []
        for scene in DatasetGenerator(Profile.DS2, seed=6, museum_size=8, query_count=10).scenes():
            _, report = preprocess_pipeline(scene.image, RunConfig(rotation=False))
            pairs.extend(match_boxes(report.text_boxes, scene.boxes))
        self.assertGreaterEqual(mean_iou(pairs), 0.7)


if __name__ == '__main__':
    try:
        main(verbosity=2, exit=False)
    except KeyboardInterrupt:
        print()
