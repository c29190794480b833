#!/usr/bin/env python

from unittest import main

import numpy as np

from painting_retrieval.exceptions import InvalidArgument, PatchOutOfBounds
from painting_retrieval.features.keypoints import FeatureChannel, Keypoint, Pyramid, detect_keypoints, fast_detect
from painting_retrieval.features.keypoints import fast_scores, feature_plane, keypoint_region, orient_keypoint
from painting_retrieval.imgproc.raster import BinaryMask, RasterImage
from painting_retrieval.synthetic import shift_hue
from painting_retrieval.testing import RetrievalTestCase, painting_on_wall


def _square_image(size: int = 64, start: int = 20, stop: int = 44) -> RasterImage:
    pixels = np.zeros((size, size), dtype=np.uint8)
    pixels[start:stop, start:stop] = 200
    return RasterImage(pixels)


class FastTest(RetrievalTestCase):
    def test_isolated_bright_pixel(self):
        values = np.zeros((15, 15), dtype=np.int16)
        values[7, 7] = 255
        scores = fast_scores(values, 20)
        self.assertEqual(16 * 255, scores[7, 7])
        self.assertEqual(1, np.count_nonzero(scores))

    def test_flat_has_no_corners(self):
        self.assertEqual(0, np.count_nonzero(fast_scores(np.full((20, 20), 90), 10)))

    def test_small_input(self):
        self.assertEqual(0, np.count_nonzero(fast_scores(np.zeros((6, 6)), 10)))

    def test_invalid_threshold(self):
        with self.assert_raises_contains_str(InvalidArgument, 'threshold=0'):
            fast_scores(np.zeros((10, 10)), 0)

    def test_square_corners(self):
        keypoints = fast_detect(_square_image(), 20, 50, 1)
        self.assertTrue(keypoints)
        positions = {(int(kp.x), int(kp.y)) for kp in keypoints}
        self.assertTrue(positions & {(20, 20), (43, 20), (20, 43), (43, 43)})
        scores = [kp.score for kp in keypoints]
        self.assertEqual(sorted(scores, reverse=True), scores)

    def test_max_keypoints(self):
        self.assertLessEqual(len(fast_detect(_square_image(), 20, 2, 1)), 2)

    def test_constant_offset_keeps_keypoints(self):
        img = _square_image()
        brighter = img.with_pixels(img.pixels + 30)
        self.assertEqual(fast_detect(img, 20, 50, 3), fast_detect(brighter, 20, 50, 3))

    def test_region_filters_before_limit(self):
        pyramid = Pyramid(_square_image(), 1)
        everywhere = detect_keypoints(pyramid, 20, 50)
        region = np.zeros((64, 64), dtype=bool)
        region[:32] = True
        kept = detect_keypoints(pyramid, 20, 2, region=region)
        self.assertTrue(kept)
        self.assertTrue(all(kp.y < 32 for kp in kept))
        self.assertEqual([kp for kp in everywhere if kp.y < 32][:2], kept)


class FeaturePlaneTest(RetrievalTestCase):
    def test_value_plane_ignores_hue_shift(self):
        img = painting_on_wall()
        shifted = shift_hue(img, 60)
        value = feature_plane(img).pixels.astype(int)
        self.assertLessEqual(np.abs(value - feature_plane(shifted).pixels.astype(int)).max(), 1)
        luma = feature_plane(img, FeatureChannel.LUMA).pixels.astype(int)
        self.assertGreater(np.abs(luma - feature_plane(shifted, 'luma').pixels.astype(int)).max(), 1)

    def test_gray_input(self):
        img = _square_image()
        self.assertEqual(img, feature_plane(img))

    def test_keypoint_region_shrinks_mask(self):
        bits = np.zeros((40, 40), dtype=bool)
        bits[10:30, 10:30] = True
        region = keypoint_region(BinaryMask(bits))
        self.assertEqual(144, int(region.sum()))
        self.assertTrue(region[14:26, 14:26].all())
        self.assert_array_equal(bits, keypoint_region(BinaryMask(bits), 0))


class PyramidTest(RetrievalTestCase):
    def test_half_scale_means(self):
        pixels = np.array([[0, 2, 10, 10], [1, 1, 10, 11]], dtype=np.uint8)
        pyramid = Pyramid(RasterImage(pixels), 2)
        self.assertEqual(2, len(pyramid))
        self.assert_array_equal([[1, 10]], pyramid.levels[1])

    def test_stops_when_too_small(self):
        self.assertEqual(2, len(Pyramid(RasterImage.blank(5, 3), 3)))

    def test_level_coordinates(self):
        x, y = Pyramid.from_level(5, 7, 2)
        self.assertEqual((21.5, 29.5), (x, y))
        self.assertEqual((5, 7), Pyramid.to_level(Keypoint(x, y, 1.0, 0.0, 2)))


class OrientationTest(RetrievalTestCase):
    def test_bright_right_points_east(self):
        pixels = np.zeros((41, 41), dtype=np.uint8)
        pixels[:, 21:] = 200
        kp = orient_keypoint(RasterImage(pixels), Keypoint(20, 20, 1.0))
        self.assertAlmostEqual(0.0, kp.orientation)

    def test_bright_top_points_north(self):
        pixels = np.zeros((41, 41), dtype=np.uint8)
        pixels[:20] = 200
        kp = orient_keypoint(RasterImage(pixels), Keypoint(20, 20, 1.0))
        self.assertAlmostEqual(90.0, kp.orientation)

    def test_flat_patch(self):
        kp = orient_keypoint(RasterImage.blank(41, 41, 0), Keypoint(20, 20, 1.0, 45.0))
        self.assertEqual(0.0, kp.orientation)

    def test_patch_out_of_bounds(self):
        with self.assert_raises_contains_str(PatchOutOfBounds, 'radius=15'):
            orient_keypoint(RasterImage.blank(41, 41), Keypoint(10, 20, 1.0))


if __name__ == '__main__':
    try:
        main(verbosity=2, exit=False)
    except KeyboardInterrupt:
        print()
