#!/usr/bin/env python

from math import pi
from unittest import main

import numpy as np

from painting_retrieval.imgproc.geometry import derotate, rotate, rotate_mask, rotate_points, rotated_size
from painting_retrieval.imgproc.hough import LineSegment, hough_lines
from painting_retrieval.imgproc.raster import BinaryMask, RasterImage
from painting_retrieval.testing import RetrievalTestCase, gradient_image

SMALL = np.array([[1, 2, 3], [4, 5, 6]], dtype=np.uint8)


class RotationTest(RetrievalTestCase):
    def test_rotated_size(self):
        self.assertEqual((40, 20), rotated_size(40, 20, 0))
        self.assertEqual((20, 40), rotated_size(40, 20, 90))
        self.assertEqual((40, 20), rotated_size(40, 20, 180))
        width, height = rotated_size(40, 20, 30)
        self.assertEqual((45, 38), (width, height))

    def test_zero_angle_copies(self):
        img = gradient_image()
        rotated = rotate(img, 0)
        self.assertEqual(img, rotated)
        self.assertIsNot(img.pixels, rotated.pixels)

    def test_quarter_turn_counterclockwise(self):
        rotated = rotate(RasterImage(SMALL), 90)
        self.assert_array_equal([[3, 6], [2, 5], [1, 4]], rotated.pixels)

    def test_derotate_inverts_quarter_turn(self):
        img = RasterImage(SMALL)
        self.assertEqual(img, derotate(rotate(img, 90), 90))

    def test_fill_outside_source(self):
        rotated = rotate(RasterImage.blank(20, 10, 200), 45, fill=7)
        self.assertEqual(7, rotated.pixels[0, 0])
        self.assertEqual(200, rotated.pixels[rotated.height // 2, rotated.width // 2])

    def test_color_fill(self):
        rotated = rotate(gradient_image(20, 10), 30, fill=(1, 2, 3))
        self.assert_array_equal([1, 2, 3], rotated.pixels[0, 0])

    def test_explicit_output_size(self):
        rotated = rotate(gradient_image(20, 10), 10, out_size=(20, 10))
        self.assertEqual((20, 10), (rotated.width, rotated.height))

    def test_rotate_mask(self):
        mask = BinaryMask(SMALL > 3)
        self.assert_array_equal([[False, True], [False, True], [False, True]], rotate_mask(mask, 90).bits)
        self.assertIs(mask, rotate_mask(mask, 0))

    def test_rotate_points_center_fixed(self):
        moved = rotate_points(np.array([[19.5, 9.5]]), 33, (40, 20))
        width, height = rotated_size(40, 20, 33)
        self.assert_array_almost_equal([[(width - 1) / 2, (height - 1) / 2]], moved)

    def test_rotate_points_matches_image(self):
        moved = rotate_points(np.array([[2, 0]]), 90, (3, 2))
        self.assert_array_almost_equal([[0, 0]], moved)

    def test_derotate_round_trip(self):
        img = gradient_image(64, 48)
        for angle in (7.5, 30, -20):
            with self.subTest(angle=angle):
                restored = derotate(rotate(img, angle, 128), angle, 128, (img.width, img.height))
                diff = np.abs(restored.pixels.astype(int) - img.pixels.astype(int))[2:-2, 2:-2]
                self.assertLessEqual(diff.mean(), 3)


class HoughTest(RetrievalTestCase):
    def test_line_angle(self):
        self.assertAlmostEqual(0.0, LineSegment(5, pi / 2, 1).angle)
        self.assertAlmostEqual(45.0, LineSegment(5, pi / 4, 1).angle)
        self.assertAlmostEqual(-45.0, LineSegment(5, 3 * pi / 4, 1).angle)
        self.assertAlmostEqual(90.0, LineSegment(5, 0, 1).angle)

    def test_horizontal_line(self):
        bits = np.zeros((40, 60), dtype=bool)
        bits[20, 5:55] = True
        lines = hough_lines(BinaryMask(bits), 1.0, pi / 360, 25)
        self.assertTrue(lines)
        best = lines[0]
        self.assertLessEqual(abs(best.angle), 1.0)
        self.assertLessEqual(abs(best.rho - 20), 1.0)
        self.assertEqual(50, best.support)

    def test_support_ordering(self):
        bits = np.zeros((40, 60), dtype=bool)
        bits[10, 5:55] = True
        bits[5:35, 30] = True
        lines = hough_lines(BinaryMask(bits), 1.0, pi / 180, 20)
        supports = [line.support for line in lines]
        self.assertEqual(sorted(supports, reverse=True), supports)

    def test_empty_mask(self):
        self.assertEqual([], hough_lines(BinaryMask.empty(10, 10)))

    def test_invalid_threshold(self):
        with self.assert_raises_contains_str(ValueError, 'vote_threshold=0'):
            hough_lines(BinaryMask.empty(10, 10), vote_threshold=0)


if __name__ == '__main__':
    try:
        main(verbosity=2, exit=False)
    except KeyboardInterrupt:
        print()
