#!/usr/bin/env python

from unittest import main

import numpy as np

from painting_retrieval.exceptions import InvalidArgument, MultiChannelInput
from painting_retrieval.imgproc.filters import gaussian_kernel, median_filter, otsu_threshold, resize_bilinear, sobel
from painting_retrieval.imgproc.morphology import MorphOp, SEShape, StructuringElement, apply_morphology, morph_mask
from painting_retrieval.imgproc.morphology import morphology
from painting_retrieval.imgproc.raster import BinaryMask, RasterImage
from painting_retrieval.testing import RetrievalTestCase, gradient_image


class FilterTest(RetrievalTestCase):
    def test_median_removes_isolated_pixel(self):
        pixels = np.zeros((9, 9), dtype=np.uint8)
        pixels[4, 4] = 255
        self.assertEqual(RasterImage.blank(9, 9), median_filter(RasterImage(pixels)))

    def test_median_keeps_color_space(self):
        img = gradient_image()
        filtered = median_filter(img, 2)
        self.assertIs(img.space, filtered.space)
        self.assertEqual((img.width, img.height), (filtered.width, filtered.height))

    def test_median_invalid_radius(self):
        with self.assert_raises_contains_str(ValueError, 'radius=0'):
            median_filter(RasterImage.blank(3, 3), 0)

    def test_gaussian_kernel(self):
        kernel = gaussian_kernel(5, 1.4)
        self.assertAlmostEqual(1.0, kernel.sum())
        self.assert_array_almost_equal(kernel, kernel.T)
        self.assertEqual((2, 2), np.unravel_index(kernel.argmax(), kernel.shape))

    def test_sobel_ramp(self):
        ramp = np.tile(np.arange(10, dtype=np.float64), (6, 1))
        gx, gy = sobel(ramp)
        self.assert_array_almost_equal(np.full((6, 8), 8.0), gx[:, 1:-1])
        self.assert_array_almost_equal(np.zeros((6, 10)), gy)

    def test_otsu_bimodal(self):
        values = np.array([10] * 50 + [200] * 50, dtype=np.uint8)
        self.assertEqual(10, otsu_threshold(values))

    def test_otsu_constant(self):
        self.assertEqual(77, otsu_threshold(np.full(20, 77, dtype=np.uint8)))

    def test_otsu_empty_mask(self):
        values = np.arange(10, dtype=np.uint8)
        self.assertEqual(255, otsu_threshold(values, np.zeros(10, dtype=bool)))

    def test_resize_same_size(self):
        img = gradient_image()
        self.assertIs(img, resize_bilinear(img, img.width, img.height))

    def test_resize_constant(self):
        resized = resize_bilinear(RasterImage.blank(7, 5, 90), 13, 3)
        self.assertEqual(RasterImage.blank(13, 3, 90), resized)


class MorphologyTest(RetrievalTestCase):
    def setUp(self):
        pixels = np.zeros((15, 15), dtype=np.uint8)
        pixels[5:10, 5:10] = 255
        self.square = RasterImage(pixels)

    def test_invalid_element(self):
        for size in (0, 4, -3):
            with self.subTest(size=size), self.assertRaises(InvalidArgument):
                StructuringElement(size)

    def test_ellipse_footprint(self):
        footprint = StructuringElement.square(5, SEShape.ELLIPSE).footprint
        self.assertTrue(footprint[2].all())
        self.assertTrue(footprint[:, 2].all())
        self.assertFalse(footprint[0, 0])
        self.assertFalse(footprint[4, 4])

    def test_erode(self):
        eroded = morphology(MorphOp.ERODE, self.square, StructuringElement(3))
        self.assertEqual(9 * 255, int(eroded.pixels.astype(int).sum()))
        self.assertEqual(255, eroded.pixels[7, 7])

    def test_dilate(self):
        dilated = morphology('dilate', self.square, StructuringElement(3))
        self.assertEqual(49, int(np.count_nonzero(dilated.pixels)))

    def test_open_removes_small_dot(self):
        pixels = self.square.pixels.copy()
        pixels[1, 1] = 255
        opened = morphology(MorphOp.OPEN, RasterImage(pixels), StructuringElement(3))
        self.assertEqual(self.square, opened)

    def test_close_fills_gap(self):
        bits = np.zeros((5, 9), dtype=bool)
        bits[2, :4] = bits[2, 5:] = True
        closed = morph_mask(MorphOp.CLOSE, BinaryMask(bits), StructuringElement(3, 1))
        self.assertTrue(closed.bits[2].all())

    def test_tophat_keeps_small_bright_detail(self):
        pixels = np.full((11, 11), 50, dtype=np.uint8)
        pixels[5, 5] = 250
        hat = morphology(MorphOp.TOPHAT, RasterImage(pixels), StructuringElement(3))
        self.assertEqual(200, hat.pixels[5, 5])
        self.assertEqual(200, int(hat.pixels.astype(int).sum()))

    def test_blackhat_keeps_small_dark_detail(self):
        pixels = np.full((11, 11), 200, dtype=np.uint8)
        pixels[5, 5] = 20
        hat = morphology(MorphOp.BLACKHAT, RasterImage(pixels), StructuringElement(3))
        self.assertEqual(180, hat.pixels[5, 5])
        self.assertEqual(180, int(hat.pixels.astype(int).sum()))

    def test_multi_channel_rejected(self):
        with self.assertRaises(MultiChannelInput):
            morphology(MorphOp.ERODE, gradient_image(), StructuringElement(3))

    def _framed_noise(self) -> np.ndarray:
        values = np.full((30, 36), 128, dtype=np.uint8)
        values[6:-6, 6:-6] = np.random.default_rng(3).integers(0, 256, size=(18, 24))
        return values

    def test_erode_dilate_duality(self):
        values = self._framed_noise()
        for se in (StructuringElement(5, 3), StructuringElement.square(5, SEShape.ELLIPSE)):
            for op, dual in ((MorphOp.ERODE, MorphOp.DILATE), (MorphOp.OPEN, MorphOp.CLOSE)):
                with self.subTest(se=se, op=op):
                    expected = 255 - apply_morphology(dual, 255 - values, se)
                    self.assert_array_equal(expected, apply_morphology(op, values, se))

    def test_open_close_idempotent(self):
        values, se = self._framed_noise(), StructuringElement(5, 3)
        for op in (MorphOp.OPEN, MorphOp.CLOSE):
            with self.subTest(op=op):
                once = apply_morphology(op, values, se)
                self.assert_array_equal(once, apply_morphology(op, once, se))

    def test_open_below_image_below_close(self):
        values, se = self._framed_noise(), StructuringElement(5, 3)
        self.assertTrue((apply_morphology(MorphOp.OPEN, values, se) <= values).all())
        self.assertTrue((values <= apply_morphology(MorphOp.CLOSE, values, se)).all())


if __name__ == '__main__':
    try:
        main(verbosity=2, exit=False)
    except KeyboardInterrupt:
        print()
