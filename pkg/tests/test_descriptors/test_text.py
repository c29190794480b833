#!/usr/bin/env python

from unittest import main

import numpy as np

from painting_retrieval.descriptors.text import AuthorCatalog, CatalogEntry, NullOcr, OcrPort, SidecarOcr
from painting_retrieval.descriptors.text import binarize_text, levenshtein, match_author, normalize_name
from painting_retrieval.descriptors.text import read_text_descriptor
from painting_retrieval.exceptions import CatalogMismatch
from painting_retrieval.imgproc.raster import RasterImage
from painting_retrieval.testing import RetrievalTestCase, TemporaryDir

CATALOG = AuthorCatalog(
    [
        CatalogEntry(2, 'Frida Kahlo', 'The Two Fridas'),
        CatalogEntry(0, 'Claude Monet', 'Water Lilies'),
        CatalogEntry(1, 'Claude Monet', 'Impression, Sunrise'),
    ]
)


class RecordingOcr:
    def __init__(self, text: str = 'recognized'):
        self.text = text
        self.images = []

    def recognize(self, image: RasterImage) -> str:
        self.images.append(image)
        return self.text


def _text_box() -> RasterImage:
    pixels = np.full((10, 30), 240, dtype=np.uint8)
    pixels[3:7, 4:8] = 15
    pixels[3:7, 12:20] = 15
    return RasterImage(pixels)


class NameMatchingTest(RetrievalTestCase):
    def test_normalize_name(self):
        self.assertEqual('vincent vangogh', normalize_name('  Vincent   VAN-Gogh! '))
        self.assertEqual('', normalize_name('...'))

    def test_levenshtein(self):
        self.assertEqual(3, levenshtein('kitten', 'sitting'))
        self.assertEqual(0, levenshtein('monet', 'monet'))
        self.assertEqual(5, levenshtein('', 'monet'))

    def test_exact_author(self):
        self.assertEqual((frozenset({0, 1}), 0.0), match_author('CLAUDE MONET', CATALOG))

    def test_close_author(self):
        labels, distance = match_author('Frida Kahl', CATALOG)
        self.assertEqual(frozenset({2}), labels)
        self.assertAlmostEqual(1 / 11, distance)

    def test_empty_text(self):
        self.assertEqual((frozenset(), 1.0), match_author('', CATALOG))
        self.assertEqual((frozenset(), 1.0), match_author('Monet', AuthorCatalog([])))


class CatalogTest(RetrievalTestCase):
    def test_sorted_by_label(self):
        self.assertEqual([0, 1, 2], CATALOG.labels)
        self.assertEqual({'claude monet': [0, 1], 'frida kahlo': [2]}, CATALOG.authors())
        self.assertEqual('The Two Fridas', CATALOG[2].title)
        self.assertIn(1, CATALOG)

    def test_duplicate_label(self):
        with self.assert_raises_contains_str(CatalogMismatch, 'label=3'):
            AuthorCatalog([CatalogEntry(3, 'A', ''), CatalogEntry(3, 'B', '')])

    def test_missing_author(self):
        with self.assert_raises_contains_str(CatalogMismatch, 'Missing author'):
            AuthorCatalog([CatalogEntry(3, ' ', 'Untitled')])

    def test_from_file(self):
        with TemporaryDir() as tmp_dir:
            path = tmp_dir.joinpath('catalog.tsv')
            path.write_text('# label\tauthor\ttitle\n\n1\tClaude Monet\tWater Lilies\n0\tFrida Kahlo\n', 'utf-8')
            catalog = AuthorCatalog.from_file(path)
        expected = [CatalogEntry(0, 'Frida Kahlo', ''), CatalogEntry(1, 'Claude Monet', 'Water Lilies')]
        self.assertEqual(expected, list(catalog))

    def test_from_file_errors(self):
        with TemporaryDir() as tmp_dir:
            with self.assert_raises_contains_str(CatalogMismatch, 'Unable to read'):
                AuthorCatalog.from_file(tmp_dir.joinpath('missing.tsv'))
            path = tmp_dir.joinpath('bad.tsv')
            path.write_text('x\tSomeone\n', 'utf-8')
            with self.assert_raises_contains_str(CatalogMismatch, "label='x'"):
                AuthorCatalog.from_file(path)


class OcrTest(RetrievalTestCase):
    def test_binarize_dark_letters(self):
        letters = binarize_text(_text_box())
        self.assertEqual(16 + 32, letters.count)
        self.assertTrue(letters.bits[4, 5])

    def test_binarize_bright_letters(self):
        inverted = RasterImage(255 - _text_box().pixels)
        self.assertEqual(48, binarize_text(inverted).count)

    def test_binarize_flat(self):
        self.assertEqual(0, binarize_text(RasterImage.blank(10, 10, 128)).count)

    def test_read_text_sends_binarized_crop(self):
        ocr = RecordingOcr()
        self.assertEqual('recognized', read_text_descriptor(_text_box(), ocr))
        (binarized,) = ocr.images
        self.assertEqual({0, 255}, set(np.unique(binarized.pixels).tolist()))
        self.assertEqual(0, binarized.pixels[4, 5])
        self.assertEqual(255, binarized.pixels[0, 0])

    def test_read_text_without_letters(self):
        ocr = RecordingOcr()
        self.assertEqual('', read_text_descriptor(RasterImage.blank(10, 10, 128), ocr))
        self.assertEqual([], ocr.images)

    def test_ports(self):
        for ocr in (SidecarOcr(), NullOcr(), RecordingOcr()):
            with self.subTest(ocr=ocr):
                self.assertIsInstance(ocr, OcrPort)
        self.assertEqual('', NullOcr().recognize(_text_box()))

    def test_sidecar_lines(self):
        with TemporaryDir() as tmp_dir:
            tmp_dir.joinpath('query_00001.ocr.txt').write_text('Claude Monet\n Frida Kahlo \n', 'utf-8')
            source = tmp_dir.joinpath('query_00001.png')
            ocr = SidecarOcr()
            recognize = [
                ocr.recognize(RasterImage(_text_box().pixels, source=source, source_index=i)) for i in range(3)
            ]
        self.assertEqual(['Claude Monet', 'Frida Kahlo', ''], recognize)

    def test_sidecar_without_source(self):
        self.assertEqual('', SidecarOcr().recognize(_text_box()))


if __name__ == '__main__':
    try:
        main(verbosity=2, exit=False)
    except KeyboardInterrupt:
        print()
