#!/usr/bin/env python

from unittest import main

import numpy as np

from painting_retrieval.config import RunConfig
from painting_retrieval.descriptors.base import DescriptorKind, DescriptorVector, Layout
from painting_retrieval.engine.index import GalleryEntry, MuseumIndex, build_index
from painting_retrieval.engine.storage import load_index, save_index
from painting_retrieval.exceptions import CatalogMismatch, InvalidArgument, LayoutMismatch, MissingDescriptor
from painting_retrieval.exceptions import UnreadableImage
from painting_retrieval.imgproc.raster import to_gray, write_image
from painting_retrieval.testing import MUSEUM_AUTHORS, RetrievalTestCase, TemporaryDir, museum_painting, write_museum

CONFIG = RunConfig(rotation=False, denoise=False, background=False, textbox=False, analysis_size=64)
GRAY2 = Layout.build(DescriptorKind.GRAY1D, 2, 1, bins=2)


def _entry(label: int, values=(0.5, 0.5), author: str = 'Frida Kahlo') -> GalleryEntry:
    descriptors = {DescriptorKind.GRAY1D: DescriptorVector(values, GRAY2)}
    return GalleryEntry(label, author, f'Painting {label}', 0.0, descriptors)


class BuildIndexTest(RetrievalTestCase):
    def test_build(self):
        with TemporaryDir() as tmp:
            index = build_index(write_museum(tmp), CONFIG)

        self.assertEqual(len(MUSEUM_AUTHORS), len(index))
        self.assertEqual([0, 1, 2, 3], index.labels.tolist())
        self.assertEqual(CONFIG.fingerprint(), index.fingerprint)
        self.assertEqual({DescriptorKind.BLOCK, DescriptorKind.HOG}, set(index.layouts))
        self.assertEqual(4, index.matrix(DescriptorKind.HOG).shape[0])
        entry = index[1]
        self.assertEqual(('Frida Kahlo', 'Painting 1'), (entry.author, entry.title))
        self.assertAlmostEqual(float(to_gray(museum_painting(1)).pixels.mean()), entry.brightness)
        self.assertTrue(all(len(entry.features) >= 4 for entry in index))

    def test_parallel_build_matches_serial(self):
        with TemporaryDir() as tmp:
            write_museum(tmp)
            serial = build_index(tmp, CONFIG)
            parallel = build_index(tmp, CONFIG.copy(jobs=3))
        self.assertEqual(serial, parallel)

    def test_catalog_path(self):
        with TemporaryDir() as tmp:
            write_museum(tmp)
            other = tmp.joinpath('authors.tsv')
            tmp.joinpath('catalog.tsv').rename(other)
            self.assertEqual(4, len(build_index(tmp, CONFIG, other)))

    def test_empty_directory(self):
        with TemporaryDir() as tmp:
            with self.assertLogs('painting_retrieval.engine.index', 'WARNING'):
                index = build_index(tmp, CONFIG)
            self.assertEqual(0, len(index))
            self.assertEqual(CONFIG.fingerprint(), index.fingerprint)
            path = tmp.joinpath('museum.idx')
            save_index(index, path)
            self.assertEqual(index, load_index(path, CONFIG))

    def test_missing_directory(self):
        with TemporaryDir() as tmp:
            with self.assert_raises_contains_str(InvalidArgument, 'expected a directory'):
                build_index(tmp.joinpath('missing'), CONFIG)

    def test_missing_catalog(self):
        with TemporaryDir() as tmp:
            write_museum(tmp)
            tmp.joinpath('catalog.tsv').unlink()
            with self.assert_raises_contains_str(CatalogMismatch, 'Unable to read catalog'):
                build_index(tmp, CONFIG)

    def test_image_without_catalog_row(self):
        with TemporaryDir() as tmp:
            write_museum(tmp)
            write_image(museum_painting(7), tmp.joinpath('bbdd_00007.png'))
            with self.assert_raises_contains_str(CatalogMismatch, 'No catalog entry found for bbdd_00007.png'):
                build_index(tmp, CONFIG)

    def test_image_without_label(self):
        with TemporaryDir() as tmp:
            write_museum(tmp)
            write_image(museum_painting(7), tmp.joinpath('cover.png'))
            with self.assert_raises_contains_str(CatalogMismatch, 'Unable to determine a label'):
                build_index(tmp, CONFIG)

    def test_unreadable_image(self):
        with TemporaryDir() as tmp:
            write_museum(tmp, MUSEUM_AUTHORS + ('Claude Monet',))
            tmp.joinpath('bbdd_00004.png').write_bytes(b'not a png')
            with self.assertLogs('painting_retrieval.engine.index', 'WARNING'):
                index = build_index(tmp, CONFIG)
            self.assertEqual([0, 1, 2, 3], index.labels.tolist())
            with self.assert_raises_contains_str(UnreadableImage, 'bbdd_00004.png'):
                build_index(tmp, CONFIG.copy(skip_unreadable=False))


class MuseumIndexTest(RetrievalTestCase):
    def test_entries_sorted_by_label(self):
        index = MuseumIndex([_entry(2), _entry(0), _entry(1)], 'abc')
        self.assertEqual([0, 1, 2], index.labels.tolist())
        self.assertIn(2, index)
        self.assertNotIn(3, index)
        self.assertEqual('Painting 2', index[2].title)

    def test_matrix(self):
        index = MuseumIndex([_entry(0, (1, 0)), _entry(1, (0, 1))], 'abc')
        matrix = index.matrix(DescriptorKind.GRAY1D)
        self.assert_array_equal([[1.0, 0.0], [0.0, 1.0]], matrix)
        self.assertFalse(matrix.flags.writeable)
        self.assertIs(matrix, index.matrix(DescriptorKind.GRAY1D))

    def test_invalid_labels(self):
        with self.assert_raises_contains_str(CatalogMismatch, 'Invalid label=-1'):
            MuseumIndex([_entry(-1)], 'abc')
        with self.assert_raises_contains_str(CatalogMismatch, 'Duplicate label=1'):
            MuseumIndex([_entry(1), _entry(1)], 'abc')

    def test_inconsistent_kinds(self):
        bare = GalleryEntry(1, 'Claude Monet', 'Water Lilies', 0.0)
        with self.assertRaises(LayoutMismatch):
            MuseumIndex([_entry(0), bare], 'abc')

    def test_inconsistent_layouts(self):
        other = Layout.build(DescriptorKind.GRAY1D, 2, 1, bins=2, space='hsv')
        entry = GalleryEntry(1, 'Claude Monet', '', 0.0, {DescriptorKind.GRAY1D: DescriptorVector((1, 0), other)})
        with self.assertRaises(LayoutMismatch):
            MuseumIndex([_entry(0), entry], 'abc')

    def test_missing_descriptor(self):
        with self.assert_raises_contains_str(MissingDescriptor, 'does not contain hog descriptors'):
            MuseumIndex([_entry(0)], 'abc').matrix(DescriptorKind.HOG)

    def test_catalog(self):
        index = MuseumIndex([_entry(0), _entry(1, author='Claude Monet'), _entry(2)], 'abc')
        self.assertEqual({'frida kahlo': [0, 2], 'claude monet': [1]}, index.catalog.authors())

    def test_empty(self):
        index = MuseumIndex([], 'abc')
        self.assertEqual(0, len(index))
        self.assertEqual({}, index.layouts)
        self.assertEqual((0,), index.labels.shape)
        self.assertEqual(np.int64, index.labels.dtype)


if __name__ == '__main__':
    try:
        main(verbosity=2, exit=False)
    except KeyboardInterrupt:
        print()
