"""
Text descriptor: binarize a text box crop, recognize it through a pluggable OCR port, and match the recognized text
against the painter names in the museum catalog.

:author: Doug Skrypa
"""

from __future__ import annotations

import csv
import logging
import unicodedata
from functools import lru_cache
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Iterator, NamedTuple, Protocol, runtime_checkable

import numpy as np

from ..exceptions import CatalogMismatch
from ..imgproc.filters import otsu_threshold
from ..imgproc.raster import BinaryMask, RasterImage, to_gray

if TYPE_CHECKING:
    from ..typing import PathLike

__all__ = [
    'OcrPort',
    'SidecarOcr',
    'NullOcr',
    'CatalogEntry',
    'AuthorCatalog',
    'binarize_text',
    'read_text_descriptor',
    'normalize_name',
    'levenshtein',
    'match_author',
]
log = logging.getLogger(__name__)

OCR_SUFFIX = '.ocr.txt'


# region OCR


@runtime_checkable
class OcrPort(Protocol):
    """A recognizer that turns a binarized text box crop into text.  Implementations must be reentrant."""

    def recognize(self, image: RasterImage) -> str: ...


class SidecarOcr:
    """
    Deterministic recognizer that reads the text for each painting from ``<image stem>.ocr.txt`` next to the source
    image, one line per painting in left-to-right order.  Crops without a sidecar line are recognized as ``''``.
    """

    def recognize(self, image: RasterImage) -> str:
        if image.source is None:
            return ''
        lines = _read_sidecar(Path(image.source).with_suffix(OCR_SUFFIX))
        try:
            return lines[image.source_index]
        except IndexError:
            return ''


class NullOcr:
    """Recognizes nothing"""

    def recognize(self, image: RasterImage) -> str:
        return ''


@lru_cache(256)
def _read_sidecar(path: Path) -> tuple[str, ...]:
    try:
        return tuple(line.strip() for line in path.read_text('utf-8').splitlines())
    except FileNotFoundError:
        log.debug(f'No OCR sidecar found: {path.as_posix()}')
        return ()


def binarize_text(img: RasterImage) -> BinaryMask:
    """
    Otsu binarization where the minority class is the foreground (letters), which handles both bright and dark
    letters.  A crop with a single gray level has no foreground.
    """
    gray = to_gray(img).pixels
    threshold = otsu_threshold(gray)
    bright = gray > threshold
    if bright.sum() * 2 > bright.size:
        return BinaryMask(~bright)
    return BinaryMask(bright)


def read_text_descriptor(box_image: RasterImage, ocr: OcrPort) -> str:
    """
    :param box_image: The text box region of a painting crop
    :param ocr: The recognizer that receives the binarized crop (dark letters on a white background)
    :return: The raw recognized text
    """
    letters = binarize_text(box_image)
    if not letters.count:
        return ''
    binarized = box_image.with_pixels(np.where(letters.bits, 0, 255).astype(np.uint8))
    return ocr.recognize(binarized)


# endregion

# region Catalog


class CatalogEntry(NamedTuple):
    label: int
    author: str
    title: str


class AuthorCatalog:
    """The known author and title of each museum painting, keyed by label."""

    __slots__ = ('entries', '_by_label', '_by_author')

    def __init__(self, entries: Iterable[CatalogEntry]):
        self.entries = tuple(sorted(entries, key=lambda e: e.label))
        self._by_label = {}
        self._by_author: dict[str, list[int]] = {}
        for entry in self.entries:
            if entry.label in self._by_label:
                raise CatalogMismatch(f'Duplicate catalog label={entry.label}')
            if not entry.author.strip():
                raise CatalogMismatch(f'Missing author for catalog label={entry.label}')
            self._by_label[entry.label] = entry
            self._by_author.setdefault(normalize_name(entry.author), []).append(entry.label)

    @classmethod
    def from_file(cls, path: PathLike) -> AuthorCatalog:
        """Read a UTF-8 ``label<TAB>author<TAB>title`` file; blank lines and lines starting with ``#`` are ignored."""
        path = Path(path)
        try:
            with path.open('r', encoding='utf-8', newline='') as f:
                return cls(_parse_rows(csv.reader(f, delimiter='\t'), path))
        except OSError as e:
            raise CatalogMismatch(f'Unable to read catalog {path.as_posix()}: {e}') from e

    def __repr__(self) -> str:
        return f'<{self.__class__.__name__}[entries={len(self.entries)}, authors={len(self._by_author)}]>'

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[CatalogEntry]:
        return iter(self.entries)

    def __contains__(self, label: int) -> bool:
        return label in self._by_label

    def __getitem__(self, label: int) -> CatalogEntry:
        return self._by_label[label]

    @property
    def labels(self) -> list[int]:
        return [entry.label for entry in self.entries]

    def authors(self) -> dict[str, list[int]]:
        """Normalized author name -> labels of that author's paintings"""
        return self._by_author


def _parse_rows(rows: Iterable[list[str]], path: Path) -> Iterator[CatalogEntry]:
    for line_no, row in enumerate(rows, 1):
        if not row or not ''.join(row).strip() or row[0].startswith('#'):
            continue
        if len(row) < 2:
            raise CatalogMismatch(f'Invalid catalog row on line {line_no} in {path.name}: expected label<TAB>author')
        try:
            label = int(row[0])
        except ValueError:
            raise CatalogMismatch(f'Invalid label={row[0]!r} on line {line_no} in {path.name}') from None
        if label < 0:
            raise CatalogMismatch(f'Invalid label={label} on line {line_no} in {path.name} - expected >= 0')
        yield CatalogEntry(label, row[1].strip(), row[2].strip() if len(row) > 2 else '')


# endregion

# region Name Matching


def normalize_name(text: str) -> str:
    """Casefold, drop punctuation, and collapse whitespace."""
    kept = ''.join(c for c in text.casefold() if not unicodedata.category(c).startswith('P'))
    return ' '.join(kept.split())


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        current = [i]
        for j, cb in enumerate(b, 1):
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb)))
        previous = current
    return previous[-1]


def match_author(text: str, catalog: AuthorCatalog) -> tuple[frozenset[int], float]:
    """
    Find the catalog author closest to the recognized text.

    :param text: Recognized text
    :param catalog: The museum catalog
    :return: Tuple of (labels of every painting by the best matching author(s), normalized edit distance in [0, 1])
    """
    name = normalize_name(text)
    if not name or not len(catalog):
        return frozenset(), 1.0

    best = 1.0
    labels: set[int] = set()
    for author, author_labels in catalog.authors().items():
        distance = levenshtein(name, author) / max(len(name), len(author))
        if distance < best:
            best = distance
            labels = set(author_labels)
        elif distance == best and labels:
            labels.update(author_labels)
    return frozenset(labels), best


# endregion
