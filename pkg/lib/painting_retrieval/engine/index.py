"""
The museum index: descriptors and keypoint features for every catalogued painting.

:author: Doug Skrypa
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Iterator, Optional

import numpy as np

from ..descriptors.base import DescriptorKind, DescriptorVector, Layout
from ..descriptors.extract import describe_all, index_kinds
from ..descriptors.text import AuthorCatalog, CatalogEntry
from ..exceptions import CatalogMismatch, InvalidArgument, LayoutMismatch, MissingDescriptor, UnreadableImage
from ..features.brief import DetectParams, FeatureSet, extract_features
from ..imgproc.raster import RasterImage, read_image, to_gray
from ..utils import iter_image_paths, label_from_path

if TYPE_CHECKING:
    from ..config import RunConfig
    from ..typing import PathLike

__all__ = ['FORMAT_VERSION', 'CATALOG_NAME', 'GalleryEntry', 'MuseumIndex', 'build_index', 'describe_painting']
log = logging.getLogger(__name__)

FORMAT_VERSION = 1
CATALOG_NAME = 'catalog.tsv'


@dataclass(eq=False)
class GalleryEntry:
    label: int
    author: str
    title: str
    #: Mean gray level of the painting
    brightness: float
    descriptors: dict[DescriptorKind, DescriptorVector] = field(default_factory=dict)
    features: FeatureSet = field(default_factory=FeatureSet.empty)

    def __eq__(self, other: GalleryEntry) -> bool:
        if not isinstance(other, GalleryEntry):
            return NotImplemented
        return (
            (self.label, self.author, self.title, self.brightness)
            == (other.label, other.author, other.title, other.brightness)
            and self.descriptors == other.descriptors
            and self.features == other.features
        )

    __hash__ = None

    @property
    def catalog_entry(self) -> CatalogEntry:
        return CatalogEntry(self.label, self.author, self.title)


class MuseumIndex:
    """
    An immutable collection of gallery entries ordered by label.  Every entry stores the same descriptor kinds with
    identical layouts.

    :param entries: The indexed paintings
    :param fingerprint: The :meth:`RunConfig.fingerprint` of the config used to build the index
    :param version: The index file format version
    """

    __slots__ = ('entries', 'fingerprint', 'version', 'layouts', '_by_label', '_matrices', '_catalog')

    def __init__(self, entries: Iterable[GalleryEntry], fingerprint: str, version: int = FORMAT_VERSION):
        self.entries = tuple(sorted(entries, key=lambda e: e.label))
        self.fingerprint = fingerprint
        self.version = version
        self._by_label = {}
        for entry in self.entries:
            if entry.label < 0:
                raise CatalogMismatch(f'Invalid label={entry.label} - expected >= 0')
            if entry.label in self._by_label:
                raise CatalogMismatch(f'Duplicate label={entry.label}')
            self._by_label[entry.label] = entry

        self.layouts: dict[DescriptorKind, Layout] = {}
        if self.entries:
            self.layouts = {kind: vec.layout for kind, vec in self.entries[0].descriptors.items()}
        for entry in self.entries:
            if set(entry.descriptors) != set(self.layouts):
                raise LayoutMismatch(sorted(k.value for k in self.layouts), sorted(k.value for k in entry.descriptors))
            for kind, vec in entry.descriptors.items():
                vec.check_comparable(self.layouts[kind])

        self._matrices = {}
        self._catalog = None

    def __repr__(self) -> str:
        kinds = ','.join(kind.value for kind in self.layouts)
        return f'<{self.__class__.__name__}[entries={len(self.entries)}, kinds={kinds}, v{self.version}]>'

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[GalleryEntry]:
        return iter(self.entries)

    def __getitem__(self, label: int) -> GalleryEntry:
        return self._by_label[label]

    def __contains__(self, label: int) -> bool:
        return label in self._by_label

    def __eq__(self, other: MuseumIndex) -> bool:
        if not isinstance(other, MuseumIndex):
            return NotImplemented
        return (self.fingerprint, self.version, self.entries) == (other.fingerprint, other.version, other.entries)

    __hash__ = None

    @property
    def labels(self) -> np.ndarray:
        return np.array([entry.label for entry in self.entries], dtype=np.int64)

    @property
    def catalog(self) -> AuthorCatalog:
        if self._catalog is None:
            self._catalog = AuthorCatalog(entry.catalog_entry for entry in self.entries)
        return self._catalog

    def layout(self, kind: DescriptorKind) -> Layout:
        try:
            return self.layouts[kind]
        except KeyError:
            raise MissingDescriptor(kind.value) from None

    def matrix(self, kind: DescriptorKind) -> np.ndarray:
        """Every entry's vector for the given descriptor, one row per entry (in label order)"""
        try:
            return self._matrices[kind]
        except KeyError:
            pass
        layout = self.layout(kind)
        if self.entries:
            matrix = np.stack([entry.descriptors[kind].values for entry in self.entries])
        else:
            matrix = np.zeros((0, layout.length), dtype=np.float64)
        matrix.flags.writeable = False
        self._matrices[kind] = matrix
        return matrix


# region Build


def describe_painting(
    img: RasterImage, config: RunConfig
) -> tuple[float, dict[DescriptorKind, DescriptorVector], FeatureSet]:
    """Compute the brightness, every indexed descriptor, and the keypoint features of a clean museum image."""
    brightness = float(to_gray(img).pixels.mean())
    descriptors = describe_all(img, None, config, index_kinds(config))
    return brightness, descriptors, extract_features(img, DetectParams.from_config(config))


def build_index(museum_dir: PathLike, config: RunConfig, catalog_path: Optional[PathLike] = None) -> MuseumIndex:
    """
    Index every PNG / JPEG image in the given directory.  Museum images are clean photos of a single painting, so no
    preprocessing is applied.

    :param museum_dir: Directory containing ``<name><label>.png`` images
    :param config: Descriptor, feature, and parallelism settings
    :param catalog_path: The ``label<TAB>author<TAB>title`` catalog (default: ``catalog.tsv`` in ``museum_dir``)
    :return: The index, with entries ordered by label (empty when the directory has no images, in which case the
      catalog may be absent)
    :raises: :class:`CatalogMismatch` when an image has no catalog row; :class:`UnreadableImage` when an image can't
      be read and ``skip_unreadable`` is disabled
    """
    museum_dir = Path(museum_dir)
    if not museum_dir.is_dir():
        raise InvalidArgument(f'Invalid museum_dir={museum_dir.as_posix()} - expected a directory')
    image_paths = list(iter_image_paths(museum_dir))
    catalog_path = Path(catalog_path) if catalog_path else museum_dir.joinpath(CATALOG_NAME)
    if not image_paths and not catalog_path.exists():
        log.warning(f'No images or catalog found in {museum_dir.as_posix()}')
        catalog = AuthorCatalog(())
    else:
        catalog = AuthorCatalog.from_file(catalog_path)

    paths = []
    for path in image_paths:
        try:
            label = label_from_path(path)
        except ValueError as e:
            raise CatalogMismatch(str(e)) from e
        if label not in catalog:
            raise CatalogMismatch(f'No catalog entry found for {path.name} ({label=})')
        paths.append((label, path))

    def _index(item: tuple[int, Path]) -> Optional[GalleryEntry]:
        label, path = item
        try:
            img = read_image(path)
        except UnreadableImage as e:
            if not config.skip_unreadable:
                raise
            log.warning(f'Skipping {e}')
            return None
        log.debug(f'Indexing {path.name}')
        brightness, descriptors, features = describe_painting(img, config)
        entry = catalog[label]
        return GalleryEntry(label, entry.author, entry.title, brightness, descriptors, features)

    with ThreadPoolExecutor(max_workers=config.jobs) as executor:
        entries = [entry for entry in executor.map(_index, paths) if entry is not None]

    if missing := len(catalog) - len(entries):
        log.debug(f'{missing} catalog entries have no indexed image')
    log.info(f'Indexed {len(entries)} paintings from {museum_dir.as_posix()}')
    return MuseumIndex(entries, config.fingerprint())


# endregion
