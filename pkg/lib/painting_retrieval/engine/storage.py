"""
The versioned binary index file.

Layout (all integers little-endian)::

    header      magic ``PRIX``, uint16 format version, 64-byte ASCII config fingerprint
    catalog     length-prefixed UTF-8 JSON: descriptor layouts, and label / author / title / brightness per entry
    descriptors one length-prefixed float64 block per entry, holding that entry's vectors in layout order
    features    one length-prefixed feature block per entry

Every block is prefixed with its byte length as a uint64.  Writing the same index twice produces identical files.

:author: Doug Skrypa
"""

from __future__ import annotations

import json
import logging
import struct
from pathlib import Path
from typing import TYPE_CHECKING, Iterator, Optional

import numpy as np

from ..descriptors.base import DescriptorKind, DescriptorVector, Layout
from ..exceptions import CorruptIndex, FingerprintMismatch, VersionMismatch
from ..features.brief import FeatureSet
from .index import FORMAT_VERSION, GalleryEntry, MuseumIndex

if TYPE_CHECKING:
    from ..config import RunConfig
    from ..typing import PathLike

__all__ = ['save_index', 'load_index', 'dump_index', 'parse_index', 'MAGIC']
log = logging.getLogger(__name__)

MAGIC = b'PRIX'
_HEADER = struct.Struct('<4sH64s')
_LENGTH = struct.Struct('<Q')


# region Encoding


def _block(data: bytes) -> bytes:
    return _LENGTH.pack(len(data)) + data


def dump_index(index: MuseumIndex) -> bytes:
    kinds = list(index.layouts)
    catalog = {
        'layouts': [index.layouts[kind].to_json() for kind in kinds],
        'entries': [
            {'label': e.label, 'author': e.author, 'title': e.title, 'brightness': e.brightness} for e in index
        ],
    }
    parts = [
        _HEADER.pack(MAGIC, index.version, index.fingerprint.encode('ascii')),
        _block(json.dumps(catalog, sort_keys=True, separators=(',', ':'), ensure_ascii=False).encode('utf-8')),
    ]
    for entry in index:
        values = [entry.descriptors[kind].values for kind in kinds]
        data = np.concatenate(values).astype('<f8').tobytes() if values else b''
        parts.append(_block(data))
    for entry in index:
        parts.append(_block(entry.features.to_bytes()))
    return b''.join(parts)


def save_index(index: MuseumIndex, path: PathLike):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = dump_index(index)
    path.write_bytes(data)
    log.debug(f'Saved {index} to {path.as_posix()} ({len(data):,d} B)')


# endregion

# region Decoding


class _Reader:
    __slots__ = ('data', 'pos')

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def unpack(self, fmt: struct.Struct) -> tuple:
        try:
            values = fmt.unpack_from(self.data, self.pos)
        except struct.error as e:
            raise CorruptIndex(f'Truncated index file at offset={self.pos}') from e
        self.pos += fmt.size
        return values

    def block(self) -> bytes:
        (length,) = self.unpack(_LENGTH)
        end = self.pos + length
        if end > len(self.data):
            raise CorruptIndex(f'Truncated index block at offset={self.pos} ({length=})')
        data = self.data[self.pos : end]
        self.pos = end
        return data

    def blocks(self, count: int) -> Iterator[bytes]:
        for _ in range(count):
            yield self.block()


def _parse_catalog(raw: bytes) -> tuple[list[Layout], list[tuple[int, str, str, float]]]:
    try:
        catalog = json.loads(raw.decode('utf-8'))
        layouts = [Layout.from_json(layout) for layout in catalog['layouts']]
        entries = [
            (int(row['label']), str(row['author']), str(row['title']), float(row['brightness']))
            for row in catalog['entries']
        ]
    except (UnicodeDecodeError, ValueError, KeyError, TypeError) as e:
        raise CorruptIndex(f'Invalid index catalog block: {e}') from e
    return layouts, entries


def _split_vectors(raw: bytes, layouts: list[Layout]) -> dict[DescriptorKind, DescriptorVector]:
    expected = sum(layout.length for layout in layouts) * 8
    if len(raw) != expected:
        raise CorruptIndex(f'Invalid descriptor block length={len(raw)} (expected {expected})')
    values = np.frombuffer(raw, dtype='<f8').astype(np.float64)
    vectors, start = {}, 0
    for layout in layouts:
        vectors[layout.kind] = DescriptorVector(values[start : start + layout.length], layout)
        start += layout.length
    return vectors


def parse_index(data: bytes) -> MuseumIndex:
    """Decode the contents of an index file."""
    reader = _Reader(data)
    magic, version, fingerprint = reader.unpack(_HEADER)
    if magic != MAGIC:
        raise CorruptIndex(f'Invalid index file header={magic!r}')
    try:
        fingerprint = fingerprint.rstrip(b'\0').decode('ascii')
    except UnicodeDecodeError as e:
        raise CorruptIndex(f'Invalid index fingerprint: {e}') from e

    if version != FORMAT_VERSION:
        raise VersionMismatch(version, FORMAT_VERSION)

    layouts, rows = _parse_catalog(reader.block())
    vectors = [_split_vectors(raw, layouts) for raw in reader.blocks(len(rows))]
    features = [FeatureSet.from_bytes(raw) for raw in reader.blocks(len(rows))]
    if reader.pos != len(data):
        raise CorruptIndex(f'Unexpected trailing data after offset={reader.pos}')

    entries = [GalleryEntry(*row, vecs, feats) for row, vecs, feats in zip(rows, vectors, features)]
    return MuseumIndex(entries, fingerprint, version)


def load_index(path: PathLike, config: Optional[RunConfig] = None, force: bool = False) -> MuseumIndex:
    """
    :param path: Path to an index file
    :param config: The active config; the index is only loaded if it was built with the same descriptor and feature
      settings
    :param force: Load the index even if it was built with different settings.  A different format version cannot be
      forced, since the file's contents cannot be decoded.
    :raises: :class:`CorruptIndex` if the file cannot be decoded, :class:`VersionMismatch` if it uses a different
      format version, :class:`FingerprintMismatch` if it was built with a different config
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise CorruptIndex(f'Unable to read index {path.as_posix()}: {e}') from e

    index = parse_index(data)
    if config is not None and index.fingerprint != (expected := config.fingerprint()):
        if not force:
            raise FingerprintMismatch(index.fingerprint, expected)
        log.warning(f'Loading {path.name} despite a config fingerprint mismatch')
    log.debug(f'Loaded {index} from {path.as_posix()}')
    return index


# endregion
