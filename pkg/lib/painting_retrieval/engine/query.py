"""
Query execution: preprocess a query image, then rank the museum for every painting found in it.

:author: Doug Skrypa
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Optional, Sequence, Union

from ..config import DEFAULT_CONFIG, QueryMode, RunConfig
from ..descriptors.extract import describe
from ..descriptors.text import OcrPort, SidecarOcr, match_author, read_text_descriptor
from ..exceptions import InvalidArgument
from ..features.brief import DetectParams, extract_features
from ..features.matching import MatchParams
from ..imgproc.raster import RasterImage, read_image
from ..preprocess.base import PaintingCrop, PreprocessReport
from ..preprocess.pipeline import preprocess_pipeline
from .ranking import CropDescriptors, DescriptorWeights, Scored, combine_rankings, rank_by_descriptor
from .ranking import rank_by_features, rank_by_text

if TYPE_CHECKING:
    from .index import MuseumIndex

__all__ = ['QueryOutcome', 'query', 'query_paths', 'rank_crop', 'crop_text']
log = logging.getLogger(__name__)


@dataclass
class QueryOutcome:
    """
    :param source: The query image file
    :param rankings: One ranking per painting found in the query (left to right), each truncated to K
    :param report: What preprocessing found
    """

    source: Optional[Path]
    rankings: list[list[Scored]] = field(default_factory=list)
    report: PreprocessReport = field(default_factory=PreprocessReport)

    @property
    def labels(self) -> list[list[int]]:
        return [[scored.label for scored in ranking] for ranking in self.rankings]


def crop_text(crop: PaintingCrop, ocr: OcrPort) -> str:
    """The text read from the crop's erased text box ('' when no box was found)"""
    if (box := crop.text_box) is None:
        return ''
    return read_text_descriptor(crop.image.crop(*box), ocr)


def rank_crop(
    index: MuseumIndex, crop: PaintingCrop, mode: QueryMode, config: RunConfig, ocr: OcrPort
) -> Sequence[Scored]:
    """Rank every museum entry against one painting crop using the given query mode."""
    if mode is QueryMode.FEATURE:
        features = extract_features(crop.image, DetectParams.from_config(config), crop.mask)
        return rank_by_features(index, features, MatchParams.from_config(config))
    elif mode is QueryMode.TEXT:
        return rank_by_text(index, crop_text(crop, ocr))
    elif mode is QueryMode.COLOR:
        vector = describe(config.color_descriptor, crop.image, crop.mask, config)
        return rank_by_descriptor(index, vector, config.color_metric)
    elif mode is QueryMode.TEXTURE:
        vector = describe(config.texture_descriptor, crop.image, crop.mask, config)
        return rank_by_descriptor(index, vector, config.texture_metric)

    weights = DescriptorWeights.from_config(config)
    color = describe(config.color_descriptor, crop.image, crop.mask, config) if weights.color else None
    texture = describe(config.texture_descriptor, crop.image, crop.mask, config) if weights.texture else None
    authors = match_author(crop_text(crop, ocr), index.catalog)[0] if weights.text else None
    descriptors = CropDescriptors(color, texture, authors)
    return combine_rankings(index, descriptors, weights, config.color_metric, config.texture_metric)


def query(
    index: MuseumIndex,
    image: Union[RasterImage, Path, str],
    k: int = 10,
    mode: Union[QueryMode, str] = QueryMode.FEATURE,
    config: RunConfig = DEFAULT_CONFIG,
    ocr: OcrPort = None,
) -> QueryOutcome:
    """
    :param index: The museum index
    :param image: A query image, or the path to one
    :param k: The max number of labels in each ranking
    :param mode: How the museum is ranked
    :param config: Preprocessing and descriptor settings
    :param ocr: The text recognizer used by the text and combined modes (default: :class:`SidecarOcr`)
    :return: One ranking per painting in the query; a painting that is not in the museum is ranked ``[-1]`` in
      feature mode
    """
    if k < 1:
        raise InvalidArgument(f'Invalid {k=} - expected an integer >= 1')
    mode = QueryMode(mode)
    if not isinstance(image, RasterImage):
        image = read_image(image)
    ocr = SidecarOcr() if ocr is None else ocr

    crops, report = preprocess_pipeline(image, config)
    rankings = [list(rank_crop(index, crop, mode, config, ocr)[:k]) for crop in crops]
    outcome = QueryOutcome(image.source, rankings, report)
    log.debug(f'Query {image.source.name if image.source else image}: {outcome.labels}')
    return outcome


def query_paths(
    index: MuseumIndex,
    paths: Iterable[Path],
    k: int = 10,
    mode: Union[QueryMode, str] = QueryMode.FEATURE,
    config: RunConfig = DEFAULT_CONFIG,
    ocr: OcrPort = None,
) -> list[QueryOutcome]:
    """Run :func:`query` for each path in parallel (up to ``config.jobs`` at a time); outcomes are sorted by name."""
    paths = sorted(paths, key=lambda p: p.name)
    mode = QueryMode(mode)
    ocr = SidecarOcr() if ocr is None else ocr
    with ThreadPoolExecutor(max_workers=config.jobs) as executor:
        outcomes = list(executor.map(lambda path: query(index, path, k, mode, config, ocr), paths))
    log.info(f'Processed {len(outcomes)} query images in {mode.value} mode')
    return outcomes
