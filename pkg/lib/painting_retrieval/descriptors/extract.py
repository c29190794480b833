"""
Computes descriptors for a painting crop using the settings from a :class:`~painting_retrieval.config.RunConfig`.

:author: Doug Skrypa
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Iterable, Optional, Union

from ..imgproc.raster import BinaryMask, RasterImage
from .base import DescriptorKind, DescriptorVector
from .color import HistogramSpec, block_histogram, hist_3d, hist_gray_1d, multires_histogram
from .texture import dct_descriptor, hog_descriptor, lbp_descriptor, texture_input

if TYPE_CHECKING:
    from ..config import RunConfig

__all__ = ['describe', 'describe_all', 'index_kinds']


def describe(
    kind: Union[DescriptorKind, str], img: RasterImage, mask: Optional[BinaryMask], config: RunConfig
) -> DescriptorVector:
    """
    :param kind: The descriptor to compute
    :param img: A painting crop
    :param mask: Pixels to describe (``None`` for every pixel).  Texture descriptors replace excluded pixels with the
      mean gray level of the included ones.
    :param config: The settings for every descriptor
    """
    kind = DescriptorKind(kind)
    if kind is DescriptorKind.GRAY1D:
        return hist_gray_1d(img, config.gray_bins, mask)
    elif kind is DescriptorKind.HIST3D:
        return hist_3d(img, config.hist3d_space, config.hist3d_bins, mask)
    elif kind is DescriptorKind.BLOCK:
        return block_histogram(img, config.block_grid, _block_spec(config), mask)
    elif kind is DescriptorKind.MULTIRES:
        return multires_histogram(img, config.multires_levels, _block_spec(config), mask)

    gray = texture_input(img, mask)
    if kind is DescriptorKind.LBP:
        return lbp_descriptor(gray, config.lbp_grid, config.analysis_size)
    elif kind is DescriptorKind.DCT:
        return dct_descriptor(gray, config.dct_keep, config.analysis_size)
    return hog_descriptor(gray, config.hog_cell, config.hog_block, config.hog_bins, config.analysis_size)


def _block_spec(config: RunConfig) -> HistogramSpec:
    return HistogramSpec(config.block_space, config.block_bins)


def index_kinds(config: RunConfig) -> tuple[DescriptorKind, ...]:
    """The descriptors stored in an index built with the given config, in a stable order"""
    kinds = {config.color_descriptor, config.texture_descriptor, DescriptorKind.HOG, *config.extra_descriptors}
    return tuple(kind for kind in DescriptorKind if kind in kinds)


def describe_all(
    img: RasterImage, mask: Optional[BinaryMask], config: RunConfig, kinds: Iterable[DescriptorKind] = None
) -> dict[DescriptorKind, DescriptorVector]:
    if kinds is None:
        kinds = index_kinds(config)
    return {kind: describe(kind, img, mask, config) for kind in kinds}
