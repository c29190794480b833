"""
Color, texture, and text descriptors for painting crops.
"""

from .base import COLOR_KINDS, TEXTURE_KINDS, DescriptorKind, DescriptorVector, Layout
from .color import HistogramSpec, block_histogram, hist_3d, hist_gray_1d, multires_histogram
from .extract import describe, describe_all, index_kinds
from .text import AuthorCatalog, CatalogEntry, OcrPort, SidecarOcr, match_author, read_text_descriptor
from .texture import dct_descriptor, hog_descriptor, lbp_descriptor
