"""
Painting Retrieval

:author: Doug Skrypa
"""

from .config import DEFAULT_CONFIG, Profile, QueryMode, RunConfig
from .descriptors import DescriptorKind, OcrPort, SidecarOcr, describe
from .engine import MuseumIndex, QueryOutcome, build_index, kmeans_cluster, load_index, query, query_paths, save_index
from .evaluation import GroundTruth, retrieval_report
from .exceptions import RetrievalError
from .features import extract_features, match_descriptors
from .imgproc import BinaryMask, ColorSpace, RasterImage, read_image
from .metrics import UNKNOWN_LABEL, Box, Metric, map_at_k
from .preprocess import preprocess_pipeline
