"""
Exceptions for Painting Retrieval

:author: Doug Skrypa
"""
# pylint: disable=W0231

from __future__ import annotations

import sys
from typing import TYPE_CHECKING, Any, Collection, Optional

if TYPE_CHECKING:
    from pathlib import Path

__all__ = [
    'RetrievalError',
    'InvalidArgument',
    'ConfigError',
    'InvalidConfig',
    'ImageError',
    'UnsupportedConversion',
    'MultiChannelInput',
    'InvalidThresholds',
    'OutOfBounds',
    'DimensionMismatch',
    'MetricError',
    'LengthMismatch',
    'NotNormalized',
    'EmptyRelevantSet',
    'EmptyInput',
    'DescriptorError',
    'BadBinCount',
    'GrayInput',
    'ImageTooSmall',
    'BadKeepCount',
    'GeometryMismatch',
    'LayoutMismatch',
    'OcrFailure',
    'FeatureError',
    'PatchOutOfBounds',
    'PreprocessError',
    'NoPaintingFound',
    'NoLinesFound',
    'BoxOutsideCrop',
    'EngineError',
    'UnreadableImage',
    'CatalogMismatch',
    'MissingDescriptor',
    'NoActiveDescriptor',
    'FewerImagesThanClusters',
    'CorruptIndex',
    'VersionMismatch',
    'FingerprintMismatch',
    'EvaluationError',
    'MalformedResults',
    'EvaluationBelowThreshold',
]


class RetrievalError(Exception):
    """Base class for all other Painting Retrieval exceptions"""

    code: int = 2
    message: str = None

    def __init__(self, message: str = None):
        if message:
            self.message = message

    def __str__(self) -> str:
        return self.message or ''

    def show(self) -> bool:
        if message := str(self):
            print(message, file=sys.stderr)
        return True

    def exit(self):
        self.show()
        sys.exit(self.code)


class InvalidArgument(RetrievalError, ValueError):
    """Raised when a function is called with an out-of-range or inconsistent argument"""


# region Configuration


class ConfigError(RetrievalError):
    """An error caused by an invalid run configuration"""


class InvalidConfig(ConfigError, ValueError):
    """Raised when a config file or keyword contains unknown keys or out-of-range values"""

    def __init__(self, key: Optional[str], message: str):
        self.key = key
        self.message = f'invalid config {key}: {message}' if key else f'invalid config: {message}'


# endregion

# region Image Processing


class ImageError(RetrievalError):
    """Base exception for invalid raster inputs"""


class UnsupportedConversion(ImageError, ValueError):
    def __init__(self, source: Any, target: Any):
        self.source = source
        self.target = target
        self.message = f'Unsupported color conversion: {source} -> {target}'


class MultiChannelInput(ImageError, ValueError):
    message = 'A single-channel image is required'


class InvalidThresholds(ImageError, ValueError):
    def __init__(self, low: float, high: float):
        self.message = f'Invalid thresholds: {low=} must be >= 0 and <= {high=}'


class OutOfBounds(ImageError, ValueError):
    """Raised when coordinates fall outside of the raster they refer to"""


class DimensionMismatch(ImageError, ValueError):
    def __init__(self, a_shape: tuple[int, ...], b_shape: tuple[int, ...]):
        self.message = f'Dimension mismatch: {a_shape} != {b_shape}'


# endregion

# region Metrics


class MetricError(RetrievalError):
    """Base exception for invalid metric inputs"""


class LengthMismatch(MetricError, ValueError):
    def __init__(self, a_len: int, b_len: int):
        self.message = f'Length mismatch: {a_len} != {b_len}'


class NotNormalized(MetricError, ValueError):
    message = 'The requested measure requires L1-normalized histograms'


class EmptyRelevantSet(MetricError, ValueError):
    message = 'At least one relevant label is required'


class EmptyInput(MetricError, ValueError):
    message = 'At least one entry is required'


# endregion

# region Descriptors


class DescriptorError(RetrievalError):
    """Base exception for descriptor extraction errors"""


class BadBinCount(DescriptorError, ValueError):
    def __init__(self, bins: int, low: int, high: int):
        self.message = f'Invalid {bins=} - expected a value in [{low}, {high}]'


class GrayInput(DescriptorError, ValueError):
    message = 'A 3-channel color space is required'


class ImageTooSmall(DescriptorError, ValueError):
    def __init__(self, shape: tuple[int, ...], grid: int):
        self.message = f'Image with shape={shape} is too small for a {grid}x{grid} grid'


class BadKeepCount(DescriptorError, ValueError):
    def __init__(self, keep: int):
        self.message = f'Invalid {keep=} - expected a value in [1, 64]'


class GeometryMismatch(DescriptorError, ValueError):
    """Raised when the analysis size is incompatible with the HOG cell / block geometry"""


class LayoutMismatch(DescriptorError, ValueError):
    def __init__(self, expected: Any, actual: Any):
        self.expected = expected
        self.actual = actual
        self.message = f'Descriptor layout mismatch: expected={expected} actual={actual}'


class OcrFailure(DescriptorError):
    """Raised by OcrPort implementations when recognition fails"""


# endregion

# region Features


class FeatureError(RetrievalError):
    """Base exception for keypoint pipeline errors"""


class PatchOutOfBounds(FeatureError, ValueError):
    def __init__(self, x: float, y: float, radius: int):
        self.message = f'Patch with {radius=} around ({x:.1f}, {y:.1f}) extends beyond the image'


# endregion

# region Preprocessing


class PreprocessError(RetrievalError):
    """Base exception for query conditioning errors"""


class NoPaintingFound(PreprocessError):
    message = 'No painting was found in the image'


class NoLinesFound(PreprocessError):
    message = 'No near-horizontal lines were found in the image'


class BoxOutsideCrop(PreprocessError, ValueError):
    def __init__(self, box: Any, width: int, height: int):
        self.message = f'Box={box} does not fit within a crop with size={width}x{height}'


# endregion

# region Engine


class EngineError(RetrievalError):
    """Base exception for index / query errors"""


class UnreadableImage(EngineError, OSError):
    def __init__(self, path: Path, reason: Any = None):
        self.path = path
        suffix = f' - {reason}' if reason else ''
        self.message = f'Unable to read image: {path.as_posix()}{suffix}'


class CatalogMismatch(EngineError):
    """Raised when a museum image has no catalog row (or the catalog itself is unusable)"""


class MissingDescriptor(EngineError):
    def __init__(self, kind: Any):
        self.message = f'The index does not contain {kind} descriptors'


class NoActiveDescriptor(EngineError, ValueError):
    message = 'At least one descriptor weight must be > 0'


class FewerImagesThanClusters(EngineError, ValueError):
    def __init__(self, count: int, clusters: int):
        self.message = f'Unable to form {clusters} clusters from {count} images'


class CorruptIndex(EngineError):
    """Raised when an index file cannot be decoded"""


class VersionMismatch(EngineError):
    def __init__(self, found: int, expected: int):
        self.message = f'Unsupported index format version={found} (expected {expected})'


class FingerprintMismatch(EngineError):
    def __init__(self, found: str, expected: str):
        self.message = (
            'The index was built with a different descriptor configuration'
            f' (index={found[:12]}, active={expected[:12]})'
        )


# endregion

# region Evaluation


class EvaluationError(RetrievalError):
    """Base exception for the evaluation harness"""


class MalformedResults(EvaluationError, ValueError):
    """Raised when a results or ground truth file does not match the expected schema"""


class EvaluationBelowThreshold(EvaluationError):
    code = 1

    def __init__(self, failed: Collection[tuple[str, float, float]]):
        self.failed = failed
        parts = ', '.join(f'{name}={value:.4f} (threshold={threshold})' for name, value, threshold in failed)
        self.message = f'Evaluation below threshold: {parts}'


# endregion
