"""
Run configuration: every tunable threshold, size, bin count, weight, and pipeline toggle.

Settings are grouped into sections that map onto the tables of a TOML config file::

    seed = 3

    [preprocess]
    noise_threshold = 28.5
    rotation_method = 'rect'

    [descriptors]
    block_bins = 16

:author: Doug Skrypa
"""

from __future__ import annotations

import json
import sys
from collections import ChainMap
from enum import Enum
from functools import partial
from hashlib import sha256
from pathlib import Path
from typing import TYPE_CHECKING, Any, Callable, Generic, Optional, Type, TypeVar, Union, overload

from .descriptors.base import DescriptorKind
from .exceptions import InvalidConfig
from .features.keypoints import FeatureChannel
from .imgproc.raster import ColorSpace
from .metrics import Metric
from .preprocess.rotation import RotationMethod
from .utils import MissingMixin, bounded_float, bounded_int, enum_list, odd_int, str_to_bool

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

if TYPE_CHECKING:
    from .typing import PathLike

__all__ = ['RunConfig', 'ConfigItem', 'QueryMode', 'Profile', 'DEFAULT_CONFIG']

CV = TypeVar('CV')
DV = TypeVar('DV')
ConfigValue = Union[CV, DV]

#: Sections whose settings change the contents of a stored index
FINGERPRINT_SECTIONS = ('descriptors', 'features')


# region Config Option Enums


class QueryMode(MissingMixin, Enum):
    """How query crops are ranked against the museum index."""

    COLOR = 'color'
    TEXTURE = 'texture'
    TEXT = 'text'
    COMBINED = 'combined'
    FEATURE = 'feature'


class Profile(MissingMixin, Enum):
    """Synthetic dataset profiles, from clean single paintings to rotated scenes with unknown paintings."""

    DS1 = 'ds1'  #: One clean painting per query
    DS2 = 'ds2'  #: Up to two paintings with semi-transparent text boxes
    DS3 = 'ds3'  #: DS2 plus salt-and-pepper noise and hue shifts on a random subset
    DS4 = 'ds4'  #: DS3 plus rotations and paintings that are not in the museum


# endregion

# region Validators


def _non_negative_floats(count: int) -> Callable[[Any], tuple[float, ...]]:
    to_float = bounded_float(0)

    def _floats(values: Any) -> tuple[float, ...]:
        values = tuple(to_float(v) for v in values)
        if len(values) != count:
            raise ValueError(f'Invalid {values=} - expected exactly {count} numbers')
        return values

    return _floats


def _grid_levels(values: Any) -> tuple[int, ...]:
    to_int = bounded_int(1, 64)
    levels = tuple(to_int(v) for v in values)
    if not levels:
        raise ValueError('At least one grid level is required')
    return levels


# endregion


class ConfigItem(Generic[CV, DV]):
    """
    A single configurable setting in the :class:`RunConfig`.

    :param default: Default config value to use if no explicit value is provided
    :param type: A class or other callable that will be called to validate/normalize provided values
    :param section: The config file table that this setting belongs to (``None`` for top-level keys)
    """

    __slots__ = ('default', 'type', 'section', 'name')

    def __init__(self, default: DV, type: Callable[..., CV] = None, section: Optional[str] = None):  # noqa
        self.default = default
        self.type = type
        self.section = section

    def __set_name__(self, owner: Type[RunConfig], name: str):
        self.name = name
        owner.FIELDS[name] = self

    @overload
    def __get__(self, instance: None, owner: Type[RunConfig]) -> ConfigItem[CV, DV]: ...

    @overload
    def __get__(self, instance: RunConfig, owner: Type[RunConfig]) -> ConfigValue: ...

    def __get__(self, instance, owner):
        try:
            return instance._data.get(self.name, self.default)
        except AttributeError:  # instance is None
            return self

    def __set__(self, instance: RunConfig, value: ConfigValue):
        if instance._read_only:
            raise AttributeError(f'Unable to set attribute {self.name}={value!r} because {instance} is read-only')
        elif self.type is not None:
            try:
                value = self.type(value)
            except (TypeError, ValueError) as e:
                raise InvalidConfig(self.name, str(e)) from e
        instance._data[self.name] = value

    def __delete__(self, instance: RunConfig):
        if instance._read_only:
            raise AttributeError(f'Unable to delete attribute {self.name} because {instance} is read-only')
        try:
            del instance._data[self.name]
        except KeyError as e:
            raise AttributeError(f'No {self.name!r} config was stored for {instance}') from e

    def __repr__(self) -> str:
        return f'<{self.__class__.__name__}({self.default!r}, type={self.type!r}, section={self.section!r})>'


_imgproc = partial(ConfigItem, section='imgproc')
_preprocess = partial(ConfigItem, section='preprocess')
_descriptors = partial(ConfigItem, section='descriptors')
_features = partial(ConfigItem, section='features')
_matching = partial(ConfigItem, section='matching')
_engine = partial(ConfigItem, section='engine')


class RunConfig:
    """Configuration for indexing, querying, clustering, and synthetic dataset generation."""

    __slots__ = ('_data', '_read_only')
    _data: ChainMap
    _read_only: bool
    FIELDS: dict[str, ConfigItem] = {}

    #: Seed for K-means initialization and the synthetic dataset generator
    seed: int = ConfigItem(0, bounded_int(0))

    #: Number of images to process in parallel
    jobs: int = ConfigItem(1, bounded_int(1))

    # region Image Processing

    #: Canny hysteresis thresholds, in Sobel gradient magnitude units
    canny_low: float = _imgproc(30.0, bounded_float(0))
    canny_high: float = _imgproc(80.0, bounded_float(0))

    # endregion

    # region Preprocessing Toggles

    #: Whether query images should be derotated
    rotation: bool = _preprocess(True, str_to_bool)
    #: Whether noisy query images should be median filtered
    denoise: bool = _preprocess(True, str_to_bool)
    #: Whether paintings should be separated from the wall
    background: bool = _preprocess(True, str_to_bool)
    #: Whether text boxes should be detected and excluded from descriptors
    textbox: bool = _preprocess(True, str_to_bool)

    # endregion

    # region Background Removal

    #: Side of the square closing element applied to Canny edges
    close_size: int = _preprocess(15, odd_int)
    #: Contours enclosing less than this fraction of the image are discarded
    min_area_fraction: float = _preprocess(0.02, bounded_float(0, 1))
    #: The maximum number of paintings kept per image
    max_paintings: int = _preprocess(3, bounded_int(1, 3))
    #: Max difference from the border median for a border pixel to count as wall
    wall_tolerance: int = _preprocess(12, bounded_int(0, 255))
    #: Min fraction of wall-like border pixels for the border to be treated as wall
    flat_ring_fraction: float = _preprocess(0.5, bounded_float(0, 1))

    # endregion

    # region Noise

    #: Images whose PSNR against their median filtered copy is below this many dB are considered noisy
    noise_threshold: float = _preprocess(30.0, bounded_float(0))
    median_radius: int = _preprocess(1, bounded_int(1, 5))

    # endregion

    # region Rotation

    rotation_method: RotationMethod = _preprocess(RotationMethod.HOUGH, RotationMethod)
    #: Estimated angles with a smaller magnitude (in degrees) are treated as 0
    min_rotation: float = _preprocess(0.5, bounded_float(0, 45))
    #: Hough accumulator resolution (theta in degrees)
    hough_theta_step: float = _preprocess(0.5, bounded_float(0, 10, False))
    hough_rho_step: float = _preprocess(1.0, bounded_float(0, None, False))
    #: Min votes for a Hough line, as a fraction of the shorter image side
    hough_vote_fraction: float = _preprocess(0.15, bounded_float(0, 1, False))
    #: The number of strongest near-horizontal lines that are averaged
    hough_max_lines: int = _preprocess(10, bounded_int(1))
    #: Lines further than this many median absolute deviations from the median angle are outliers
    hough_outlier_mads: float = _preprocess(2.5, bounded_float(0, None, False))

    # endregion

    # region Text Boxes

    #: Side of the square top-hat / black-hat element, as a fraction of the shorter crop side
    textbox_hat_fraction: float = _preprocess(0.3, bounded_float(0, 1, False))
    textbox_close_width: int = _preprocess(25, odd_int)
    textbox_close_height: int = _preprocess(5, odd_int)
    #: Candidates enclosing less than this fraction of the crop are ignored
    textbox_min_area_fraction: float = _preprocess(0.01, bounded_float(0, 1))
    #: Weights for the centering, height, symmetry, edge position, and aspect ratio indicators
    textbox_weights: tuple[float, ...] = _preprocess((1.0, 1.0, 1.0, 1.0, 1.0), _non_negative_floats(5))
    #: No box is reported unless the best candidate scores below this value
    textbox_ceiling: float = _preprocess(0.5, bounded_float(0))
    #: Min contrast of the straight edges that a candidate is grown to
    textbox_edge_strength: float = _preprocess(10.0, bounded_float(0))
    #: Left and right box edges are not searched within this fraction of the width from the crop's sides
    textbox_edge_margin: float = _preprocess(0.08, bounded_float(0, 0.5))

    # endregion

    # region Descriptors

    gray_bins: int = _descriptors(64, bounded_int(2, 256))
    hist3d_space: ColorSpace = _descriptors(ColorSpace.RGB, ColorSpace)
    hist3d_bins: int = _descriptors(8, bounded_int(2, 32))
    block_grid: int = _descriptors(16, bounded_int(1, 64))
    #: Color space for per-tile histograms; GRAY tiles use ``block_bins`` bins, others use ``block_bins`` per channel
    block_space: ColorSpace = _descriptors(ColorSpace.GRAY, ColorSpace)
    block_bins: int = _descriptors(32, bounded_int(2, 256))
    multires_levels: tuple[int, ...] = _descriptors((1, 4, 8, 16), _grid_levels)
    lbp_grid: int = _descriptors(4, bounded_int(1, 64))
    dct_keep: int = _descriptors(10, bounded_int(1, 64))
    hog_cell: int = _descriptors(8, bounded_int(2))
    hog_block: int = _descriptors(2, bounded_int(1))
    hog_bins: int = _descriptors(9, bounded_int(2, 36))
    #: Texture descriptors are computed on a square resize of each crop with this side length
    analysis_size: int = _descriptors(256, bounded_int(16, 1024))
    #: The descriptor used for color queries and the color share of combined queries
    color_descriptor: DescriptorKind = _descriptors(DescriptorKind.BLOCK, DescriptorKind)
    #: The descriptor used for texture queries and the texture share of combined queries
    texture_descriptor: DescriptorKind = _descriptors(DescriptorKind.HOG, DescriptorKind)
    #: Additional descriptors stored in the index
    extra_descriptors: tuple[DescriptorKind, ...] = _descriptors((), enum_list(DescriptorKind))
    color_metric: Metric = _descriptors(Metric.HELLINGER, Metric)
    texture_metric: Metric = _descriptors(Metric.CORRELATION, Metric)

    # endregion

    # region Keypoint Features

    fast_threshold: int = _features(20, bounded_int(1, 255))
    max_keypoints: int = _features(500, bounded_int(1))
    pyramid_levels: int = _features(3, bounded_int(1, 3))
    #: The plane keypoints are found on; VALUE is unaffected by hue shifts
    feature_channel: FeatureChannel = _features(FeatureChannel.VALUE, FeatureChannel)

    # endregion

    # region Keypoint Matching

    #: Max Hamming distance between matched descriptors
    max_distance: int = _matching(64, bounded_int(0, 256))
    #: Whether the best / second-best ratio test is applied (disable to match on the distance cutoff only)
    ratio_test: bool = _matching(True, str_to_bool)
    ratio: float = _matching(0.8, bounded_float(0, 1, False))
    #: Images with at least this many matches are considered the same painting
    min_matches: int = _matching(4, bounded_int(1))

    # endregion

    # region Engine

    weight_color: float = _engine(0.3, bounded_float(0))
    weight_texture: float = _engine(0.5, bounded_float(0))
    weight_text: float = _engine(0.2, bounded_float(0))
    #: Whether unreadable museum images are skipped with a warning instead of aborting the build
    skip_unreadable: bool = _engine(True, str_to_bool)
    k_bright: int = _engine(2, bounded_int(1))
    k_texture: int = _engine(5, bounded_int(1))
    kmeans_max_iter: int = _engine(100, bounded_int(1))

    # endregion

    def __init__(self, parent: Optional[RunConfig] = None, read_only: bool = False, **kwargs):
        self._data = parent._data.new_child() if parent else ChainMap()
        self._read_only = read_only
        if kwargs:
            if bad := set(kwargs).difference(self.FIELDS):
                raise InvalidConfig(None, f'unsupported options: {", ".join(sorted(bad))}')
            for key, val in kwargs.items():
                setattr(self, key, val)

    @classmethod
    def load(cls, path: PathLike, **overrides) -> RunConfig:
        """
        Load settings from a TOML file.  Top-level keys must be top-level settings, and keys in each table must belong
        to the section with the same name.

        :param path: Path to a TOML config file
        :param overrides: Settings that take precedence over the file's values
        :return: A new RunConfig
        """
        path = Path(path)
        try:
            with path.open('rb') as f:
                raw = tomllib.load(f)
        except tomllib.TOMLDecodeError as e:
            raise InvalidConfig(None, f'unable to parse {path.name}: {e}') from e

        settings = {}
        for key, value in raw.items():
            if isinstance(value, dict):
                for sub_key, sub_value in value.items():
                    settings[cls._validate_key(sub_key, key)] = sub_value
            else:
                settings[cls._validate_key(key, None)] = value

        settings.update(overrides)
        return cls(**settings)

    @classmethod
    def _validate_key(cls, key: str, section: Optional[str]) -> str:
        try:
            item = cls.FIELDS[key]
        except KeyError:
            raise InvalidConfig(f'{section}.{key}' if section else key, 'unknown key') from None
        if item.section != section:
            expected = f'[{item.section}]' if item.section else 'the top level'
            raise InvalidConfig(f'{section}.{key}' if section else key, f'expected in {expected}')
        return key

    def __repr__(self) -> str:
        settings = ', '.join(f'{k}={v!r}' for k, v in self.as_dict(False).items())
        return f'<{self.__class__.__name__}[depth={len(self._data.maps)}]({settings})>'

    def copy(self, **kwargs) -> RunConfig:
        return self.__class__(self, **kwargs)

    def as_dict(self, full: bool = True) -> dict[str, Any]:
        """Return a dict representing the configured options."""
        if full:
            return {key: getattr(self, key) for key in self.FIELDS}
        return {key: val for key, val in self._data.items() if key in self.FIELDS}

    def fingerprint(self) -> str:
        """SHA-256 hex digest of the settings that affect stored descriptors and keypoint features."""
        settings = {
            key: _plain(getattr(self, key))
            for key, item in self.FIELDS.items()
            if item.section in FINGERPRINT_SECTIONS
        }
        return sha256(json.dumps(settings, sort_keys=True, separators=(',', ':')).encode('utf-8')).hexdigest()


def _plain(value: Any) -> Any:
    if isinstance(value, Enum):
        return value.value
    elif isinstance(value, (tuple, list)):
        return [_plain(v) for v in value]
    return value


DEFAULT_CONFIG: RunConfig = RunConfig(read_only=True)
