"""
Raster containers, color conversion, and image I/O.

All color spaces are stored as 8-bit rasters: L is scaled from [0, 100] to [0, 255], a / b / Cr / Cb are offset by
128, and H is scaled from [0, 360) to [0, 255].

:author: Doug Skrypa
"""

from __future__ import annotations

import logging
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Optional, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from ..exceptions import ImageError, UnreadableImage, UnsupportedConversion
from ..utils import MissingMixin

if TYPE_CHECKING:
    from ..typing import PathLike

__all__ = [
    'ColorSpace',
    'RasterImage',
    'BinaryMask',
    'convert_color',
    'to_gray',
    'read_image',
    'write_image',
    'read_mask',
    'write_mask',
]
log = logging.getLogger(__name__)

_D65 = np.array([0.950456, 1.0, 1.088754])
_RGB_TO_XYZ = np.array(
    [
        [0.412453, 0.357580, 0.180423],
        [0.212671, 0.715160, 0.072169],
        [0.019334, 0.119193, 0.950227],
    ]
)
_XYZ_TO_RGB = np.linalg.inv(_RGB_TO_XYZ)


class ColorSpace(MissingMixin, Enum):
    GRAY = 'gray'
    RGB = 'rgb'
    LAB = 'lab'
    HSV = 'hsv'
    YCRCB = 'ycrcb'

    @property
    def channels(self) -> int:
        return 1 if self is ColorSpace.GRAY else 3


# region Containers


class RasterImage:
    """
    An 8-bit raster with 1 or 3 channels.  The pixel array is exposed read-only; operations always return new images.

    :param pixels: A ``uint8`` array with shape ``(height, width)`` or ``(height, width, 3)``
    :param space: The color space of the samples (default: GRAY for 2D arrays, RGB otherwise)
    :param source: The file this image (or the image it was derived from) was read from
    :param source_index: The position of this image among the paintings found in ``source``
    """

    __slots__ = ('pixels', 'space', 'source', 'source_index')

    def __init__(
        self,
        pixels: np.ndarray,
        space: Union[ColorSpace, str, None] = None,
        source: Optional[Path] = None,
        source_index: int = 0,
    ):
        pixels = np.asarray(pixels)
        if pixels.dtype != np.uint8:
            raise ImageError(f'Invalid pixel dtype={pixels.dtype} - expected uint8')
        if pixels.ndim == 3 and pixels.shape[2] == 1:
            pixels = pixels[:, :, 0]
        if pixels.ndim not in (2, 3) or (pixels.ndim == 3 and pixels.shape[2] != 3):
            raise ImageError(f'Invalid pixel array shape={pixels.shape} - expected (h, w) or (h, w, 3)')
        if pixels.shape[0] < 1 or pixels.shape[1] < 1:
            raise ImageError(f'Invalid pixel array shape={pixels.shape} - width and height must be >= 1')

        space = ColorSpace(space) if space is not None else (ColorSpace.GRAY if pixels.ndim == 2 else ColorSpace.RGB)
        if space.channels != (1 if pixels.ndim == 2 else 3):
            raise ImageError(f'Color space={space.name} is incompatible with pixel array shape={pixels.shape}')

        view = np.ascontiguousarray(pixels).view()
        view.flags.writeable = False
        self.pixels = view
        self.space = space
        self.source = source
        self.source_index = source_index

    @classmethod
    def blank(cls, width: int, height: int, value: int = 0, space: ColorSpace = ColorSpace.GRAY) -> RasterImage:
        shape = (height, width) if space is ColorSpace.GRAY else (height, width, 3)
        return cls(np.full(shape, value, dtype=np.uint8), space)

    def __repr__(self) -> str:
        return f'<{self.__class__.__name__}[{self.space.name}, {self.width}x{self.height}]>'

    def __eq__(self, other: RasterImage) -> bool:
        if not isinstance(other, RasterImage):
            return NotImplemented
        return self.space is other.space and np.array_equal(self.pixels, other.pixels)

    __hash__ = None

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def channels(self) -> int:
        return self.space.channels

    @property
    def samples(self) -> np.ndarray:
        """Row-major samples, interleaved per channel"""
        return self.pixels.reshape(-1)

    def with_pixels(self, pixels: np.ndarray, space: Union[ColorSpace, str, None] = None) -> RasterImage:
        """A new image with the given pixels that keeps this image's source information."""
        if space is None and (pixels.ndim == 2) == (self.pixels.ndim == 2):
            space = self.space
        return self.__class__(pixels, space, self.source, self.source_index)

    def crop(self, x1: int, y1: int, x2: int, y2: int) -> RasterImage:
        return self.with_pixels(self.pixels[y1:y2, x1:x2])

    def channel(self, index: int) -> RasterImage:
        if self.channels == 1:
            return self
        return self.__class__(self.pixels[:, :, index], ColorSpace.GRAY, self.source, self.source_index)


class BinaryMask:
    """One boolean per pixel; ``True`` marks foreground."""

    __slots__ = ('bits',)

    def __init__(self, bits: np.ndarray):
        bits = np.asarray(bits)
        if bits.ndim != 2 or bits.shape[0] < 1 or bits.shape[1] < 1:
            raise ImageError(f'Invalid mask shape={bits.shape} - expected (h, w) with h, w >= 1')
        view = np.ascontiguousarray(bits, dtype=bool).view()
        view.flags.writeable = False
        self.bits = view

    @classmethod
    def full(cls, width: int, height: int) -> BinaryMask:
        return cls(np.ones((height, width), dtype=bool))

    @classmethod
    def empty(cls, width: int, height: int) -> BinaryMask:
        return cls(np.zeros((height, width), dtype=bool))

    def __repr__(self) -> str:
        return f'<{self.__class__.__name__}[{self.width}x{self.height}, count={self.count}]>'

    def __eq__(self, other: BinaryMask) -> bool:
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    __hash__ = None

    def __invert__(self) -> BinaryMask:
        return BinaryMask(~self.bits)

    def __and__(self, other: BinaryMask) -> BinaryMask:
        return BinaryMask(self.bits & other.bits)

    def __or__(self, other: BinaryMask) -> BinaryMask:
        return BinaryMask(self.bits | other.bits)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.bits))

    def crop(self, x1: int, y1: int, x2: int, y2: int) -> BinaryMask:
        return BinaryMask(self.bits[y1:y2, x1:x2])

    def to_image(self) -> RasterImage:
        return RasterImage(np.where(self.bits, 255, 0).astype(np.uint8), ColorSpace.GRAY)


# endregion

# region Color Conversion


def _round_half_up(values: np.ndarray) -> np.ndarray:
    return np.clip(np.floor(values + 0.5), 0, 255).astype(np.uint8)


def to_gray(img: RasterImage) -> RasterImage:
    return convert_color(img, ColorSpace.GRAY)


def convert_color(img: RasterImage, target: Union[ColorSpace, str]) -> RasterImage:
    """
    Convert the given image to the target color space.  RGB is the hub: every supported conversion goes through it,
    and GRAY can only be a conversion target.

    :param img: The image to convert
    :param target: The target color space
    :return: A new image with the same width / height
    """
    target = ColorSpace(target)
    source = img.space
    if source is target:
        return img
    if source is ColorSpace.GRAY:
        raise UnsupportedConversion(source.name, target.name)

    rgb = img.pixels if source is ColorSpace.RGB else _TO_RGB[source](img.pixels)
    if target is ColorSpace.RGB:
        return img.with_pixels(rgb, ColorSpace.RGB)
    return img.with_pixels(_FROM_RGB[target](rgb), target)


def _rgb_to_gray(rgb: np.ndarray) -> np.ndarray:
    r, g, b = (rgb[:, :, i].astype(np.int32) for i in range(3))
    return ((299 * r + 587 * g + 114 * b + 500) // 1000).astype(np.uint8)


def _rgb_to_hsv(rgb: np.ndarray) -> np.ndarray:
    values = rgb.astype(np.float64) / 255
    r, g, b = values[:, :, 0], values[:, :, 1], values[:, :, 2]
    mx = values.max(axis=2)
    mn = values.min(axis=2)
    delta = mx - mn
    safe_delta = np.where(delta > 0, delta, 1)
    hue = np.select(
        [delta == 0, mx == r, mx == g],
        [0.0, ((g - b) / safe_delta) % 6, (b - r) / safe_delta + 2],
        (r - g) / safe_delta + 4,
    )
    hue = (hue * 60) % 360
    sat = np.where(mx > 0, delta / np.where(mx > 0, mx, 1), 0)
    return np.stack([_round_half_up(hue * 255 / 360), _round_half_up(sat * 255), _round_half_up(mx * 255)], axis=2)


def _hsv_to_rgb(hsv: np.ndarray) -> np.ndarray:
    values = hsv.astype(np.float64)
    hue = values[:, :, 0] * 360 / 255 / 60
    sat = values[:, :, 1] / 255
    val = values[:, :, 2] / 255
    chroma = val * sat
    x = chroma * (1 - np.abs(hue % 2 - 1))
    m = val - chroma
    sector = np.floor(hue).astype(np.int64) % 6
    zeros = np.zeros_like(chroma)
    r = np.choose(sector, [chroma, x, zeros, zeros, x, chroma])
    g = np.choose(sector, [x, chroma, chroma, x, zeros, zeros])
    b = np.choose(sector, [zeros, zeros, x, chroma, chroma, x])
    return np.stack([_round_half_up((c + m) * 255) for c in (r, g, b)], axis=2)


def _rgb_to_ycrcb(rgb: np.ndarray) -> np.ndarray:
    values = rgb.astype(np.float64)
    y = 0.299 * values[:, :, 0] + 0.587 * values[:, :, 1] + 0.114 * values[:, :, 2]
    cr = (values[:, :, 0] - y) * 0.713 + 128
    cb = (values[:, :, 2] - y) * 0.564 + 128
    return np.stack([_round_half_up(y), _round_half_up(cr), _round_half_up(cb)], axis=2)


def _ycrcb_to_rgb(ycrcb: np.ndarray) -> np.ndarray:
    values = ycrcb.astype(np.float64)
    y, cr, cb = values[:, :, 0], values[:, :, 1] - 128, values[:, :, 2] - 128
    r = y + 1.403 * cr
    g = y - 0.714 * cr - 0.344 * cb
    b = y + 1.773 * cb
    return np.stack([_round_half_up(c) for c in (r, g, b)], axis=2)


def _lab_f(t: np.ndarray) -> np.ndarray:
    return np.where(t > 0.008856, np.cbrt(t), 7.787 * t + 16 / 116)


def _lab_f_inv(t: np.ndarray) -> np.ndarray:
    return np.where(t > 0.206893, t**3, (t - 16 / 116) / 7.787)


def _rgb_to_lab(rgb: np.ndarray) -> np.ndarray:
    values = rgb.astype(np.float64) / 255
    linear = np.where(values > 0.04045, ((values + 0.055) / 1.055) ** 2.4, values / 12.92)
    xyz = linear @ _RGB_TO_XYZ.T / _D65
    fx, fy, fz = (_lab_f(xyz[:, :, i]) for i in range(3))
    lightness = 116 * fy - 16
    a = 500 * (fx - fy) + 128
    b = 200 * (fy - fz) + 128
    return np.stack([_round_half_up(lightness * 255 / 100), _round_half_up(a), _round_half_up(b)], axis=2)


def _lab_to_rgb(lab: np.ndarray) -> np.ndarray:
    values = lab.astype(np.float64)
    fy = (values[:, :, 0] * 100 / 255 + 16) / 116
    fx = fy + (values[:, :, 1] - 128) / 500
    fz = fy - (values[:, :, 2] - 128) / 200
    xyz = np.stack([_lab_f_inv(fx), _lab_f_inv(fy), _lab_f_inv(fz)], axis=2) * _D65
    linear = np.clip(xyz @ _XYZ_TO_RGB.T, 0, 1)
    srgb = np.where(linear > 0.0031308, 1.055 * linear ** (1 / 2.4) - 0.055, linear * 12.92)
    return _round_half_up(srgb * 255)


_FROM_RGB = {
    ColorSpace.GRAY: _rgb_to_gray,
    ColorSpace.HSV: _rgb_to_hsv,
    ColorSpace.YCRCB: _rgb_to_ycrcb,
    ColorSpace.LAB: _rgb_to_lab,
}
_TO_RGB = {ColorSpace.HSV: _hsv_to_rgb, ColorSpace.YCRCB: _ycrcb_to_rgb, ColorSpace.LAB: _lab_to_rgb}

# endregion

# region I/O


def read_image(path: PathLike) -> RasterImage:
    """Read a PNG / JPEG file as an RGB image (or GRAY, if the file is single-channel)."""
    path = Path(path)
    try:
        with Image.open(path) as image:
            if image.mode in ('L', 'I;16', '1'):
                pixels = np.asarray(image.convert('L'), dtype=np.uint8)
            else:
                pixels = np.asarray(image.convert('RGB'), dtype=np.uint8)
    except (OSError, UnidentifiedImageError, ValueError) as e:
        raise UnreadableImage(path, e) from e
    log.debug(f'Read {path.name} with shape={pixels.shape}')
    return RasterImage(pixels, source=path)


def write_image(img: RasterImage, path: PathLike):
    """Write a GRAY or RGB image; other color spaces are converted to RGB first."""
    if img.space not in (ColorSpace.GRAY, ColorSpace.RGB):
        img = convert_color(img, ColorSpace.RGB)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.ascontiguousarray(img.pixels)).save(path)


def read_mask(path: PathLike) -> BinaryMask:
    path = Path(path)
    try:
        with Image.open(path) as image:
            pixels = np.asarray(image.convert('L'), dtype=np.uint8)
    except (OSError, UnidentifiedImageError, ValueError) as e:
        raise UnreadableImage(path, e) from e
    return BinaryMask(pixels > 127)


def write_mask(mask: BinaryMask, path: PathLike):
    write_image(mask.to_image(), Path(path).with_suffix('.png') if Path(path).suffix != '.png' else path)


# endregion
