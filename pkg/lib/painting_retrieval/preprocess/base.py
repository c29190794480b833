"""
Containers shared by the query preprocessing stages.

:author: Doug Skrypa
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from ..exceptions import InvalidArgument
from ..imgproc.raster import BinaryMask, RasterImage
from ..metrics import Box

__all__ = ['PaintingCrop', 'PreprocessReport', 'border_ring', 'wall_color']


@dataclass(frozen=True)
class PaintingCrop:
    """
    :param image: The axis-aligned crop around one painting
    :param mask: Pixels of the crop that should be described (the painting, minus any erased text box)
    :param origin: The ``(x, y)`` position of the crop within the (possibly derotated) query image
    :param rotation: The rotation (in degrees) that was undone before the painting was cropped
    :param text_box: The erased text box, in crop coordinates
    """

    image: RasterImage
    mask: BinaryMask
    origin: tuple[int, int] = (0, 0)
    rotation: float = 0.0
    text_box: Optional[Box] = None

    def __post_init__(self):
        if (self.mask.width, self.mask.height) != (self.image.width, self.image.height):
            raise InvalidArgument(f'Mask size={self.mask.width}x{self.mask.height} does not match {self.image}')

    @classmethod
    def full(cls, image: RasterImage) -> PaintingCrop:
        return cls(image, BinaryMask.full(image.width, image.height))

    @property
    def box(self) -> Box:
        """This crop's bounding box within the (possibly derotated) query image"""
        x, y = self.origin
        return Box(x, y, x + self.image.width, y + self.image.height)

    def replace(self, **kwargs) -> PaintingCrop:
        return replace(self, **kwargs)


@dataclass
class PreprocessReport:
    """
    What the preprocessing pipeline found in one query image.  The mask and boxes are in the coordinates of the
    original image, so they can be compared with ground truth directly.
    """

    noisy: bool = False
    psnr: float = float('inf')
    angle: float = 0.0
    painting_count: int = 0
    mask: Optional[BinaryMask] = None
    text_boxes: list[Box] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            'noisy': self.noisy,
            'psnr': None if self.psnr == float('inf') else round(self.psnr, 4),
            'angle': round(self.angle, 4),
            'paintings': self.painting_count,
            'text_boxes': [list(box) for box in self.text_boxes],
        }


def border_ring(img: RasterImage) -> np.ndarray:
    """The outermost ring of pixels, with shape ``(n, channels)``"""
    pixels = img.pixels if img.pixels.ndim == 3 else img.pixels[:, :, None]
    if img.height < 3 or img.width < 3:
        return pixels.reshape(-1, pixels.shape[2])
    parts = (pixels[0], pixels[-1], pixels[1:-1, 0], pixels[1:-1, -1])
    return np.concatenate(parts, axis=0)


def wall_color(img: RasterImage) -> tuple[int, ...]:
    """The per-channel median of the border ring (rounded half up)"""
    medians = np.median(border_ring(img).astype(np.float64), axis=0)
    return tuple(int(v) for v in np.floor(medians + 0.5))
