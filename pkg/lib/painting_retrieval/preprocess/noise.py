"""
Noise gate: median filter an image only when doing so changes it enough to indicate impulse noise.

:author: Doug Skrypa
"""

from __future__ import annotations

import logging
from typing import NamedTuple

from ..imgproc.filters import median_filter
from ..imgproc.raster import RasterImage
from ..metrics import psnr

__all__ = ['NoiseCheck', 'detect_and_denoise']
log = logging.getLogger(__name__)


class NoiseCheck(NamedTuple):
    image: RasterImage
    noisy: bool
    psnr: float


def detect_and_denoise(img: RasterImage, threshold: float = 30.0, radius: int = 1) -> NoiseCheck:
    """
    Compare the image with its median filtered copy.  A low PSNR means the filter removed a lot, so the image is
    considered noisy and the filtered copy is returned; otherwise the original image is returned unchanged.

    :param img: The image to check
    :param threshold: Images whose PSNR against the filtered copy is below this many dB are noisy
    :param radius: The median filter radius
    :return: Tuple of (image to use, whether the image was noisy, PSNR in dB)
    """
    filtered = median_filter(img, radius)
    value = psnr(img, filtered)
    noisy = value < threshold
    log.debug(f'Noise check for {img}: psnr={value:.2f} dB, {noisy=}')
    return NoiseCheck(filtered if noisy else img, noisy, value)
