"""
The query preprocessing pipeline: rotation estimation and correction, noise removal, background removal, and text box
removal, each of which can be disabled in the config.

:author: Doug Skrypa
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Optional

import numpy as np

from ..exceptions import NoLinesFound, NoPaintingFound
from ..imgproc.filters import median_filter
from ..imgproc.geometry import derotate, rotate_mask, rotate_points
from ..imgproc.raster import BinaryMask, RasterImage
from ..metrics import Box
from .background import BackgroundParams, has_wall, remove_background
from .base import PaintingCrop, PreprocessReport, wall_color
from .noise import detect_and_denoise
from .rotation import RotationParams, estimate_rotation
from .textbox import TextBoxParams, detect_textbox, erase_textbox

if TYPE_CHECKING:
    from ..config import RunConfig

__all__ = ['preprocess_pipeline']
log = logging.getLogger(__name__)


def preprocess_pipeline(img: RasterImage, config: RunConfig) -> tuple[list[PaintingCrop], PreprocessReport]:
    """
    Prepare a query image for retrieval.

    The rotation is estimated on the noise-gated copy of the image.  Paintings that fill the whole frame (no wall is
    visible around them) are never derotated.

    :param img: A query image
    :param config: Stage toggles and settings
    :return: Tuple of (one crop per painting ordered left to right, report)
    """
    report = PreprocessReport()
    analysis = img
    if config.denoise:
        analysis, report.noisy, report.psnr = detect_and_denoise(img, config.noise_threshold, config.median_radius)

    background_params = BackgroundParams.from_config(config)
    if config.rotation and has_wall(analysis, background_params):
        report.angle = _estimate_angle(analysis, config)

    if report.angle:
        fill = wall_color(img)
        working = derotate(img, report.angle, fill[0] if len(fill) == 1 else fill)
        if report.noisy:
            working = median_filter(working, config.median_radius)
    else:
        working = analysis

    if config.background:
        try:
            crops = remove_background(working, background_params)
        except NoPaintingFound:
            log.warning(f'No painting was found in {_name(img)}')
            crops = []
    else:
        crops = [PaintingCrop.full(working)]

    if config.textbox:
        crops = [_erase_text(crop, TextBoxParams.from_config(config)) for crop in crops]
    if report.angle:
        crops = [crop.replace(rotation=report.angle) for crop in crops]

    report.painting_count = len(crops)
    report.mask, report.text_boxes = _source_geometry(img, working, crops, report.angle)
    log.debug(f'Preprocessed {_name(img)}: {report.as_dict()}')
    return crops, report


def _name(img: RasterImage) -> str:
    return img.source.name if img.source else repr(img)


def _estimate_angle(img: RasterImage, config: RunConfig) -> float:
    try:
        angle = estimate_rotation(img, config.rotation_method, RotationParams.from_config(config))
    except (NoLinesFound, NoPaintingFound) as e:
        log.debug(f'Unable to estimate rotation for {_name(img)}: {e}')
        return 0.0
    return angle if abs(angle) >= config.min_rotation else 0.0


def _erase_text(crop: PaintingCrop, params: TextBoxParams) -> PaintingCrop:
    if candidate := detect_textbox(crop.image, params):
        return erase_textbox(crop, candidate.box)
    return crop


def _source_geometry(
    img: RasterImage, working: RasterImage, crops: list[PaintingCrop], angle: float
) -> tuple[BinaryMask, list[Box]]:
    """Map the painting masks and text boxes found in the working image back onto the original image."""
    bits = np.zeros((working.height, working.width), dtype=bool)
    boxes = []
    for crop in crops:
        x, y = crop.origin
        # The erased text box is part of the painting
        painting = crop.mask.bits.copy()
        if box := crop.text_box:
            painting[box.y1 : box.y2, box.x1 : box.x2] = True
            boxes.append(box.shifted(x, y))
        bits[y : y + crop.image.height, x : x + crop.image.width] |= painting

    mask = BinaryMask(bits)
    if not angle:
        return mask, boxes

    src_size = (working.width, working.height)
    out_size = (img.width, img.height)
    mask = rotate_mask(mask, angle, out_size)
    return mask, [b for b in (_rotate_box(box, angle, src_size, out_size) for box in boxes) if b is not None]


def _rotate_box(box: Box, angle: float, src_size: tuple[int, int], out_size: tuple[int, int]) -> Optional[Box]:
    corners = [(box.x1, box.y1), (box.x2 - 1, box.y1), (box.x2 - 1, box.y2 - 1), (box.x1, box.y2 - 1)]
    points = rotate_points(np.array(corners), angle, src_size, out_size)
    x1, y1 = np.floor(points.min(axis=0) + 0.5).astype(int)
    x2, y2 = np.floor(points.max(axis=0) + 0.5).astype(int) + 1
    x1, y1 = max(int(x1), 0), max(int(y1), 0)
    x2, y2 = min(int(x2), out_size[0]), min(int(y2), out_size[1])
    if x1 >= x2 or y1 >= y2:
        return None
    return Box(x1, y1, x2, y2)

