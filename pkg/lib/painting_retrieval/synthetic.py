"""
Synthetic museum and query datasets with full ground truth.

Museum images are textured "paintings" with a frame.  Query scenes hang one or two of them (scaled slightly) on a
flat wall, and depending on the profile add semi-transparent text boxes, impulse noise and hue shifts, rotations, and
paintings that are not in the museum.

Output layout::

    museum/bbdd_<label>.png, museum/catalog.tsv
    queries/<nnnnn>.png                 the query scene
    queries/<nnnnn>.ocr.txt             the text in each painting's box, one line per painting (left to right)
    queries/<nnnnn>.mask.png            painting pixels
    queries/<nnnnn>.boxes.txt           ``x1 y1 x2 y2`` per text box
    queries/<nnnnn>.angle.txt           the scene rotation in degrees
    ground_truth.json

:author: Doug Skrypa
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from functools import cached_property
from math import cos, pi, sin
from pathlib import Path
from typing import TYPE_CHECKING, NamedTuple, Optional, Sequence, Union

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from .config import Profile
from .descriptors.text import CatalogEntry
from .imgproc.filters import resize_bilinear
from .imgproc.geometry import rotate, rotate_mask, rotate_points, rotated_size
from .imgproc.raster import BinaryMask, ColorSpace, RasterImage, convert_color, write_image, write_mask
from .metrics import UNKNOWN_LABEL, Box

if TYPE_CHECKING:
    from .typing import PathLike

__all__ = [
    'MuseumPainting',
    'Scene',
    'SyntheticDataset',
    'DatasetGenerator',
    'make_painting',
    'make_scene',
    'add_text_box',
    'salt_and_pepper',
    'shift_hue',
    'rotate_scene',
    'GROUND_TRUTH_NAME',
]
log = logging.getLogger(__name__)

GROUND_TRUTH_NAME = 'ground_truth.json'
MUSEUM_DIR = 'museum'
QUERY_DIR = 'queries'
FRAME_WIDTH = 5
TEXT_ALPHA = 0.7

AUTHORS = (
    'Goya', 'Sorolla', 'Miro', 'Dali', 'Tapies', 'Casas', 'Rusinol', 'Zurbaran', 'Murillo', 'Greco', 'Ribera',
    'Fortuny', 'Nonell', 'Gris', 'Picasso', 'Regoyos',
)  # fmt: skip
UNKNOWN_AUTHORS = ('Vermeer', 'Hals', 'Bosch', 'Bruegel', 'Klimt', 'Munch')
_ADJECTIVES = ('Quiet', 'Red', 'Distant', 'Broken', 'Golden', 'Northern', 'Pale', 'Hidden')
_NOUNS = ('Harbor', 'Garden', 'Orchard', 'Window', 'Portrait', 'Field', 'Storm', 'Market')


class MuseumPainting(NamedTuple):
    entry: CatalogEntry
    image: RasterImage


@dataclass
class Scene:
    """
    :param image: The query image
    :param mask: Painting pixels in ``image``
    :param labels: The museum label of each painting, left to right (``-1`` for paintings not in the museum)
    :param texts: The text written in each painting's box ('' for paintings without a box)
    :param boxes: Text boxes in ``image`` coordinates
    :param angle: The counterclockwise rotation applied to the scene, in degrees
    :param corrupted: Whether noise and a hue shift were applied
    """

    image: RasterImage
    mask: BinaryMask
    labels: list[int] = field(default_factory=list)
    texts: list[str] = field(default_factory=list)
    boxes: list[Box] = field(default_factory=list)
    angle: float = 0.0
    corrupted: bool = False


class SyntheticDataset(NamedTuple):
    root: Path
    museum_dir: Path
    query_dir: Path
    ground_truth: Path
    museum_size: int
    query_count: int


# region Paintings


def _color(rng: np.random.Generator, low: int = 0, high: int = 256) -> tuple[int, int, int]:
    return tuple(int(v) for v in rng.integers(low, high, 3))


def make_painting(rng: np.random.Generator, width: int, height: int) -> RasterImage:
    """
    A framed painting: a two-color gradient with a sinusoidal texture, covered by random rectangles, ellipses, and
    polygons.
    """
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    xx /= width
    yy /= height
    direction = rng.uniform(0, 2 * pi)
    ramp = xx * cos(direction) + yy * sin(direction)
    ramp = (ramp - ramp.min()) / max(np.ptp(ramp), 1e-9)
    start, end = np.array(_color(rng), dtype=np.float64), np.array(_color(rng), dtype=np.float64)
    pixels = start * (1 - ramp[..., None]) + end * ramp[..., None]

    stripe = rng.uniform(0, pi)
    frequency = rng.uniform(4, 20)
    amplitude = rng.uniform(10, 35)
    wave = np.sin(2 * pi * frequency * (xx * cos(stripe) + yy * sin(stripe)) + rng.uniform(0, 2 * pi))
    pixels += amplitude * wave[..., None]

    image = Image.fromarray(np.clip(np.floor(pixels + 0.5), 0, 255).astype(np.uint8))
    draw = ImageDraw.Draw(image)
    for _ in range(int(rng.integers(4, 9))):
        kind = int(rng.integers(3))
        if kind == 2:
            points = [(float(rng.uniform(0, width)), float(rng.uniform(0, height))) for _ in range(rng.integers(3, 6))]
            draw.polygon(points, fill=_color(rng))
            continue
        x1, x2 = sorted(rng.uniform(0, width, 2))
        y1, y2 = sorted(rng.uniform(0, height, 2))
        shape = draw.rectangle if kind == 0 else draw.ellipse
        shape([float(x1), float(y1), float(x2) + 1, float(y2) + 1], fill=_color(rng))

    draw.rectangle([0, 0, width - 1, height - 1], outline=_color(rng, 15, 70), width=FRAME_WIDTH)
    return RasterImage(np.asarray(image, dtype=np.uint8))


def _catalog_entry(rng: np.random.Generator, label: int) -> CatalogEntry:
    author = AUTHORS[int(rng.integers(len(AUTHORS)))]
    title = f'{_ADJECTIVES[int(rng.integers(len(_ADJECTIVES)))]} {_NOUNS[int(rng.integers(len(_NOUNS)))]}'
    return CatalogEntry(label, author, title)


# endregion

# region Corruption


def salt_and_pepper(img: RasterImage, fraction: float, rng: np.random.Generator) -> RasterImage:
    """Set a random ``fraction`` of pixels (all channels) to 0 or 255 with equal probability."""
    hit = rng.random((img.height, img.width)) < fraction
    salt = rng.random((img.height, img.width)) < 0.5
    pixels = img.pixels.copy()
    pixels[hit & salt] = 255
    pixels[hit & ~salt] = 0
    return img.with_pixels(pixels)


def shift_hue(img: RasterImage, shift: int) -> RasterImage:
    """Rotate the hue of an RGB image by ``shift`` 8-bit hue steps."""
    hsv = convert_color(img, ColorSpace.HSV)
    pixels = hsv.pixels.copy()
    pixels[..., 0] = (pixels[..., 0].astype(np.int64) + shift) % 256
    return convert_color(hsv.with_pixels(pixels, ColorSpace.HSV), ColorSpace.RGB)


# endregion

# region Text Boxes


def _glyphs(text: str, width: int, height: int) -> np.ndarray:
    """The text rendered with the default font, scaled up by an integer factor, centered in a ``width x height`` area"""
    out = np.zeros((height, width), dtype=bool)
    if not text.strip():
        return out
    font = ImageFont.load_default()
    bbox = ImageDraw.Draw(Image.new('L', (1, 1))).textbbox((0, 0), text, font=font)
    left, top, right, bottom = (int(round(v)) for v in bbox)
    canvas = Image.new('L', (right - left + 2, bottom - top + 2), 0)
    ImageDraw.Draw(canvas).text((1 - left, 1 - top), text, fill=255, font=font)
    # Scaled at least 2x so strokes are 2+ px wide
    scale = max(2, min(int(height * 0.6) // canvas.height, int(width * 0.9) // canvas.width))
    scaled = canvas.resize((canvas.width * scale, canvas.height * scale), Image.Resampling.NEAREST)
    letters = np.asarray(scaled) > 127
    gw, gh = min(letters.shape[1], width), min(letters.shape[0], height)
    x, y = (width - gw) // 2, (height - gh) // 2
    out[y : y + gh, x : x + gw] = letters[:gh, :gw]
    return out


def add_text_box(painting: RasterImage, text: str, rng: np.random.Generator) -> tuple[RasterImage, Box]:
    """
    Superimpose a semi-transparent box containing the given text on a painting.  The box is horizontally centered,
    covers 55% to 75% of the painting's width, has a 4:1 aspect ratio, and is centered at 1/5 or 4/5 of the height.

    :return: Tuple of (painting with the box, box in painting coordinates)
    """
    w, h = painting.width, painting.height
    box_w = int(round(rng.uniform(0.55, 0.75) * w))
    box_h = max(8, int(round(box_w / 4)))
    cy = h / 5 if rng.random() < 0.5 else 4 * h / 5
    x1 = (w - box_w) // 2
    y1 = min(max(int(round(cy - box_h / 2)), FRAME_WIDTH + 1), h - FRAME_WIDTH - 1 - box_h)
    box = Box(x1, y1, x1 + box_w, y1 + box_h)

    bright = rng.random() < 0.5
    fill, ink = (245, 20) if bright else (20, 245)
    pixels = painting.pixels.astype(np.float64)
    region = pixels[box.y1 : box.y2, box.x1 : box.x2]
    region[:] = TEXT_ALPHA * fill + (1 - TEXT_ALPHA) * region
    region[_glyphs(text, box_w, box_h)] = ink
    return painting.with_pixels(np.clip(np.floor(pixels + 0.5), 0, 255).astype(np.uint8)), box


# endregion

# region Scenes


def _wall(rng: np.random.Generator, width: int, height: int) -> tuple[np.ndarray, tuple[int, int, int]]:
    base = int(rng.integers(165, 225))
    color = tuple(int(np.clip(base + v, 0, 255)) for v in rng.integers(-10, 11, 3))
    jitter = rng.integers(-2, 3, (height, width, 1))
    pixels = np.clip(np.array(color)[None, None, :] + jitter, 0, 255).astype(np.uint8)
    return pixels, color


def make_scene(
    rng: np.random.Generator,
    paintings: Sequence[RasterImage],
    labels: Sequence[int],
    texts: Optional[Sequence[Optional[str]]] = None,
) -> tuple[Scene, tuple[int, int, int]]:
    """
    Hang the given paintings left to right on a flat wall, scaled by a random factor in ``[0.85, 1]``, with margins of
    at least 30 px and gaps of at least 40 px.

    :param rng: The random generator
    :param paintings: One or more paintings
    :param labels: The label of each painting
    :param texts: Text to write in a box on each painting (``None`` for no box)
    :return: Tuple of (scene, wall color)
    """
    texts = texts or [None] * len(paintings)
    placed = []
    for painting, text in zip(paintings, texts):
        scale = rng.uniform(0.85, 1.0)
        painting = resize_bilinear(
            painting, max(16, int(round(painting.width * scale))), max(16, int(round(painting.height * scale)))
        )
        box = None
        if text is not None:
            painting, box = add_text_box(painting, text, rng)
        placed.append((painting, box))

    left, right, top, bottom = (int(v) for v in rng.integers(30, 61, 4))
    gaps = [int(v) for v in rng.integers(40, 71, len(placed) - 1)]
    width = left + right + sum(p.width for p, _ in placed) + sum(gaps)
    inner_h = max(p.height for p, _ in placed)
    height = top + bottom + inner_h

    pixels, wall_color = _wall(rng, width, height)
    bits = np.zeros((height, width), dtype=bool)
    boxes = []
    x = left
    for i, (painting, box) in enumerate(placed):
        y = top + int(rng.integers(0, inner_h - painting.height + 1))
        pixels[y : y + painting.height, x : x + painting.width] = painting.pixels
        bits[y : y + painting.height, x : x + painting.width] = True
        if box is not None:
            boxes.append(box.shifted(x, y))
        x += painting.width + (gaps[i] if i < len(gaps) else 0)

    scene = Scene(
        RasterImage(pixels),
        BinaryMask(bits),
        list(labels),
        ['' if t is None else t for t in texts],
        boxes,
    )
    return scene, wall_color


def _rotate_box(box: Box, angle: float, src_size: tuple[int, int], out_size: tuple[int, int]) -> Box:
    corners = [(box.x1, box.y1), (box.x2 - 1, box.y1), (box.x2 - 1, box.y2 - 1), (box.x1, box.y2 - 1)]
    points = rotate_points(np.array(corners), angle, src_size, out_size)
    x1, y1 = (max(0, int(v)) for v in np.floor(points.min(axis=0) + 0.5))
    x2, y2 = np.floor(points.max(axis=0) + 0.5).astype(int) + 1
    return Box(x1, y1, min(int(x2), out_size[0]), min(int(y2), out_size[1]))


def rotate_scene(scene: Scene, angle: float, wall_color: Sequence[int]) -> Scene:
    """Rotate a scene counterclockwise onto an expanded canvas filled with the wall color."""
    src_size = (scene.image.width, scene.image.height)
    out_size = rotated_size(*src_size, angle)
    image = rotate(scene.image, angle, tuple(wall_color), out_size)
    mask = rotate_mask(scene.mask, angle, out_size)
    boxes = [_rotate_box(box, angle, src_size, out_size) for box in scene.boxes]
    return Scene(image, mask, scene.labels, scene.texts, boxes, angle, scene.corrupted)


# endregion

# region Dataset


class DatasetGenerator:
    """
    Generates a museum and query scenes for a profile.  All randomness comes from a single generator seeded with
    ``seed``, so the same arguments always produce identical files.

    :param profile: DS1 (one clean painting per query), DS2 (one or two paintings with text boxes), DS3 (DS2 with noise
      and hue shifts on about half the queries), or DS4 (DS3 with rotations in [-30, 30] degrees and paintings that are
      not in the museum)
    :param seed: Seed for the random generator
    :param museum_size: The number of museum paintings
    :param query_count: The number of query scenes
    :param unknown_rate: The probability that a DS4 query painting is not in the museum
    """

    def __init__(
        self,
        profile: Union[Profile, str] = Profile.DS1,
        seed: int = 0,
        museum_size: int = 20,
        query_count: int = 30,
        unknown_rate: float = 0.2,
    ):
        self.profile = Profile(profile)
        self.seed = seed
        self.museum_size = museum_size
        self.query_count = query_count
        self.unknown_rate = unknown_rate
        self.rng = np.random.default_rng(seed)

    def __repr__(self) -> str:
        return f'<{self.__class__.__name__}[{self.profile.value}, seed={self.seed}]>'

    @property
    def multiple(self) -> bool:
        return self.profile is not Profile.DS1

    @property
    def text(self) -> bool:
        return self.profile is not Profile.DS1

    @property
    def corrupt(self) -> bool:
        return self.profile in (Profile.DS3, Profile.DS4)

    @property
    def rotated(self) -> bool:
        return self.profile is Profile.DS4

    def _painting_size(self) -> tuple[int, int]:
        return int(self.rng.integers(150, 221)), int(self.rng.integers(150, 221))

    @cached_property
    def museum(self) -> list[MuseumPainting]:
        museum = []
        for label in range(self.museum_size):
            entry = _catalog_entry(self.rng, label)
            museum.append(MuseumPainting(entry, make_painting(self.rng, *self._painting_size())))
        return museum

    def scenes(self) -> list[Scene]:
        museum = self.museum
        scenes = [self._scene(museum) for _ in range(self.query_count)]
        if self.rotated and scenes and not any(UNKNOWN_LABEL in s.labels for s in scenes):
            # Ensure at least one painting is not in the museum
            scenes[0] = self._scene(museum, force_unknown=True)
        return scenes

    def _scene(self, museum: list[MuseumPainting], force_unknown: bool = False) -> Scene:
        rng = self.rng
        count = int(rng.integers(1, 3)) if self.multiple else 1
        chosen = rng.choice(len(museum), size=min(count, len(museum)), replace=False)
        paintings, labels, texts = [], [], []
        for i, index in enumerate(chosen):
            if self.rotated and (rng.random() < self.unknown_rate or (force_unknown and i == 0)):
                paintings.append(make_painting(rng, *self._painting_size()))
                labels.append(UNKNOWN_LABEL)
                author = UNKNOWN_AUTHORS[int(rng.integers(len(UNKNOWN_AUTHORS)))]
            else:
                entry, image = museum[int(index)]
                paintings.append(image)
                labels.append(entry.label)
                author = entry.author
            texts.append(author.upper() if self.text else None)

        scene, wall_color = make_scene(rng, paintings, labels, texts)
        if self.rotated:
            scene = rotate_scene(scene, float(np.round(rng.uniform(-30, 30), 2)), wall_color)
        if self.corrupt and rng.random() < 0.5:
            image = shift_hue(scene.image, int(rng.integers(16, 64)))
            scene.image = salt_and_pepper(image, 0.1, rng)
            scene.corrupted = True
        return scene

    def write(self, out_dir: PathLike) -> SyntheticDataset:
        root = Path(out_dir)
        museum_dir, query_dir = root.joinpath(MUSEUM_DIR), root.joinpath(QUERY_DIR)
        museum_dir.mkdir(parents=True, exist_ok=True)
        query_dir.mkdir(parents=True, exist_ok=True)

        catalog = ['# label\tauthor\ttitle']
        for entry, image in self.museum:
            write_image(image, museum_dir.joinpath(f'bbdd_{entry.label:05d}.png'))
            catalog.append(f'{entry.label}\t{entry.author}\t{entry.title}')
        museum_dir.joinpath('catalog.tsv').write_text('\n'.join(catalog) + '\n', encoding='utf-8')

        queries = []
        for i, scene in enumerate(self.scenes()):
            stem = f'{i:05d}'
            write_image(scene.image, query_dir.joinpath(f'{stem}.png'))
            write_mask(scene.mask, query_dir.joinpath(f'{stem}.mask.png'))
            texts = ''.join(f'{text or ""}\n' for text in scene.texts)
            query_dir.joinpath(f'{stem}.ocr.txt').write_text(texts, encoding='utf-8')
            boxes = ''.join(' '.join(map(str, box)) + '\n' for box in scene.boxes)
            query_dir.joinpath(f'{stem}.boxes.txt').write_text(boxes, encoding='utf-8')
            query_dir.joinpath(f'{stem}.angle.txt').write_text(f'{scene.angle}\n', encoding='utf-8')
            queries.append(
                {
                    'image': f'{stem}.png',
                    'labels': scene.labels,
                    'mask': f'{stem}.mask.png',
                    'boxes': f'{stem}.boxes.txt',
                    'angle': f'{stem}.angle.txt',
                }
            )

        ground_truth = root.joinpath(GROUND_TRUTH_NAME)
        data = {'profile': self.profile.value, 'seed': self.seed, 'query_dir': QUERY_DIR, 'queries': queries}
        ground_truth.write_text(json.dumps(data, indent=2, sort_keys=True) + '\n', encoding='utf-8')
        log.info(f'Generated {len(self.museum)} museum paintings and {len(queries)} {self.profile.value} queries')
        return SyntheticDataset(root, museum_dir, query_dir, ground_truth, len(self.museum), len(queries))


# endregion
