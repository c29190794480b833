"""
Type checking aliases.

:author: Doug Skrypa
"""

from __future__ import annotations

from os import PathLike as _PathLike
from typing import Sequence, Tuple, TypeVar, Union

import numpy as np

T = TypeVar('T')

PathLike = Union[str, _PathLike]
Point = Tuple[int, int]
PointF = Tuple[float, float]
Points = Union[Sequence[Point], np.ndarray]
#: An axis-aligned ``(x1, y1, x2, y2)`` box, inclusive-exclusive
BoxTuple = Tuple[int, int, int, int]
Label = int
Ranking = Sequence[Label]
