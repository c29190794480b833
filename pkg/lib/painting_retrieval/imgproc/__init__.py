"""
Raster primitives: color conversion, filtering, morphology, edges, contours, geometric fitting, and Hough lines.
"""

from .contours import Contour, OrientedRect, convex_hull, fill_contours, find_contours, label_components, min_area_rect
from .edges import canny
from .filters import box_filter, gaussian_blur, median_filter, otsu_threshold, resize_bilinear, sobel
from .geometry import derotate, rotate, rotate_mask, rotate_points, rotated_size
from .hough import LineSegment, hough_lines
from .morphology import MorphOp, SEShape, StructuringElement, morph_mask, morphology
from .raster import (
    BinaryMask,
    ColorSpace,
    RasterImage,
    convert_color,
    read_image,
    read_mask,
    to_gray,
    write_image,
    write_mask,
)
