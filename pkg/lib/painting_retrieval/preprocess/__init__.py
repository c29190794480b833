"""
Query image conditioning: rotation, noise, background, and text box removal.
"""

from .background import BackgroundParams, remove_background
from .base import PaintingCrop, PreprocessReport
from .noise import detect_and_denoise
from .pipeline import preprocess_pipeline
from .rotation import RotationMethod, RotationParams, estimate_rotation_hough, estimate_rotation_rect
from .textbox import TextBoxCandidate, TextBoxParams, detect_textbox, detect_textbox_channel, erase_textbox
from .textbox import score_candidate
