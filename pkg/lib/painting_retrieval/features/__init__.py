"""
Keypoint features: FAST detection, steered BRIEF description, and Hamming matching.
"""

from .brief import BRIEF_PAIRS, BinaryDescriptor, DetectParams, FeatureSet, brief_describe, extract_features
from .keypoints import FeatureChannel, Keypoint, Pyramid, fast_detect, feature_plane, orient_keypoint
from .matching import MatchParams, MatchResult, Verdict, image_feature_similarity, match_descriptors
