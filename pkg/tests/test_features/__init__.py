"""Tests for keypoint detection, binary descriptors, and matching."""
