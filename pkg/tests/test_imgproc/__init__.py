"""Tests for the raster primitives."""
