"""Tests for histogram measures and evaluation metrics."""
