"""Tests for query rotation, noise, background, and text box handling."""
