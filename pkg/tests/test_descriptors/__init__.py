"""Tests for color, texture, and text descriptors."""
