"""Tests for configuration, error handling, the command line interface, and synthetic data generation."""
