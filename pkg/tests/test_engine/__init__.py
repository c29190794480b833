"""Tests for museum indexing, persistence, ranking, clustering, and queries."""
