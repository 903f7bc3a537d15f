"""Tests for the formats sub-module."""
