"""Tests for the lp sub-module."""
