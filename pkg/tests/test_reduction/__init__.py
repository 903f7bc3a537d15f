"""Tests for the reduction sub-module."""
