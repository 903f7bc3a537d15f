"""Tests for the solvers sub-module."""
