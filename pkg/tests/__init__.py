"""Test suite for the facet_lp package."""
