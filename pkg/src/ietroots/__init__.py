"""Exact computation in the group of interval exchange transformations."""

__version__ = "0.1.0"
