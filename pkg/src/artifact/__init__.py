"""Computational laboratory for the delta method on diagonal cubic forms."""

__version__ = "0.1.0"
