"""Exact symbolic kernel for planar trees, aromas, and post-Lie operations."""

__version__ = "0.1.0"

GRAMMAR_VERSION = "1"
