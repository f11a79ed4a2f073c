"""Complexity-guided recommendation of variational quantum classifier circuits."""

__version__ = "0.1.0"
