"""Compatibility of local density matrices with global quantum states."""
__version__ = "0.1.0"
