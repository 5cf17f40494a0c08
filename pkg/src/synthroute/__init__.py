"""Routed synthetic query generation for Search/Generate function calling."""

__version__ = "0.1.0"
