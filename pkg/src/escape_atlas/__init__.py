"""Constructive iteration tools for transcendental entire functions."""

__version__ = "0.1.0"
