"""Merlin-assassination inference for 5-player Avalon."""

__version__ = "0.1.0"
