"""Genus zero and genus one Virasoro correlation generating functions."""

__version__ = "0.1.0"
