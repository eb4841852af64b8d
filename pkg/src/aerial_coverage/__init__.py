"""Persistent visual coverage of a convex region by aerial camera agents."""

__version__ = "0.1.0"
