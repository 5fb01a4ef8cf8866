"""Polystore middleware over in-memory relational, array and text engines."""

from ._polydawg import Error, Polystore, demo_queries

__all__ = ["Error", "Polystore", "demo_queries"]
