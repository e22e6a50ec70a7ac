"""Multipartite quantum states over time: star products, quasiprobabilities, snapshotting."""

__version__ = "0.1.0"
