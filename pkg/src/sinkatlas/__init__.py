"""Sinkatlas: preference graphs, sink equilibria and replicator dynamics for normal-form games."""

__version__ = "0.1.0"
