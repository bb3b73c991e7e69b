"""Common eigenrays and entropy ranks for cone-preserving integer matrix groups."""

__version__ = "0.1.0"
