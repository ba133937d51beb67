"""Periodic points of multidimensional subshifts of finite type."""

__version__ = "0.1.0"
