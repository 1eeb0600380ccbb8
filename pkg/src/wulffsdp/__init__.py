"""Optimal anisotropy functions of planar curves via enhanced semidefinite relaxation."""

__version__ = "0.1.0"
