"""Synthetic test curves."""

from __future__ import annotations

import numpy as np

from .anisotropy import AnisotropyFunction, boundary_points
from .curve import PolygonalCurve, load_curve


def circle(radius: float = 1.0, samples: int = 1000) -> PolygonalCurve:
    u = 2.0 * np.pi * np.arange(samples) / samples
    return load_curve(radius * np.column_stack([np.cos(u), np.sin(u)]))


def dendrite(samples: int = 1000) -> PolygonalCurve:
    """Polar curve r(u) = 3 + exp(cos(18 pi u)) cos(8 pi u), u in [0, 1)."""
    u = np.arange(samples) / samples
    r = 3.0 + np.exp(np.cos(18.0 * np.pi * u)) * np.cos(8.0 * np.pi * u)
    return load_curve(r[:, None] * np.column_stack([np.sin(2 * np.pi * u), np.cos(2 * np.pi * u)]))


def square(side: float = 1.0) -> PolygonalCurve:
    return load_curve([(0.0, 0.0), (side, 0.0), (side, side), (0.0, side)])


def wulff_boundary(sigma: AnisotropyFunction, samples: int = 2000) -> PolygonalCurve:
    """Boundary of the Wulff shape of sigma at ``samples`` uniform angles."""
    nu = 2.0 * np.pi * np.arange(samples) / samples
    return load_curve(boundary_points(sigma, nu))
