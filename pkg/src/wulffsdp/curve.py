"""Polygonal Jordan curves and their tangent-angle Fourier spectrum.

The spectrum coefficients are ``c_k = int_Gamma exp(-i k nu) ds`` where ``nu``
is the tangent angle, approximated with central-difference tangents::

    c_k ~ 1/2 sum_j (t1_j - i t2_j)^k |x_{j+1} - x_{j-1}|

Indices wrap around, so every vertex of the closed curve contributes.
"""

from __future__ import annotations

import dataclasses
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateChord, DegenerateEdge, ModeMismatch, TooFewVertices


@dataclasses.dataclass(frozen=True)
class PolygonalCurve:
    """Closed polygon with counter-clockwise vertex order.

    Use :func:`load_curve` to construct one from raw points; the constructor
    itself does not normalize orientation.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def __len__(self) -> int:
        return self.vertices.shape[0]

    @property
    def signed_area(self) -> float:
        return shoelace(self.vertices)

    def transformed(self, rotation: float = 0.0, scale: float = 1.0,
                    shift: Sequence[float] = (0.0, 0.0)) -> "PolygonalCurve":
        """Rotate about the origin, scale, then translate."""
        c, s = np.cos(rotation), np.sin(rotation)
        R = np.array([[c, -s], [s, c]])
        return PolygonalCurve(scale * self.vertices @ R.T + np.asarray(shift, dtype=float))


@dataclasses.dataclass(frozen=True)
class CurveSpectrum:
    coefficients: np.ndarray
    length: float
    enclosed_area: float

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=complex)
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def modes(self) -> int:
        return self.coefficients.size

    def truncated(self, modes: int) -> "CurveSpectrum":
        if modes > self.modes:
            raise ModeMismatch(f"spectrum has {self.modes} modes, {modes} requested")
        return CurveSpectrum(self.coefficients[:modes], self.length, self.enclosed_area)

    def to_json(self) -> dict:
        return {
            "modes": self.modes,
            "length": self.length,
            "area": self.enclosed_area,
            "coefficients": [[z.real, z.imag] for z in self.coefficients],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CurveSpectrum":
        coeffs = np.array([complex(re, im) for re, im in data["coefficients"]])
        if "modes" in data and int(data["modes"]) != coeffs.size:
            raise ModeMismatch("'modes' does not match the number of coefficients")
        return cls(coeffs, float(data["length"]), float(data["area"]))


def shoelace(points: np.ndarray) -> float:
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def load_curve(points: Iterable[Sequence[float]]) -> PolygonalCurve:
    """Validate raw points and return a counter-clockwise closed curve.

    A repeated closing vertex (first == last) is dropped.  Self-intersection
    is not checked.
    """
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or (pts.size and pts.shape[1] != 2):
        raise ValueError("points must be a sequence of (x, y) pairs")
    if len(pts) >= 2 and np.array_equal(pts[0], pts[-1]):
        pts = pts[:-1]
    if len(pts) < 3:
        raise TooFewVertices(f"a closed curve needs at least 3 vertices, got {len(pts)}")
    edges = np.roll(pts, -1, axis=0) - pts
    bad = np.flatnonzero(np.all(edges == 0.0, axis=1))
    if bad.size:
        raise DegenerateEdge(f"zero-length edge after vertex {int(bad[0])}")
    if shoelace(pts) < 0:
        pts = pts[::-1].copy()
    return PolygonalCurve(pts)


def _chords(curve: PolygonalCurve) -> np.ndarray:
    v = curve.vertices
    chords = np.roll(v, -1, axis=0) - np.roll(v, 1, axis=0)
    bad = np.flatnonzero(np.all(chords == 0.0, axis=1))
    if bad.size:
        raise DegenerateChord(f"neighbours of vertex {int(bad[0])} coincide")
    return chords


def tangents(curve: PolygonalCurve) -> np.ndarray:
    """Unit central-difference tangents, one per vertex, shape (K, 2)."""
    chords = _chords(curve)
    return chords / np.linalg.norm(chords, axis=1)[:, None]


def tangent_angles(curve: PolygonalCurve) -> np.ndarray:
    t = tangents(curve)
    return np.arctan2(t[:, 1], t[:, 0])


def spectrum(curve: PolygonalCurve, modes: int) -> CurveSpectrum:
    """Coefficients c_0..c_{modes-1}, length and enclosed area of ``curve``.

    The central-difference rule is exact for the polygon through the edge
    midpoints (its edge vectors are half the chords), so the enclosed area is
    taken from that polygon as well; the anisoperimetric ratio then stays
    consistent with the discrete coefficients.
    """
    if modes < 1:
        raise ValueError("modes must be >= 1")
    chords = _chords(curve)
    half = 0.5 * np.linalg.norm(chords, axis=1)
    z = (chords[:, 0] - 1j * chords[:, 1]) / (2.0 * half)
    k = np.arange(modes)
    coeffs = (z[None, :] ** k[:, None]) @ half
    coeffs[0] = float(np.sum(half))
    v = curve.vertices
    midpoints = 0.5 * (v + np.roll(v, 1, axis=0))
    return CurveSpectrum(coeffs, float(coeffs[0].real), abs(shoelace(midpoints)))
