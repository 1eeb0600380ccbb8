"""Anisotropy functions stored as truncated complex Fourier series.

``sigma(nu) = sigma_0 + 2 Re sum_{k>=1} sigma_k exp(i k nu)``, with the
negative modes implied by conjugate symmetry.  Derivatives are taken
analytically from the coefficients.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .curve import CurveSpectrum, shoelace
from .errors import ModeMismatch, NonpositiveScale, NonpositiveSigma, NonpositiveWulffArea


@dataclasses.dataclass(frozen=True)
class AnisotropyFunction:
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=complex).ravel()
        if c.size < 1:
            raise ValueError("at least one coefficient is required")
        if abs(c[0].imag) > 1e-12 * max(1.0, abs(c[0])):
            raise ValueError("sigma_0 must be real")
        c[0] = c[0].real
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def modes(self) -> int:
        return self.coefficients.size

    @classmethod
    def constant(cls, value: float = 1.0, modes: int = 1) -> "AnisotropyFunction":
        c = np.zeros(modes, dtype=complex)
        c[0] = value
        return cls(c)

    @classmethod
    def kobayashi(cls, m: int, eps: float, modes: int | None = None) -> "AnisotropyFunction":
        """``1 + eps cos(m nu)``."""
        modes = max(modes or 0, m + 1)
        c = np.zeros(modes, dtype=complex)
        c[0] = 1.0
        c[m] = eps / 2.0
        return cls(c)

    @classmethod
    def from_real(cls, x: np.ndarray) -> "AnisotropyFunction":
        """Inverse of :meth:`to_real` (``x = [Re sigma; Im sigma]``)."""
        x = np.asarray(x, dtype=float)
        n = x.size // 2
        return cls(x[:n] + 1j * x[n:])

    def to_real(self) -> np.ndarray:
        return np.concatenate([self.coefficients.real, self.coefficients.imag])

    def padded(self, modes: int) -> "AnisotropyFunction":
        if modes < self.modes:
            raise ModeMismatch("cannot pad to fewer modes")
        c = np.zeros(modes, dtype=complex)
        c[: self.modes] = self.coefficients
        return AnisotropyFunction(c)

    def rotated(self, theta: float) -> "AnisotropyFunction":
        """The function nu -> sigma(nu - theta)."""
        k = np.arange(self.modes)
        return AnisotropyFunction(self.coefficients * np.exp(-1j * k * theta))

    def to_json(self) -> dict:
        return {"modes": self.modes,
                "coefficients": [[z.real, z.imag] for z in self.coefficients]}

    @classmethod
    def from_json(cls, data: dict) -> "AnisotropyFunction":
        coeffs = [complex(re, im) for re, im in data["coefficients"]]
        if "modes" in data and int(data["modes"]) != len(coeffs):
            raise ModeMismatch("'modes' does not match the number of coefficients")
        return cls(np.array(coeffs))


def _series(coeffs: np.ndarray, nu):
    """Real value of sum_{|k|<N} a_k exp(i k nu) with a_{-k} = conj(a_k)."""
    nu_arr = np.asarray(nu, dtype=float)
    k = np.arange(1, coeffs.size)
    phase = np.exp(1j * np.multiply.outer(nu_arr, k))
    val = coeffs[0].real + 2.0 * np.real(phase @ coeffs[1:])
    return val if nu_arr.ndim else float(val)


def evaluate(sigma: AnisotropyFunction, nu):
    """sigma(nu) for a scalar or array of angles."""
    return _series(sigma.coefficients, nu)


def derivative(sigma: AnisotropyFunction, nu, order: int = 1):
    k = np.arange(sigma.modes)
    return _series(sigma.coefficients * (1j * k) ** order, nu)


def stiffness(sigma: AnisotropyFunction, nu):
    """sigma + sigma'' (the reciprocal curvature of the Wulff boundary)."""
    k = np.arange(sigma.modes)
    return _series(sigma.coefficients * (1.0 - k ** 2), nu)


def interface_energy(sigma: AnisotropyFunction, spec: CurveSpectrum) -> float:
    if spec.modes < sigma.modes:
        raise ModeMismatch(f"spectrum has {spec.modes} modes, sigma needs {sigma.modes}")
    s = sigma.coefficients
    c = spec.coefficients[: sigma.modes]
    return float(c[0].real * s[0].real + 2.0 * np.real(np.sum(np.conj(c[1:]) * s[1:])))


def average(sigma: AnisotropyFunction) -> float:
    return float(sigma.coefficients[0].real)


def wulff_area(sigma: AnisotropyFunction) -> float:
    """Area of the Wulff shape; may be negative outside the admissible cone."""
    s = sigma.coefficients
    k = np.arange(1, sigma.modes)
    return float(np.pi * s[0].real ** 2 + 2.0 * np.pi * np.sum((1 - k ** 2) * np.abs(s[1:]) ** 2))


def scale(sigma: AnisotropyFunction, t: float) -> AnisotropyFunction:
    if not t > 0:
        raise NonpositiveScale(f"scale factor must be positive, got {t}")
    return AnisotropyFunction(t * sigma.coefficients)


def anisoperimetric_ratio(sigma: AnisotropyFunction, spec: CurveSpectrum) -> float:
    area = wulff_area(sigma)
    if area <= 0:
        raise NonpositiveWulffArea(f"Wulff area {area:g} is not positive")
    if spec.enclosed_area <= 0:
        raise NonpositiveWulffArea("curve encloses no area")
    return interface_energy(sigma, spec) ** 2 / (4.0 * area * spec.enclosed_area)


@dataclasses.dataclass(frozen=True)
class WulffGeometry:
    nu: np.ndarray
    boundary: np.ndarray
    frank_diagram: np.ndarray
    curvature_reciprocal: np.ndarray

    def to_json(self) -> dict:
        return {
            "nu": self.nu.tolist(),
            "boundary": self.boundary.tolist(),
            "frank": self.frank_diagram.tolist(),
            "kappa_inv": self.curvature_reciprocal.tolist(),
        }


def normal(nu) -> np.ndarray:
    nu = np.asarray(nu, dtype=float)
    return np.stack([-np.sin(nu), np.cos(nu)], axis=-1)


def tangent(nu) -> np.ndarray:
    nu = np.asarray(nu, dtype=float)
    return np.stack([np.cos(nu), np.sin(nu)], axis=-1)


def boundary_points(sigma: AnisotropyFunction, nu) -> np.ndarray:
    """x(nu) = -sigma(nu) n(nu) + sigma'(nu) t(nu)."""
    nu = np.asarray(nu, dtype=float)
    val = np.asarray(evaluate(sigma, nu))[..., None]
    der = np.asarray(derivative(sigma, nu))[..., None]
    return -val * normal(nu) + der * tangent(nu)


def wulff_geometry(sigma: AnisotropyFunction, samples: int) -> WulffGeometry:
    """Sample the Wulff boundary, Frank diagram and sigma + sigma'' on a
    uniform grid of ``samples`` angles covering [0, 2 pi] (both ends)."""
    if samples < 16:
        raise ValueError("at least 16 samples are required")
    nu = np.linspace(0.0, 2.0 * np.pi, samples)
    val = np.asarray(evaluate(sigma, nu))
    if np.any(val <= 0):
        raise NonpositiveSigma(f"sigma takes the value {val.min():g} <= 0; Frank diagram undefined")
    return WulffGeometry(
        nu=nu,
        boundary=boundary_points(sigma, nu),
        frank_diagram=-(1.0 / val)[:, None] * normal(nu),
        curvature_reciprocal=np.asarray(stiffness(sigma, nu)),
    )


def polygon_area(points: np.ndarray) -> float:
    pts = points[:-1] if np.allclose(points[0], points[-1]) else points
    return abs(shoelace(pts))
