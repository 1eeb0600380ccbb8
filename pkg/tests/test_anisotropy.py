import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import EPS3, random_sigma
from wulffsdp import anisotropy as an
from wulffsdp import shapes
from wulffsdp.anisotropy import AnisotropyFunction
from wulffsdp.curve import load_curve, spectrum
from wulffsdp.errors import ModeMismatch, NonpositiveScale, NonpositiveSigma, NonpositiveWulffArea

ONE = AnisotropyFunction.constant(1.0)
TILTED = AnisotropyFunction(np.array([1.0, 0.1]))   # 1 + 0.2 cos(nu)


def quadrature_area(sigma: AnisotropyFunction, samples: int = 10_000) -> float:
    """Independent oracle: 1/2 int (sigma^2 - sigma'^2) dnu by the trapezoid rule."""
    nu = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    s = an.evaluate(sigma, nu)
    ds = an.derivative(sigma, nu)
    return 0.5 * np.mean(s * s - ds * ds) * 2 * np.pi


# -- evaluate / stiffness ----------------------------------------------------

def test_evaluate_constant():
    assert an.evaluate(ONE, 0.7) == 1.0


def test_evaluate_kobayashi(kobayashi):
    assert an.evaluate(kobayashi, 0.0) == pytest.approx(1.12375, abs=1e-12)
    assert an.evaluate(kobayashi, np.pi / 3) == pytest.approx(0.87625, abs=1e-12)


def test_stiffness_examples(kobayashi):
    assert an.stiffness(ONE, 1.3) == pytest.approx(1.0)
    np.testing.assert_allclose(an.stiffness(TILTED, np.linspace(0, 6, 7)), 1.0, atol=1e-15)
    assert an.stiffness(kobayashi, 0.0) == pytest.approx(0.01, abs=1e-12)


def test_stiffness_matches_finite_difference(kobayashi):
    nu, h = 0.4, 1e-4
    f = lambda v: an.evaluate(kobayashi, v)
    fd = f(nu) + (f(nu + h) - 2 * f(nu) + f(nu - h)) / h ** 2
    assert an.stiffness(kobayashi, nu) == pytest.approx(fd, abs=1e-6)


# -- energy, average, area ---------------------------------------------------

def test_energy_of_constant_is_length(dendrite_curve):
    s = spectrum(dendrite_curve, 10)
    assert an.interface_energy(ONE, s) == pytest.approx(s.length)


def test_energy_on_circle(unit_circle, kobayashi):
    s = spectrum(unit_circle, 10)
    assert an.interface_energy(kobayashi, s) == pytest.approx(2 * np.pi, abs=1e-3)


def test_energy_on_own_wulff_boundary_is_twice_area(kobayashi):
    s = spectrum(shapes.wulff_boundary(kobayashi, 4000), 8)
    assert an.interface_energy(kobayashi, s) == pytest.approx(2 * quadrature_area(kobayashi), rel=1e-5)


def test_energy_mode_mismatch(kobayashi, unit_circle):
    with pytest.raises(ModeMismatch):
        an.interface_energy(kobayashi, spectrum(unit_circle, 2))


def test_average():
    assert an.average(ONE) == 1.0
    assert an.average(AnisotropyFunction.kobayashi(3, EPS3)) == 1.0
    assert an.average(AnisotropyFunction.constant(2.5)) == 2.5


def test_wulff_area_examples(kobayashi):
    assert an.wulff_area(ONE) == pytest.approx(np.pi)
    # pi (1 - 4 eps^2) = 2.9491505 for eps = 0.99 / 8
    assert an.wulff_area(kobayashi) == pytest.approx(np.pi * (1 - 4 * EPS3 ** 2), rel=1e-14)
    assert an.wulff_area(kobayashi) == pytest.approx(2.9491505, abs=1e-6)
    assert an.wulff_area(kobayashi) == pytest.approx(quadrature_area(kobayashi), rel=1e-10)
    assert an.wulff_area(TILTED) == pytest.approx(np.pi)


# -- geometry ----------------------------------------------------------------

def test_geometry_of_constant_is_unit_circle():
    g = an.wulff_geometry(ONE, 360)
    np.testing.assert_allclose(np.linalg.norm(g.boundary, axis=1), 1.0, atol=1e-14)
    np.testing.assert_allclose(np.linalg.norm(g.frank_diagram, axis=1), 1.0, atol=1e-14)
    np.testing.assert_allclose(g.boundary[0], g.boundary[-1], atol=1e-14)


def test_geometry_kobayashi_area(kobayashi):
    g = an.wulff_geometry(kobayashi, 2000)
    assert an.polygon_area(g.boundary) == pytest.approx(an.wulff_area(kobayashi), rel=5e-3)
    assert np.min(g.curvature_reciprocal) >= -1e-12
    # 3-fold symmetry: rotating the boundary by 2 pi / 3 maps samples onto samples
    R = np.array([[np.cos(2 * np.pi / 3), -np.sin(2 * np.pi / 3)],
                  [np.sin(2 * np.pi / 3), np.cos(2 * np.pi / 3)]])
    g3 = an.wulff_geometry(kobayashi, 361)
    np.testing.assert_allclose(g3.boundary[:241] @ R.T, g3.boundary[120:], atol=1e-12)


def test_geometry_rejects_zero_sigma():
    sigma = AnisotropyFunction(np.array([1.0, 0.5]))   # 1 + cos(nu), zero at pi
    with pytest.raises(NonpositiveSigma):
        an.wulff_geometry(sigma, 361)


def test_geometry_needs_16_samples():
    with pytest.raises(ValueError):
        an.wulff_geometry(ONE, 8)


# -- anisoperimetric ratio ---------------------------------------------------

def test_ratio_circle(unit_circle):
    assert an.anisoperimetric_ratio(ONE, spectrum(unit_circle, 4)) == pytest.approx(1.0, abs=1e-3)


def test_ratio_on_own_wulff_shape(kobayashi):
    s = spectrum(shapes.wulff_boundary(kobayashi, 2000), 8)
    assert an.anisoperimetric_ratio(kobayashi, s) == pytest.approx(1.0, abs=1e-2)


def test_ratio_unit_square():
    s = spectrum(load_curve([(0, 0), (1, 0), (1, 1), (0, 1)]), 1)
    # for the square the central-difference rule sees the midpoint polygon, which
    # has length 2 sqrt(2) and area 1/2, giving the same ratio 8 / (4 pi / 2) = 4 / pi
    assert an.anisoperimetric_ratio(ONE, s) == pytest.approx(4 / np.pi, rel=1e-12)


def test_ratio_rejects_negative_area(unit_circle):
    bad = AnisotropyFunction(np.array([0.1, 0.0, 1.0]))
    with pytest.raises(NonpositiveWulffArea):
        an.anisoperimetric_ratio(bad, spectrum(unit_circle, 3))


# -- scale -------------------------------------------------------------------

def test_scale_examples(unit_circle):
    assert an.scale(ONE, 1.0) == ONE
    assert an.wulff_area(an.scale(ONE, 2.0)) == pytest.approx(4 * np.pi)
    s = spectrum(unit_circle, 4)
    k = AnisotropyFunction.kobayashi(3, EPS3)
    assert an.interface_energy(an.scale(k, 0.5), s) == pytest.approx(0.5 * an.interface_energy(k, s))
    with pytest.raises(NonpositiveScale):
        an.scale(ONE, 0.0)


def test_json_roundtrip(kobayashi):
    back = AnisotropyFunction.from_json(kobayashi.to_json())
    np.testing.assert_array_equal(back.coefficients, kobayashi.coefficients)


# -- properties --------------------------------------------------------------

seeds = st.integers(0, 2 ** 32 - 1)


@given(seeds, st.integers(1, 20), st.floats(0.05, 20.0))
def test_area_scales_quadratically(seed, N, t):
    s = random_sigma(np.random.default_rng(seed), N)
    assert an.wulff_area(an.scale(s, t)) == pytest.approx(t * t * an.wulff_area(s), rel=1e-10)


@given(seeds, st.integers(1, 10), st.floats(0.05, 20.0))
def test_energy_scales_linearly_and_ratio_invariant(seed, N, t):
    rng = np.random.default_rng(seed)
    sigma = AnisotropyFunction.kobayashi(2, 0.1, N + 2) if N % 2 else AnisotropyFunction.constant(1.0, N)
    sigma = AnisotropyFunction(sigma.coefficients + 0.01 * rng.normal(size=sigma.modes))
    spec = spectrum(shapes.dendrite(400), sigma.modes)
    assert an.interface_energy(an.scale(sigma, t), spec) == pytest.approx(t * an.interface_energy(sigma, spec), rel=1e-12)
    assert an.anisoperimetric_ratio(an.scale(sigma, t), spec) == pytest.approx(
        an.anisoperimetric_ratio(sigma, spec), rel=1e-9)


@given(seeds, st.integers(1, 20))
def test_area_matches_quadrature(seed, N):
    s = random_sigma(np.random.default_rng(seed), N)
    ref = quadrature_area(s)
    assert an.wulff_area(s) == pytest.approx(ref, rel=1e-6, abs=1e-9)


@given(seeds, st.integers(1, 12), st.floats(-10, 10))
def test_periodicity_and_real_values(seed, N, nu):
    s = random_sigma(np.random.default_rng(seed), N)
    assert an.evaluate(s, nu) == pytest.approx(an.evaluate(s, nu + 2 * np.pi), abs=1e-12)
    assert an.stiffness(s, nu) == pytest.approx(an.stiffness(s, nu + 2 * np.pi), abs=1e-12 * max(1, N * N))
    k = np.arange(-N + 1, N)
    full = np.concatenate([np.conj(s.coefficients[:0:-1]), s.coefficients])
    assert abs(np.sum(full * np.exp(1j * k * nu)).imag) <= 1e-10
