import numpy as np
import pytest

from wulffsdp import anisotropy as an
from wulffsdp import io, shapes
from wulffsdp import pipeline as pl
from wulffsdp.curve import spectrum
from wulffsdp.anisotropy import AnisotropyFunction
from wulffsdp.errors import TooFewVertices

from conftest import EPS3


def test_curve_csv_round_trip(tmp_path, dendrite_curve):
    path = tmp_path / "c.csv"
    io.write_curve_csv(path, dendrite_curve)
    back = io.read_curve_csv(path)
    np.testing.assert_array_equal(back.vertices, dendrite_curve.vertices)


def test_curve_csv_header_and_blank_lines(tmp_path):
    path = tmp_path / "c.csv"
    path.write_text("x,y\n0,0\n\n1,0\n1,1\n0,1\n")
    assert len(io.read_curve_csv(path)) == 4


def test_curve_csv_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("0,0\n1,zero\n1,1\n")
    with pytest.raises(ValueError):
        io.read_curve_csv(bad)
    two = tmp_path / "two.csv"
    two.write_text("0,0\n1,0\n")
    with pytest.raises(TooFewVertices):
        io.read_curve_csv(two)


def test_plot_series_reevaluate(tmp_path, kobayashi):
    sigma = an.scale(kobayashi, 1.3)
    paths = io.export_plot_data(sigma, 360, tmp_path)
    assert [p.name for p in paths] == list(io.PLOT_FILES)
    data = io.read_series(tmp_path / "sigma.csv")
    assert data.shape == (360, 2)
    np.testing.assert_allclose(data[:, 1], an.evaluate(sigma, data[:, 0]), rtol=0, atol=1e-12)
    kinv = io.read_series(tmp_path / "kappa_inv.csv")
    np.testing.assert_allclose(kinv[:, 1], an.stiffness(sigma, kinv[:, 0]), rtol=0, atol=1e-12)
    assert (tmp_path / "sigma.csv").read_text().splitlines()[0] == "nu,sigma"


def _local_minima(v):
    """Strict local minima of a periodic series."""
    return np.flatnonzero((v < np.roll(v, 1)) & (v < np.roll(v, -1)))


def test_kappa_inv_minima_for_kobayashi(tmp_path, kobayashi):
    curve = shapes.wulff_boundary(kobayashi, 2000)
    res = pl.solve_anisotropy(pl.AnisotropyProblemSpec(spectrum(curve, 10), 10))
    io.export_plot_data(res.sigma, 721, tmp_path)
    kinv = io.read_series(tmp_path / "kappa_inv.csv")[:-1, 1]    # drop the closing sample
    minima = _local_minima(kinv)
    assert minima.size == 3
    # 1 - 8 eps cos 3 nu bottoms out at 1 - 8 eps = 0.01 before scaling
    assert np.all(kinv[minima] <= 0.05 * kinv.max())
    assert kinv[minima].min() / kinv.max() == pytest.approx((1 - 8 * EPS3) / (1 + 8 * EPS3), rel=1e-2)


def test_constant_sigma_gives_circles(tmp_path):
    io.export_plot_data(AnisotropyFunction.constant(1.0, 3), 64, tmp_path)
    np.testing.assert_allclose(io.read_series(tmp_path / "sigma.csv")[:, 1], 1.0, atol=1e-15)
    np.testing.assert_allclose(io.read_series(tmp_path / "kappa_inv.csv")[:, 1], 1.0, atol=1e-15)
    for name in ("wulff.csv", "frank.csv"):
        pts = io.read_series(tmp_path / name)
        np.testing.assert_allclose(np.hypot(pts[:, 0], pts[:, 1]), 1.0, atol=1e-12)


def test_json_helpers(tmp_path):
    path = tmp_path / "d.json"
    io.write_json(path, {"a": [1.5, 2]})
    assert io.read_json(path) == {"a": [1.5, 2]}
