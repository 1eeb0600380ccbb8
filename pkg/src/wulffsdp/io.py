"""File formats: curve CSV, JSON documents and plot-data CSV series."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any

import numpy as np

from . import anisotropy as an
from .anisotropy import AnisotropyFunction
from .curve import PolygonalCurve, load_curve

PLOT_FILES = ("sigma.csv", "wulff.csv", "frank.csv", "kappa_inv.csv")


def _numeric(row: list[str]) -> bool:
    try:
        [float(v) for v in row]
    except ValueError:
        return False
    return True


def read_curve_csv(path: str | Path) -> PolygonalCurve:
    """Read "x,y" lines; a leading non-numeric header line is skipped."""
    points = []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            row = [v.strip() for v in row if v.strip()]
            if not row:
                continue
            if len(row) != 2 or not _numeric(row):
                if i == 0 and not points:
                    continue
                raise ValueError(f"{path}: line {i + 1} is not an 'x,y' pair")
            points.append((float(row[0]), float(row[1])))
    return load_curve(points)


def write_curve_csv(path: str | Path, curve: PolygonalCurve) -> None:
    np.savetxt(path, curve.vertices, delimiter=",", fmt="%.17g")


def read_json(path: str | Path) -> Any:
    with open(path) as fh:
        return json.load(fh)


def write_json(path: str | Path, data: Any) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


def _write_series(path: Path, header: str, columns: list[np.ndarray]) -> None:
    np.savetxt(path, np.column_stack(columns), delimiter=",", header=header,
               comments="", fmt="%.17g")


def export_plot_data(sigma: AnisotropyFunction, samples: int, directory: str | Path) -> list[Path]:
    """Write sigma.csv, wulff.csv, frank.csv and kappa_inv.csv into ``directory``.

    ``sigma.csv`` and ``kappa_inv.csv`` hold (nu, value) pairs; the other two
    hold the (x, y) points of the Wulff boundary and the Frank diagram.
    """
    geom = an.wulff_geometry(sigma, samples)
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / name for name in PLOT_FILES]
    _write_series(paths[0], "nu,sigma", [geom.nu, np.asarray(an.evaluate(sigma, geom.nu))])
    _write_series(paths[1], "x,y", [geom.boundary[:, 0], geom.boundary[:, 1]])
    _write_series(paths[2], "x,y", [geom.frank_diagram[:, 0], geom.frank_diagram[:, 1]])
    _write_series(paths[3], "nu,kappa_inv", [geom.nu, geom.curvature_reciprocal])
    return paths


def read_series(path: str | Path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
