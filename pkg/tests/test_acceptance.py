"""The ten acceptance criteria; each test records one PASS/FAIL line."""

import math
import time
import warnings

import numpy as np
import pytest

from wulffsdp import anisotropy as an
from wulffsdp import pipeline as pl
from wulffsdp import shapes
from wulffsdp.anisotropy import AnisotropyFunction
from wulffsdp.curve import load_curve, spectrum
from wulffsdp.qcqp import solve_relaxation, verify_ordering
from wulffsdp.solver import solve
from wulffsdp.trigcone import cone_membership

from conftest import EPS3, box_grid_minimum, box_qcqp, random_star, record
from test_solver import EXAMPLES

pytestmark = pytest.mark.filterwarnings("ignore::wulffsdp.pipeline.UncertifiedSolution")

NU = np.linspace(0.0, 2.0 * np.pi, 360, endpoint=False)
SOLVES: list[tuple[str, pl.AnisotropyResult]] = []     # every quadratic pipeline solve below


def _timed_solve(curve, N, kind=pl.QUADRATIC, modes=None):
    spec = spectrum(curve, modes or N)
    t0 = time.perf_counter()
    res = pl.solve_anisotropy(pl.AnisotropyProblemSpec(spec, N, kind))
    return res, time.perf_counter() - t0


def _keep(label, res):
    if res.kind == pl.QUADRATIC:
        SOLVES.append((label, res))
    return res


def test_01_kobayashi_recovery():
    mu = AnisotropyFunction.kobayashi(3, EPS3)
    res, secs = _timed_solve(shapes.wulff_boundary(mu, 2000), 10)
    _keep("kobayashi N=10", res)
    dev, theta = pl.compare_to_reference(res.sigma, mu)
    ok = dev <= 0.05 and res.gap <= 1e-3 and secs <= 30.0
    record(1, "Kobayashi recovery", ok, f"sup-dev={dev:.2e} gap={res.gap:.1e} time={secs:.1f}s")
    assert ok


def test_02_gap_certification(dendrite_curve):
    r20, _ = _timed_solve(dendrite_curve, 20)
    r50, secs = _timed_solve(dendrite_curve, 50)
    _keep("dendrite N=20", r20)
    _keep("dendrite N=50", r50)
    ok = r20.gap <= 1e-3 and r50.gap <= 1e-4 and secs <= 300.0
    record(2, "dendrite gap certification", ok,
           f"gap(20)={r20.gap:.1e} gap(50)={r50.gap:.1e} time(50)={secs:.1f}s")
    assert ok


def test_03_circle_degeneracy(unit_circle):
    lin, _ = _timed_solve(unit_circle, 10, pl.LINEAR)
    quad, _ = _timed_solve(unit_circle, 10)
    _keep("circle N=10", quad)
    v = an.evaluate(quad.sigma, NU)
    spread = (v.max() - v.min()) / v.mean()
    ratio = quad.anisoperimetric_ratio
    ok = abs(lin.objective - 2 * math.pi) <= 1e-2 and spread <= 1e-3 and abs(ratio - 1) <= 1e-2
    record(3, "circle degeneracy", ok, f"linear={lin.objective:.6f} spread={spread:.1e} ratio={ratio:.6f}")
    assert ok


def test_04_anisoperimetric_inequality():
    worst, homothetic = math.inf, 0.0
    for seed in range(20):
        curve = random_star(seed)
        res, _ = _timed_solve(curve, 8)
        _keep(f"star {seed} N=8", res)
        if res.gap is not None and res.gap <= 1e-3:
            worst = min(worst, res.anisoperimetric_ratio)
        # a scaled copy of the Wulff boundary of the solved sigma
        wulff = load_curve(2.5 * shapes.wulff_boundary(res.sigma, 2000).vertices + [0.3, -0.2])
        ratio = an.anisoperimetric_ratio(res.sigma, spectrum(wulff, res.sigma.modes))
        homothetic = max(homothetic, abs(ratio - 1.0))
    ok = worst >= 1.0 - 1e-6 and homothetic <= 1e-2
    record(4, "anisoperimetric inequality", ok, f"min ratio={worst:.6f} max |ratio-1| on Wulff={homothetic:.1e}")
    assert ok


def test_05_relaxation_ordering():
    rng = np.random.default_rng(2024)
    violations = 0
    for i in range(50):
        if i % 5 == 4:
            problem = box_qcqp(rng, 2, m=1)
        else:
            problem = box_qcqp(rng, int(rng.integers(1, 4)))
        sol = solve_relaxation(problem)
        violations += not verify_ordering(problem, sol, box_grid_minimum(problem, 2e-3), tol=1e-6)
    record(5, "relaxation ordering", violations == 0, f"violations={violations}/50")
    assert violations == 0


def test_06_rank_and_recovery():
    assert SOLVES, "run together with criteria 1 to 4"
    bad_rank, bad_value, tight = [], [], 0
    for label, res in SOLVES:
        sol = res.solution
        n = sol.x_hat.size
        D = sol.X_hat - np.outer(sol.x_hat, sol.x_hat)
        ev = np.linalg.eigvalsh(0.5 * (D + D.T))
        lam_max = np.max(np.abs(np.linalg.eigvalsh(sol.X_hat)))
        if int(np.sum(ev > 1e-7 * lam_max)) > n - 1:
            bad_rank.append(label)
        if res.gap <= 1e-8:
            tight += 1
            x = sol.x_hat
            if abs(float(x @ pl.wulff_matrix(n // 2) @ x) - sol.objective_value) > 1e-6:
                bad_value.append(label)
    ok = not bad_rank and not bad_value
    record(6, "rank bound and tight recovery", ok,
           f"{len(SOLVES)} solves, {tight} with gap<=1e-8, rank failures={bad_rank}, value failures={bad_value}")
    assert ok


def _grid(coeffs, samples=10_000):
    nu = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    k = np.arange(coeffs.size)
    w = np.where(k == 0, 1.0, 2.0)
    E = np.exp(1j * np.outer(nu, k))
    return float(np.real(E @ (w * coeffs)).min()), float(np.real(E @ (w * (1 - k ** 2) * coeffs)).min())


def test_07_cone_oracle_equivalence():
    rng = np.random.default_rng(7)
    disagree, banded, members = 0, 0, 0
    for _ in range(200):
        N = int(rng.integers(1, 9))
        k = np.arange(N)
        c = (rng.normal(size=N) + 1j * rng.normal(size=N)) * rng.uniform(0.0, 0.4) / (1.0 + k ** 2)
        c[0] = 1.0
        gs, gg = _grid(c)
        if min(abs(gs), abs(gg)) <= 1e-5:
            banded += 1
            continue
        truth = min(gs, gg) > 0
        members += truth
        disagree += cone_membership(AnisotropyFunction(c)).member != truth
    record(7, "cone oracle equivalence", disagree == 0,
           f"disagreements={disagree} members={members} in-band={banded} of 200")
    assert disagree == 0


def test_08_wulff_area_two_ways():
    rng = np.random.default_rng(8)
    nu = np.linspace(0.0, 2.0 * np.pi, 4096, endpoint=False)
    worst = 0.0
    for _ in range(100):
        N = int(rng.integers(2, 21))
        k = np.arange(N)
        c = (rng.normal(size=N) + 1j * rng.normal(size=N)) * 0.3 / (1.0 + k ** 2)
        c[0] = 1.0
        sigma = AnisotropyFunction(c)
        x = sigma.to_real()
        quad_form = -float(x @ pl.wulff_matrix(N) @ x)
        # |W| = 1/2 * integral of sigma (sigma + sigma''), trapezoid rule on a periodic grid
        integral = 0.5 * np.mean(an.evaluate(sigma, nu) * an.stiffness(sigma, nu)) * 2.0 * np.pi
        worst = max(worst, abs(quad_form - integral) / abs(integral))
    record(8, "Wulff area two ways", worst <= 1e-6, f"max relative difference={worst:.1e}")
    assert worst <= 1e-6


def test_09_solver_unit_suite():
    errors, violations = [], 0
    for make, value, _ in EXAMPLES:
        res = solve(make())
        errors.append(abs(res.primal_objective - value))
        violations += sum(h["pobj"] < h["dobj"] - 1e-9 for h in res.history)
    ok = max(errors) <= 1e-7 and violations == 0
    record(9, "solver unit suite", ok,
           f"max |obj - closed form|={max(errors):.1e}; iterates violating weak duality={violations}")
    assert ok


def test_10_eotc_substitute(dendrite_curve):
    spec = pl.AnisotropyProblemSpec(spectrum(dendrite_curve, 40), 20)
    rows = pl.eotc_report(spec, [20, 30, 40])
    finite = all(math.isfinite(r.eotc) for r in rows[1:])
    hand = [math.log(rows[i + 1].seconds / rows[i].seconds) / math.log(rows[i + 1].modes / rows[i].modes)
            for i in range(2)]
    formula = all(abs(r.eotc - h) <= 1e-12 for r, h in zip(rows[1:], hand))
    reference = abs(pl.eotc([5.0, 39.0], [50, 100])[0] - math.log(39 / 5) / math.log(2)) <= 1e-12
    ok = finite and formula and reference
    detail = " ".join(f"N={r.modes}:{r.seconds:.2f}s" for r in rows) + \
        f" eotc={rows[1].eotc:.2f},{rows[2].eotc:.2f}"
    record(10, "eotc report", ok, detail)
    assert ok
