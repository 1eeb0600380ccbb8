"""Optimal anisotropy functions for a given curve.

Two criteria are supported.  The *linear* kind minimizes the anisotropic
length ``L_sigma`` under ``sigma_avg = 1``, which is a convex SDP.  The
*quadratic* kind maximizes the Wulff area under ``L_sigma = L`` and is solved
through the enhanced relaxation of :mod:`wulffsdp.qcqp`; the answer is then
rescaled to unit Wulff area.

Decision vectors use the real split ``x = [Re sigma; Im sigma]`` of length 2N.
"""

from __future__ import annotations

import dataclasses
import logging
import math
import time
import warnings
from typing import Sequence

import numpy as np

from . import anisotropy as an
from .anisotropy import AnisotropyFunction
from .curve import CurveSpectrum
from .errors import DegenerateSpectrum, NegativeWulffArea, SolverFailure
from .qcqp import QcqpProblem, SdrSolution, extract, gap, rank_defect, relax
from .solver import ConicProgram, ProgramBuilder, SolverOptions, Status, solve
from .trigcone import ToeplitzConstraintSet, add_toeplitz_certificate

logger = logging.getLogger(__name__)

LINEAR = "linear"
QUADRATIC = "quadratic"
GAP_WARN = 1e-3


class UncertifiedSolution(UserWarning):
    """The relaxation gap is too large to certify the recovered anisotropy."""


@dataclasses.dataclass(frozen=True)
class AnisotropyProblemSpec:
    spectrum: CurveSpectrum
    modes: int
    constraint_kind: str = QUADRATIC
    options: SolverOptions = dataclasses.field(default_factory=SolverOptions)

    def __post_init__(self):
        if self.constraint_kind not in (LINEAR, QUADRATIC):
            raise ValueError(f"constraint kind must be {LINEAR!r} or {QUADRATIC!r}")
        if self.modes < 1:
            raise ValueError("modes must be >= 1")
        if self.modes > self.spectrum.modes:
            raise ValueError(f"spectrum has {self.spectrum.modes} modes, {self.modes} requested")


def interface_weights(spectrum: CurveSpectrum, modes: int) -> tuple[np.ndarray, np.ndarray]:
    """(alpha, beta) with ``L_sigma = alpha . Re sigma + beta . Im sigma``.

    ``c_1`` is the integral of ``dx - i dy`` around a closed curve and is set
    to exactly zero (the discrete sum telescopes, leaving only rounding).
    """
    c = spectrum.coefficients[:modes].copy()
    if modes > 1:
        c[1] = 0.0
    alpha = 2.0 * c.real
    beta = 2.0 * c.imag
    alpha[0] = c[0].real
    beta[0] = 0.0
    return alpha, beta


def wulff_matrix(modes: int) -> np.ndarray:
    """Diagonal P0 with ``x^T P0 x = -|W_sigma|``."""
    k = np.arange(modes, dtype=float)
    p = 2.0 * np.pi * (k ** 2 - 1.0)
    p[0] = -np.pi
    return np.diag(np.concatenate([p, p]))


def cone_constraints(modes: int) -> tuple[ToeplitzConstraintSet, ToeplitzConstraintSet]:
    """Certificates for sigma >= 0 and sigma + sigma'' >= 0, tied to x."""
    k = np.arange(modes, dtype=float)
    return (ToeplitzConstraintSet(modes, weights=np.ones(modes)),
            ToeplitzConstraintSet(modes, weights=1.0 - k ** 2))


def build_linear(spec: AnisotropyProblemSpec) -> ConicProgram:
    """min L_sigma s.t. sigma_0 = 1 and sigma in the cone; x is block 0."""
    N = spec.modes
    alpha, beta = interface_weights(spec.spectrum, N)
    b = ProgramBuilder()
    x = b.add_free(2 * N)
    xs = [x.var(i) for i in range(2 * N)]
    for i, w in enumerate(np.concatenate([alpha, beta])):
        if w != 0.0:
            b.add_cost(xs[i], w)
    b.add_row([(xs[0], 1.0)], 1.0)
    b.add_row([(xs[N], 1.0)], 0.0)
    for tcs in cone_constraints(N):
        add_toeplitz_certificate(b, tcs, x_vars=xs)
    return b.build()


def build_quadratic(spec: AnisotropyProblemSpec) -> tuple[QcqpProblem, ConicProgram]:
    """max |W_sigma| s.t. L_sigma = L and sigma in the cone, as a QCQP and its relaxation.

    Besides ``L_sigma = L`` the equality block carries ``Im sigma_0 = 0``, so
    the product constraints pin that row of X as well.
    """
    N = spec.modes
    c0 = float(spec.spectrum.coefficients[0].real)
    if not c0 > 0:
        raise DegenerateSpectrum(f"c_0 = {c0:g} is not positive")
    alpha, beta = interface_weights(spec.spectrum, N)
    A = np.zeros((2, 2 * N))
    A[0] = np.concatenate([alpha, beta])
    A[1, N] = 1.0
    problem = QcqpProblem(P0=wulff_matrix(N), A=A, b=np.array([c0, 0.0]),
                          toeplitz=cone_constraints(N))
    return problem, relax(problem)


def _scaled_quadratic(problem: QcqpProblem) -> tuple[QcqpProblem, np.ndarray]:
    """Rescale x -> u = w * x so that P0 has unit diagonal where nonzero.

    The Wulff weights grow like k^2, which leaves the relaxation badly
    conditioned for large N; the change of variables is a diagonal congruence
    on Y and does not change the optimal value.
    """
    N = problem.n // 2
    p = np.abs(np.diag(problem.P0)[:N])
    w = np.sqrt(np.where(p > 0, p, 1.0))
    W = np.concatenate([w, w])
    k = np.arange(N, dtype=float)
    tz = (ToeplitzConstraintSet(N, weights=1.0 / w),
          ToeplitzConstraintSet(N, weights=(1.0 - k ** 2) / w))
    scaled = QcqpProblem(P0=problem.P0 / np.outer(W, W), A=problem.A / W[None, :],
                         b=problem.b, toeplitz=tz)
    return scaled, W


@dataclasses.dataclass(frozen=True)
class AnisotropyResult:
    sigma: AnisotropyFunction
    raw_x: np.ndarray
    gap: float | None
    rank_defect: int | None
    objective: float
    anisoperimetric_ratio: float | None
    kind: str
    status: str
    iterations: int
    residuals: tuple[float, float, float]
    seconds: float
    solution: SdrSolution | None = dataclasses.field(default=None, repr=False, compare=False)

    @property
    def raw_sigma(self) -> AnisotropyFunction:
        """Unnormalized solver output; only the pinned Im sigma_0 is dropped."""
        x = self.raw_x.copy()
        x[x.size // 2] = 0.0
        return AnisotropyFunction.from_real(x)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "modes": self.sigma.modes,
            "coefficients": self.sigma.to_json()["coefficients"],
            "raw_x": self.raw_x.tolist(),
            "gap": self.gap,
            "rank_defect": self.rank_defect,
            "objective": self.objective,
            "ratio": self.anisoperimetric_ratio,
            "status": self.status,
            "iterations": self.iterations,
            "residuals": list(self.residuals),
            "seconds": self.seconds,
        }


def _sigma_from_x(x: np.ndarray) -> AnisotropyFunction:
    """Anisotropy function from a solver vector, with sigma_1 set to zero.

    sigma_1 only translates the Wulff shape: it enters neither criterion
    (c_1 = 0 and p_1 = 0) nor sigma + sigma''.  Zeroing it centres the Wulff
    shape at its Steiner point, an interior point, so sigma stays in the cone
    and the optimizer becomes unique up to the solver's own freedom.
    """
    x = np.array(x, dtype=float)
    N = x.size // 2
    x[N] = 0.0
    if N > 1:
        x[1] = x[N + 1] = 0.0
    return AnisotropyFunction.from_real(x)


def _ratio(sigma: AnisotropyFunction, spectrum: CurveSpectrum) -> float | None:
    if an.wulff_area(sigma) <= 0 or spectrum.enclosed_area <= 0:
        return None
    return an.anisoperimetric_ratio(sigma, spectrum)


def solve_anisotropy(spec: AnisotropyProblemSpec, rank_tol: float = 1e-7) -> AnisotropyResult:
    """Solve either criterion and post-process into an anisotropy function.

    Raises :class:`SolverFailure` when the solver does not reach an optimal
    point and :class:`NegativeWulffArea` when the quadratic solution cannot be
    normalized.  A relaxation gap above 1e-3 triggers an
    :class:`UncertifiedSolution` warning.
    """
    t0 = time.perf_counter()
    if spec.constraint_kind == LINEAR:
        program = build_linear(spec)
        res = solve(program, spec.options)
        if res.status != Status.OPTIMAL:
            raise SolverFailure(f"linear problem ended with status {res.status.value}", res)
        x = program.block(res.x, 0)
        sigma = _sigma_from_x(x)
        return AnisotropyResult(
            sigma=sigma, raw_x=x, gap=None, rank_defect=None,
            objective=res.primal_objective, anisoperimetric_ratio=_ratio(sigma, spec.spectrum),
            kind=LINEAR, status=res.status.value, iterations=res.iterations,
            residuals=res.residuals, seconds=time.perf_counter() - t0)

    problem, _ = build_quadratic(spec)
    scaled, W = _scaled_quadratic(problem)
    program = relax(scaled)
    res = solve(program, spec.options)
    if res.status != Status.OPTIMAL:
        raise SolverFailure(f"relaxation ended with status {res.status.value}", res)
    u, U = extract(scaled, program, res.x)
    x, X = u / W, U / np.outer(W, W)
    sol = SdrSolution(x, X, res.primal_objective, None, 0, None, res)
    g = gap(problem, sol)
    sol = dataclasses.replace(sol, gap=g, rank_defect=rank_defect(problem, sol, rank_tol))
    raw = _sigma_from_x(x)
    area = an.wulff_area(raw)
    if not area > 0:
        raise NegativeWulffArea(f"raw solution has Wulff area {area:g}")
    sigma = an.scale(raw, 1.0 / math.sqrt(area))
    if g > GAP_WARN:
        warnings.warn(f"relaxation gap {g:.3e} exceeds {GAP_WARN:g}; solution not certified",
                      UncertifiedSolution, stacklevel=2)
    return AnisotropyResult(
        sigma=sigma, raw_x=x, gap=g, rank_defect=sol.rank_defect,
        objective=res.primal_objective, anisoperimetric_ratio=_ratio(sigma, spec.spectrum),
        kind=QUADRATIC, status=res.status.value, iterations=res.iterations,
        residuals=res.residuals, seconds=time.perf_counter() - t0, solution=sol)


# ---------------------------------------------------------------------------
# timing exponents

def eotc(times: Sequence[float], modes: Sequence[int]) -> list[float]:
    """Pairwise exponents ln(T_{k+1}/T_k) / ln(N_{k+1}/N_k)."""
    if len(times) != len(modes):
        raise ValueError("times and modes must have equal length")
    out = []
    for k in range(len(times) - 1):
        out.append(math.log(times[k + 1] / times[k]) / math.log(modes[k + 1] / modes[k]))
    return out


@dataclasses.dataclass(frozen=True)
class EotcRow:
    modes: int
    seconds: float
    eotc: float | None


def eotc_report(spec: AnisotropyProblemSpec, mode_list: Sequence[int]) -> list[EotcRow]:
    """Time ``solve_anisotropy`` at each N (sequentially) and attach exponents."""
    mode_list = list(mode_list)
    if len(mode_list) < 2 or any(b <= a for a, b in zip(mode_list, mode_list[1:])):
        raise ValueError("mode_list must be increasing with at least two entries")
    times = []
    for N in mode_list:
        sub = dataclasses.replace(spec, modes=N)
        t0 = time.perf_counter()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UncertifiedSolution)
            solve_anisotropy(sub)
        times.append(time.perf_counter() - t0)
    exps = eotc(times, mode_list)
    return [EotcRow(N, T, None if i == 0 else exps[i - 1]) for i, (N, T) in enumerate(zip(mode_list, times))]


def eotc_csv(rows: Sequence[EotcRow]) -> str:
    lines = ["N,seconds,eotc"]
    for r in rows:
        lines.append(f"{r.modes},{r.seconds:.6f},{'' if r.eotc is None else f'{r.eotc:.6f}'}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# comparison against a reference anisotropy

def normalized(sigma: AnisotropyFunction) -> AnisotropyFunction:
    """sigma scaled to unit Wulff area."""
    area = an.wulff_area(sigma)
    if not area > 0:
        raise NegativeWulffArea(f"Wulff area {area:g} is not positive")
    return an.scale(sigma, 1.0 / math.sqrt(area))


def compare_to_reference(sigma: AnisotropyFunction, reference: AnisotropyFunction,
                         samples: int = 360, rotations: int = 720) -> tuple[float, float]:
    """Smallest sup-norm relative deviation over a grid of rotations.

    Both functions are scaled to unit Wulff area first.  Returns
    ``(deviation, theta)`` where sigma rotated by theta is closest to the
    reference.
    """
    s, r = normalized(sigma), normalized(reference)
    nu = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    ref = np.asarray(an.evaluate(r, nu))
    thetas = np.linspace(0.0, 2.0 * np.pi, rotations, endpoint=False)
    k = np.arange(s.modes)
    # rows: rotations, columns: samples
    coeffs = s.coefficients[None, :] * np.exp(-1j * np.outer(thetas, k))
    phase = np.exp(1j * np.outer(k[1:], nu))
    vals = coeffs[:, :1].real + 2.0 * np.real(coeffs[:, 1:] @ phase)
    dev = np.max(np.abs(vals - ref[None, :]), axis=1) / np.max(np.abs(ref))
    j = int(np.argmin(dev))
    return float(dev[j]), float(thetas[j])
