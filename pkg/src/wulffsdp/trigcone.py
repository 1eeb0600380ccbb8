"""Nonnegativity of truncated Fourier series through Toeplitz-sum certificates.

A real trigonometric polynomial ``sum_{|k|<N} d_k exp(i k nu)`` is
nonnegative iff there is a Hermitian ``F >= 0`` of order ``N`` whose k-th
subdiagonal sums to ``d_k``::

    sum_{p=k+1}^{N} F[p, p-k] = d_k      (1-based indices)

Hermitian blocks are handed to the real-arithmetic solver through the lift
``F = (Z11 + Z22) + i (Z21 - Z12)`` of a real symmetric ``Z >= 0`` of order
``2N``.  The lift is onto the Hermitian PSD cone, so no structural equality
rows are needed; :func:`hermitian_to_real` is its right inverse up to a
factor of two.
"""

from __future__ import annotations

import dataclasses
from typing import Sequence

import numpy as np

from .anisotropy import AnisotropyFunction, evaluate, stiffness
from .errors import Infeasible, NotHermitian, SolverFailure
from .solver import ProgramBuilder, SolverOptions, Status, solve

PSD_TOL = 1e-8
GRID_SAMPLES = 10_000


@dataclasses.dataclass(frozen=True)
class HermitianBlock:
    entries: np.ndarray

    def __post_init__(self):
        H = np.array(self.entries, dtype=complex)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise NotHermitian("Hermitian block must be square")
        if not np.allclose(H, H.conj().T, atol=1e-12, rtol=0):
            raise NotHermitian("matrix is not Hermitian to 1e-12")
        H = 0.5 * (H + H.conj().T)
        H.setflags(write=False)
        object.__setattr__(self, "entries", H)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])


@dataclasses.dataclass(frozen=True)
class ToeplitzConstraintSet:
    """Targets for the subdiagonal sums of a certificate of order ``order``.

    ``d_k = targets[k] + weights[k] * (x[k] + i x[order + k])`` where ``x`` is
    the real split ``[Re sigma; Im sigma]`` of the decision vector.  Either
    part may be omitted.
    """

    order: int
    targets: np.ndarray | None = None
    weights: np.ndarray | None = None

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.targets is not None:
            t = np.array(self.targets, dtype=complex)
            if t.shape != (self.order,):
                raise ValueError("targets must have one entry per order")
            if abs(t[0].imag) > 1e-12:
                raise ValueError("d_0 must be real")
            object.__setattr__(self, "targets", t)
        if self.weights is not None:
            w = np.array(self.weights, dtype=float)
            if w.shape != (self.order,):
                raise ValueError("weights must have one entry per order")
            object.__setattr__(self, "weights", w)


def hermitian_to_real(H) -> np.ndarray:
    """``[[Re H, -Im H], [Im H, Re H]]``; same spectrum as H, doubled."""
    if not isinstance(H, HermitianBlock):
        H = HermitianBlock(H)
    E = H.entries
    return np.block([[E.real, -E.imag], [E.imag, E.real]])


def lift_to_hermitian(Z: np.ndarray) -> np.ndarray:
    """Hermitian image ``(Z11 + Z22) + i (Z21 - Z12)`` of a real order-2N matrix."""
    n = Z.shape[0] // 2
    Z11, Z12, Z21, Z22 = Z[:n, :n], Z[:n, n:], Z[n:, :n], Z[n:, n:]
    return (Z11 + Z22) + 1j * (Z21 - Z12)


def toeplitz_sums(F: np.ndarray) -> np.ndarray:
    """``d_k = sum_p F[p, p-k]`` for k = 0..N-1 (0-based: row r, column r-k)."""
    N = F.shape[0]
    return np.array([np.trace(F, offset=-k) for k in range(N)])


def trig_values(d: np.ndarray, nu) -> np.ndarray:
    """Evaluate the real trigonometric polynomial with coefficients d_k."""
    nu = np.asarray(nu, dtype=float)
    k = np.arange(1, d.size)
    return d[0].real + 2.0 * np.real(np.exp(1j * np.multiply.outer(nu, k)) @ d[1:])


def _lift_terms(N: int, k: int, part: str):
    """Entries (i, j, coef) of the real lift Z whose combination gives the
    real or imaginary part of the k-th subdiagonal sum of the lifted F."""
    terms = []
    for r in range(k, N):
        c = r - k
        if part == "re":
            terms.append((r, c, 1.0))
            terms.append((N + r, N + c, 1.0))
        else:
            terms.append((N + r, c, 1.0))
            terms.append((r, N + c, -1.0))
    return terms


def add_toeplitz_certificate(builder: ProgramBuilder, tcs: ToeplitzConstraintSet,
                             x_vars: Sequence | None = None, extra: dict | None = None):
    """Add a lifted certificate block and its subdiagonal-sum rows.

    ``x_vars`` are variable references for the real split of x (length
    2 * order) when ``tcs.weights`` is set.  ``extra`` maps ``(k, part)`` to a
    list of additional ``(var, coef)`` terms placed on the certificate side.
    Returns the PSD block handle.
    """
    N = tcs.order
    Z = builder.add_psd(2 * N)
    extra = extra or {}
    for part in ("re", "im"):
        for k in range(N):
            if part == "im" and k == 0:
                continue
            terms = [(Z.entry(i, j), coef) for i, j, coef in _lift_terms(N, k, part)]
            terms += extra.get((k, part), [])
            rhs = 0.0
            if tcs.targets is not None:
                rhs = tcs.targets[k].real if part == "re" else tcs.targets[k].imag
            if tcs.weights is not None and tcs.weights[k] != 0.0:
                if x_vars is None:
                    raise ValueError("x_vars required for weighted targets")
                idx = k if part == "re" else N + k
                terms.append((x_vars[idx], -tcs.weights[k]))
            builder.add_row(terms, rhs)
    return Z


@dataclasses.dataclass(frozen=True)
class TrigMinimum:
    """Result of minimizing a trigonometric polynomial by its certificate SDP."""

    value: float
    certificate: np.ndarray


def trig_minimum(d: np.ndarray, options: SolverOptions | None = None) -> TrigMinimum:
    """max t such that d - t is nonnegative, with the certificate of d - t."""
    d = np.asarray(d, dtype=complex)
    N = d.size
    b = ProgramBuilder()
    t = b.add_free(1)
    tcs = ToeplitzConstraintSet(N, targets=d)
    Z = add_toeplitz_certificate(b, tcs, extra={(0, "re"): [(t.var(0), 1.0)]})
    b.add_cost(t.var(0), -1.0)
    prog = b.build()
    res = solve(prog, options)
    if res.status != Status.OPTIMAL:
        raise SolverFailure(f"certificate SDP ended with status {res.status.value}", res)
    F = lift_to_hermitian(prog.block(res.x, Z.index))
    return TrigMinimum(float(res.x[t.var(0)[0]]), 0.5 * (F + F.conj().T))


def _scale(d: np.ndarray) -> float:
    return max(1.0, float(np.abs(d[0])) + 2.0 * float(np.sum(np.abs(d[1:]))))


def nonneg_certificate(sigma, options: SolverOptions | None = None) -> HermitianBlock:
    """Hermitian F >= 0 with subdiagonal sums equal to sigma's coefficients.

    Raises :class:`Infeasible` when sigma takes negative values.
    """
    d = sigma.coefficients if isinstance(sigma, AnisotropyFunction) else np.asarray(sigma, dtype=complex)
    tm = trig_minimum(d, options)
    if tm.value < -PSD_TOL * _scale(d):
        raise Infeasible(f"minimum value {tm.value:.3e} < 0")
    F = tm.certificate.copy()
    F[0, 0] += tm.value
    return HermitianBlock(0.5 * (F + F.conj().T))


@dataclasses.dataclass(frozen=True)
class ConeMembership:
    member: bool
    sigma_min: float
    stiffness_min: float
    F: HermitianBlock | None
    G: HermitianBlock | None

    def __bool__(self) -> bool:
        return self.member

    def to_json(self) -> dict:
        def mat(h):
            return None if h is None else [[[z.real, z.imag] for z in row] for row in h.entries]
        return {"member": self.member, "sigma_min": self.sigma_min,
                "stiffness_min": self.stiffness_min, "F": mat(self.F), "G": mat(self.G)}


def cone_membership(sigma: AnisotropyFunction, options: SolverOptions | None = None,
                    tol: float = PSD_TOL) -> ConeMembership:
    """Decide sigma >= 0 and sigma + sigma'' >= 0 via the two certificates."""
    d = sigma.coefficients
    k = np.arange(sigma.modes)
    e = d * (1.0 - k ** 2)
    tf = trig_minimum(d, options)
    tg = trig_minimum(e, options)
    ok_f = tf.value >= -tol * _scale(d)
    ok_g = tg.value >= -tol * _scale(e)
    F = G = None
    if ok_f and ok_g:
        Fm, Gm = tf.certificate.copy(), tg.certificate.copy()
        Fm[0, 0] += tf.value
        Gm[0, 0] += tg.value
        F, G = HermitianBlock(Fm), HermitianBlock(Gm)
    return ConeMembership(bool(ok_f and ok_g), tf.value, tg.value, F, G)


def grid_minima(sigma: AnisotropyFunction, samples: int = GRID_SAMPLES) -> tuple[float, float]:
    """Dense-grid minima of sigma and sigma + sigma'' (independent oracle)."""
    nu = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    return float(np.min(evaluate(sigma, nu))), float(np.min(stiffness(sigma, nu)))
