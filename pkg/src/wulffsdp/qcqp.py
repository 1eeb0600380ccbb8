"""Quadratically constrained quadratic programs and their enhanced SDP relaxation.

The problem class is::

    minimize    x^T P0 x + 2 q0^T x + r0
    subject to  x^T Pl x + 2 ql^T x + rl <= 0        l = 1..d
                A x = b
                H0 + sum_j x_j Hj >= 0             (Hermitian LMI)
                Toeplitz-sum certificates tied linearly to x

The relaxation replaces ``x x^T`` by a matrix ``X`` with ``[[X, x], [x^T, 1]] >= 0``
and keeps the redundant products ``A X = b x^T`` of the equality constraints,
which is what makes it tighter than the plain Shor relaxation.
"""

from __future__ import annotations

import dataclasses
import logging
import warnings
from typing import Sequence

import numpy as np

from .errors import IndefiniteConstraint, InvalidProblem, RankDeficientA, SolverFailure, ZeroDenominator
from .solver import ConicProgram, ProgramBuilder, SolverOptions, SolverResult, Status, solve
from .trigcone import HermitianBlock, ToeplitzConstraintSet, add_toeplitz_certificate

logger = logging.getLogger(__name__)

SYM_TOL = 1e-12
RANK_TOL = 1e-10
RANK_FLOOR = 1e-9
RHO_MAX = 1e8


@dataclasses.dataclass(frozen=True)
class QuadraticConstraint:
    """``x^T P x + 2 q^T x + r <= 0``."""

    P: np.ndarray
    q: np.ndarray
    r: float = 0.0


def _as_matrix(M, n, name) -> np.ndarray:
    M = np.array(M, dtype=float)
    if M.shape != (n, n):
        raise InvalidProblem(f"{name} must be {n}x{n}, got {M.shape}")
    if not np.allclose(M, M.T, atol=SYM_TOL, rtol=0):
        raise InvalidProblem(f"{name} is not symmetric to {SYM_TOL:g}")
    return 0.5 * (M + M.T)


@dataclasses.dataclass(frozen=True)
class QcqpProblem:
    P0: np.ndarray
    q0: np.ndarray | None = None
    r0: float = 0.0
    constraints: tuple[QuadraticConstraint, ...] = ()
    A: np.ndarray | None = None
    b: np.ndarray | None = None
    lmi: tuple[HermitianBlock, ...] = ()
    toeplitz: tuple[ToeplitzConstraintSet, ...] = ()

    def __post_init__(self):
        P0 = np.array(self.P0, dtype=float)
        if P0.ndim != 2:
            raise InvalidProblem("P0 must be a square matrix")
        n = P0.shape[0]
        object.__setattr__(self, "P0", _as_matrix(P0, n, "P0"))
        q0 = np.zeros(n) if self.q0 is None else np.array(self.q0, dtype=float).ravel()
        if q0.shape != (n,):
            raise InvalidProblem("q0 must have length n")
        object.__setattr__(self, "q0", q0)
        object.__setattr__(self, "r0", float(self.r0))

        cons = []
        for l, con in enumerate(self.constraints):
            if not isinstance(con, QuadraticConstraint):
                con = QuadraticConstraint(*con)
            q = np.array(con.q, dtype=float).ravel()
            if q.shape != (n,):
                raise InvalidProblem(f"q of constraint {l} must have length n")
            cons.append(QuadraticConstraint(_as_matrix(con.P, n, f"P of constraint {l}"), q, float(con.r)))
        object.__setattr__(self, "constraints", tuple(cons))

        if (self.A is None) != (self.b is None):
            raise InvalidProblem("A and b must be given together")
        if self.A is not None:
            A = np.atleast_2d(np.array(self.A, dtype=float))
            b = np.array(self.b, dtype=float).ravel()
            if A.shape[1] != n or b.shape != (A.shape[0],):
                raise InvalidProblem(f"A must be m x {n} with b of length m")
            object.__setattr__(self, "A", A)
            object.__setattr__(self, "b", b)

        if self.lmi:
            blocks = tuple(h if isinstance(h, HermitianBlock) else HermitianBlock(h) for h in self.lmi)
            if len(blocks) != n + 1:
                raise InvalidProblem(f"LMI needs H0..H{n}, got {len(blocks)} matrices")
            if len({h.dim for h in blocks}) != 1:
                raise InvalidProblem("LMI matrices differ in dimension")
            object.__setattr__(self, "lmi", blocks)

        for tcs in self.toeplitz:
            if tcs.weights is not None and 2 * tcs.order != n:
                raise InvalidProblem("weighted Toeplitz constraints need n = 2 * order")
        object.__setattr__(self, "toeplitz", tuple(self.toeplitz))

    @property
    def n(self) -> int:
        return self.P0.shape[0]

    @property
    def m(self) -> int:
        return 0 if self.A is None else self.A.shape[0]

    def objective(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ self.P0 @ x + 2.0 * self.q0 @ x + self.r0)

    def relaxed_objective(self, x: np.ndarray, X: np.ndarray) -> float:
        return float(np.sum(self.P0 * X) + 2.0 * self.q0 @ x + self.r0)

    def a_rank(self) -> int:
        if self.A is None:
            return 0
        sv = np.linalg.svd(self.A, compute_uv=False)
        return int(np.sum(sv > RANK_TOL * sv[0])) if sv.size and sv[0] > 0 else 0

    def to_json(self) -> dict:
        def herm(h):
            return [[[z.real, z.imag] for z in row] for row in h.entries]
        out = {
            "P0": self.P0.tolist(), "q0": self.q0.tolist(), "r0": self.r0,
            "constraints": [{"P": c.P.tolist(), "q": c.q.tolist(), "r": c.r} for c in self.constraints],
            "lmi": [herm(h) for h in self.lmi],
        }
        if self.A is not None:
            out["A"] = self.A.tolist()
            out["b"] = self.b.tolist()
        return out

    @classmethod
    def from_json(cls, data: dict) -> "QcqpProblem":
        def herm(rows):
            return HermitianBlock(np.array([[complex(re, im) for re, im in row] for row in rows]))
        cons = tuple(QuadraticConstraint(np.array(c["P"]), np.array(c["q"]), float(c.get("r", 0.0)))
                     for c in data.get("constraints", []))
        return cls(
            P0=np.array(data["P0"], dtype=float),
            q0=None if data.get("q0") is None else np.array(data["q0"], dtype=float),
            r0=float(data.get("r0", 0.0)),
            constraints=cons,
            A=None if data.get("A") is None else np.array(data["A"], dtype=float),
            b=None if data.get("b") is None else np.array(data["b"], dtype=float),
            lmi=tuple(herm(h) for h in data.get("lmi", [])),
        )


def _add_lmi(builder: ProgramBuilder, problem: QcqpProblem, xs: list) -> None:
    H = [h.entries for h in problem.lmi]
    k = H[0].shape[0]
    if all(np.all(h.imag == 0.0) for h in H):
        S = builder.add_psd(k)
        for p in range(k):
            for q in range(p + 1):
                terms = [(S.entry(p, q), 1.0)] + [(xs[j], -H[j + 1][p, q].real) for j in range(problem.n)]
                builder.add_row(terms, H[0][p, q].real)
        return
    # Hermitian slack through the lift (Z11 + Z22) + i (Z21 - Z12)
    Z = builder.add_psd(2 * k)
    for p in range(k):
        for q in range(p + 1):
            re = [(Z.entry(p, q), 1.0), (Z.entry(k + p, k + q), 1.0)]
            re += [(xs[j], -H[j + 1][p, q].real) for j in range(problem.n)]
            builder.add_row(re, H[0][p, q].real)
            if p != q:
                im = [(Z.entry(k + p, q), 1.0), (Z.entry(p, k + q), -1.0)]
                im += [(xs[j], -H[j + 1][p, q].imag) for j in range(problem.n)]
                builder.add_row(im, H[0][p, q].imag)


def lifted_indices(problem: QcqpProblem) -> np.ndarray:
    """Variables that need a row and column in X.

    A variable that appears in no quadratic form and has a zero column in A
    enters the relaxation only linearly; completing ``X[:, j] = x x_j`` maps
    any relaxed point of the reduced program to one of the full relaxation
    with the same objective, so such variables are kept out of the lifted
    block.  Without this a zero-cost recession direction of X removes the
    interior of the dual feasible set.
    """
    used = np.any(problem.P0 != 0.0, axis=0)
    for con in problem.constraints:
        used |= np.any(con.P != 0.0, axis=0)
    if problem.A is not None:
        used |= np.any(problem.A != 0.0, axis=0)
    return np.flatnonzero(used)


def relax(problem: QcqpProblem) -> ConicProgram:
    """Enhanced semidefinite relaxation as a standard-form conic program.

    Block 0 is ``Y = [[X, x], [x^T, 1]]`` over :func:`lifted_indices`; block 1
    (present only if some variable is not lifted) holds the remaining x as
    free scalars.  Further blocks hold inequality slacks, the LMI slack and
    the Toeplitz certificates.  The program's optimal value is the relaxed
    optimum including ``r0``.
    """
    n, m = problem.n, problem.m
    if m and problem.a_rank() < m:
        warnings.warn(f"A has numerical rank {problem.a_rank()} < {m} rows", RankDeficientA, stacklevel=2)
    lifted = lifted_indices(problem)
    L = lifted.size
    pos = {int(v): k for k, v in enumerate(lifted)}
    b = ProgramBuilder()
    Y = b.add_psd(L + 1)
    linear = [j for j in range(n) if j not in pos]
    free = b.add_free(len(linear)) if linear else None
    xs = [Y.entry(L, pos[j]) if j in pos else free.var(linear.index(j)) for j in range(n)]

    def quad_terms(P):
        Pl = P[np.ix_(lifted, lifted)]
        return [(Y.entry(i, j), Pl[i, j] if i == j else 2.0 * Pl[i, j])
                for i in range(L) for j in range(i + 1) if Pl[i, j] != 0.0]

    b.add_row([(Y.entry(L, L), 1.0)], 1.0)
    for var, coef in quad_terms(problem.P0):
        b.add_cost(var, coef)
    for i in range(n):
        if problem.q0[i] != 0.0:
            b.add_cost(xs[i], 2.0 * problem.q0[i])
    b.offset = problem.r0

    if problem.constraints:
        slack = b.add_nonneg(len(problem.constraints))
        for l, con in enumerate(problem.constraints):
            terms = quad_terms(con.P) + [(xs[i], 2.0 * con.q[i]) for i in range(n)]
            terms.append((slack.var(l), 1.0))
            b.add_row(terms, -con.r)

    if m:
        A, rhs = problem.A, problem.b
        for k in range(m):
            b.add_row([(xs[i], A[k, i]) for i in range(n)], rhs[k])
        for k in range(m):
            for j in range(L):
                terms = [(Y.entry(i, j), A[k, lifted[i]]) for i in range(L)]
                terms.append((xs[lifted[j]], -rhs[k]))
                b.add_row(terms, 0.0)

    if problem.lmi:
        _add_lmi(b, problem, xs)
    for tcs in problem.toeplitz:
        add_toeplitz_certificate(b, tcs, x_vars=xs)
    return b.build()


@dataclasses.dataclass(frozen=True)
class SdrSolution:
    x_hat: np.ndarray
    X_hat: np.ndarray
    objective_value: float
    gap: float | None
    rank_defect: int
    finsler_rho: float | None
    result: SolverResult | None = dataclasses.field(default=None, repr=False, compare=False)

    def to_json(self) -> dict:
        return {
            "x_hat": self.x_hat.tolist(),
            "X_hat": self.X_hat.tolist(),
            "objective": self.objective_value,
            "gap": self.gap,
            "rank_defect": self.rank_defect,
            "finsler_rho": self.finsler_rho,
            "status": None if self.result is None else self.result.status.value,
        }


def extract(problem: QcqpProblem, program: ConicProgram, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Recover (x, X) from a primal point of :func:`relax`.

    Rows and columns of X for variables that were not lifted are filled by
    the rank-one completion ``X[:, j] = x x_j``.
    """
    n = problem.n
    lifted = lifted_indices(problem)
    L = lifted.size
    Y = program.block(z, 0)
    x = np.zeros(n)
    x[lifted] = Y[L, :L]
    rest = np.setdiff1d(np.arange(n), lifted)
    if rest.size:
        x[rest] = program.block(z, 1)
    X = np.outer(x, x)
    X[np.ix_(lifted, lifted)] = Y[:L, :L]
    return x, X


def solve_relaxation(problem: QcqpProblem, options: SolverOptions | None = None,
                     rank_tol: float = 1e-7) -> SdrSolution:
    """Solve the relaxation and attach the tightness certificates.

    Raises :class:`SolverFailure` unless the solver reports an optimal point.
    """
    for con in problem.constraints:
        if np.linalg.eigvalsh(con.P)[0] < -1e-12:
            warnings.warn("indefinite constraint matrix; a zero gap does not certify x_hat",
                          IndefiniteConstraint, stacklevel=2)
            break
    program = relax(problem)
    res = solve(program, options)
    if res.status != Status.OPTIMAL:
        raise SolverFailure(f"relaxation ended with status {res.status.value}", res)
    x, X = extract(problem, program, res.x)
    sol = SdrSolution(x, X, res.primal_objective, None, 0, finsler_rho(problem), res)
    try:
        g = gap(problem, sol)
    except ZeroDenominator:
        g = None
    return dataclasses.replace(sol, gap=g, rank_defect=rank_defect(problem, sol, rank_tol))


def gap(problem: QcqpProblem, sol: SdrSolution) -> float:
    """|tr(P0 X) - x^T P0 x| / |x^T P0 x|."""
    x, X = sol.x_hat, sol.X_hat
    den = float(x @ problem.P0 @ x)
    if den == 0.0:
        raise ZeroDenominator("x^T P0 x vanishes; relative gap undefined")
    return abs(float(np.sum(problem.P0 * X)) - den) / abs(den)


def rank_defect(problem: QcqpProblem, sol: SdrSolution, tol: float = 1e-7) -> int:
    """Numerical rank of ``X - x x^T``.

    Eigenvalues are counted above ``max(tol * lambda_max(X), 1e-9)``.
    """
    x, X = sol.x_hat, sol.X_hat
    D = X - np.outer(x, x)
    ev = np.linalg.eigvalsh(0.5 * (D + D.T))
    scale = float(np.max(np.abs(np.linalg.eigvalsh(X)))) if X.size else 0.0
    return int(np.sum(ev > max(tol * scale, RANK_FLOOR)))


def _lmin(M: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(M)[0])


def finsler_rho(problem: QcqpProblem, rho_max: float = RHO_MAX, tol: float = 1e-9) -> float | None:
    """Smallest rho (to bisection accuracy) with ``P0 + rho A^T A >= -tol``, or None.

    ``lambda_min(P0 + rho A^T A)`` is concave and nondecreasing in rho, so
    feasibility at ``rho_max`` decides existence and bisection finds the
    threshold.
    """
    P0 = problem.P0
    if _lmin(P0) >= -tol:
        return 0.0
    if problem.A is None:
        return None
    AtA = problem.A.T @ problem.A
    if _lmin(P0 + rho_max * AtA) < -tol:
        return None
    lo, hi = 0.0, rho_max
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _lmin(P0 + mid * AtA) >= -tol:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-12 * max(1.0, hi):
            break
    return hi


def verify_ordering(problem: QcqpProblem, sol: SdrSolution, primal_oracle_value: float,
                    tol: float = 1e-6) -> bool:
    """True iff the primal oracle value is not below the relaxed optimum (minus tol)."""
    return bool(primal_oracle_value >= sol.objective_value - tol)


def lift_point(problem: QcqpProblem, x: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """The rank-one pair (x, x x^T) used to embed primal points in the relaxation."""
    x = np.asarray(x, dtype=float)
    return x, np.outer(x, x)
