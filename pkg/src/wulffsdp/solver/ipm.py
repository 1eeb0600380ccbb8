"""Primal-dual interior-point method on the homogeneous self-dual embedding.

The embedding solved here is::

    A z - b tau            = 0
    -A^T y - s + c tau     = 0
    b^T y - c^T z - kappa  = 0
    z in K, s in K*, tau >= 0, kappa >= 0

Search directions use Nesterov-Todd scaling for the PSD and orthant blocks
and a Mehrotra predictor-corrector.  Free variables have a zero dual slack
and enter the Newton system through a bordered (quasi-definite) KKT matrix.
Everything is dense.
"""

from __future__ import annotations

import dataclasses
import enum
import logging
import math

import numpy as np
import scipy.linalg as sla

from .program import FREE, NONNEG, PSD, ConicProgram, smat, smat_batch, svec

logger = logging.getLogger(__name__)

# exponents k of the relative shifts reg * 10**k tried when Cholesky fails
RELATIVE_SHIFTS = (-4, -2, 0, 2)


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    MAX_ITER = "max_iter"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclasses.dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-8
    max_iter: int = 200
    verbosity: int = 0
    step_fraction: float = 0.99
    regularization: float = 1e-10
    refinement_steps: int = 3


@dataclasses.dataclass
class SolverResult:
    """Outcome of :func:`solve`.

    For ``status == optimal`` the fields ``x``, ``y``, ``s`` hold the primal
    point, the equality multipliers and the dual slack.  For ``infeasible``
    they hold a Farkas ray (``b^T y = 1``, ``A^T y + s ~ 0``); for ``unbounded``
    ``x`` is a primal ray with ``c^T x = -1``.
    """

    x: np.ndarray
    y: np.ndarray
    s: np.ndarray
    status: Status
    primal_objective: float
    dual_objective: float
    iterations: int
    residuals: tuple[float, float, float]
    history: list[dict] = dataclasses.field(default_factory=list)
    dropped_rows: tuple[int, ...] = ()

    @property
    def optimal(self) -> bool:
        return self.status == Status.OPTIMAL


def residuals(program: ConicProgram, result: SolverResult) -> tuple[float, float, float]:
    """Primal, dual and relative-gap residuals recomputed from the stored point."""
    return _metrics(program.A, program.b, program.c, result.x, result.y, result.s)


def _metrics(A, b, c, x, y, s):
    pres = float(np.linalg.norm(A @ x - b) / (1.0 + np.linalg.norm(b)))
    dres = float(np.linalg.norm(A.T @ y + s - c) / (1.0 + np.linalg.norm(c)))
    pobj, dobj = float(c @ x), float(b @ y)
    gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
    return pres, dres, float(gap)


# ---------------------------------------------------------------------------
# presolve

def _presolve(A: np.ndarray, b: np.ndarray, tol: float = 1e-11):
    """Drop linearly dependent rows.

    Returns ``(keep, ray)`` where ``ray`` is a Farkas vector (``A^T ray = 0``,
    ``b^T ray = 1``) when the dropped rows are inconsistent, else ``None``.
    """
    m = A.shape[0]
    if m == 0:
        return np.arange(0), None
    _, R, piv = sla.qr(A.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(diag > tol * diag[0]))
    keep = np.sort(piv[:rank])
    drop = np.sort(piv[rank:])
    if drop.size == 0:
        return keep, None
    logger.warning("presolve: dropping %d linearly dependent equality rows", drop.size)
    Ak = A[keep]
    for i in drop:
        w, *_ = np.linalg.lstsq(Ak.T, A[i], rcond=None)
        mismatch = b[i] - w @ b[keep]
        scale = 1.0 + abs(b[i]) + np.abs(w) @ np.abs(b[keep])
        if abs(mismatch) > 1e-9 * scale:
            ray = np.zeros(m)
            ray[i] = 1.0
            ray[keep] = -w
            return keep, ray / mismatch
    return keep, None


# ---------------------------------------------------------------------------
# cone bookkeeping

class _PsdBlock:
    def __init__(self, sl: slice, dim: int, A: np.ndarray):
        self.sl = sl
        self.dim = dim
        cols = A[:, sl]
        self.rows = np.flatnonzero(np.any(cols != 0.0, axis=1))
        self.mats = smat_batch(cols[self.rows], dim) if self.rows.size else None
        self.G = np.eye(dim)
        self.Ginv = np.eye(dim)
        self.lam = np.ones(dim)

    def W(self):
        return self.G @ self.G.T


def _sym(m):
    return 0.5 * (m + m.T)


def _max_step_psd(lam, dxt):
    """Largest alpha with diag(lam) + alpha * dxt PSD (inf if unbounded)."""
    r = 1.0 / np.sqrt(lam)
    ev = np.linalg.eigvalsh(_sym(dxt * r[:, None] * r[None, :]))[0]
    return math.inf if ev >= 0 else -1.0 / ev


def _max_step_vec(v, dv):
    neg = dv < 0
    if not np.any(neg):
        return math.inf
    return float(np.min(-v[neg] / dv[neg]))


# ---------------------------------------------------------------------------

def solve(program: ConicProgram, options: SolverOptions | None = None, **overrides) -> SolverResult:
    """Solve ``program``; keyword overrides (``tol``, ``max_iter``...) patch ``options``."""
    opts = options or SolverOptions()
    if overrides:
        opts = dataclasses.replace(opts, **overrides)
    return _Solver(program, opts).run()


def _nt_scaling(Z: np.ndarray, S: np.ndarray):
    """NT scaling G with G^-1 Z G^-T = G^T S G = diag(lam).

    Raises LinAlgError when either matrix is not numerically positive definite.
    """
    L = np.linalg.cholesky(Z)
    R = np.linalg.cholesky(S)
    _, D, Vt = np.linalg.svd(R.T @ L)
    if D[-1] <= 0.0:
        raise np.linalg.LinAlgError("NT scaling is singular")
    rD = 1.0 / np.sqrt(D)
    G = (L @ Vt.T) * rD[None, :]
    Ginv = (Vt * np.sqrt(D)[:, None]) @ sla.solve_triangular(L, np.eye(Z.shape[0]), lower=True)
    return G, Ginv, D


class _Solver:
    def __init__(self, program: ConicProgram, opts: SolverOptions):
        self.program = program
        self.opts = opts
        self.m_full = program.num_rows
        keep, ray = _presolve(program.A, program.b)
        self.keep = keep
        self.dropped = tuple(int(i) for i in np.setdiff1d(np.arange(self.m_full), keep))
        self.farkas = ray
        self.A = program.A[keep]
        self.b = program.b[keep]
        self.c = program.c

        n = program.num_vars
        free_mask = np.zeros(n, dtype=bool)
        orth_mask = np.zeros(n, dtype=bool)
        self.psd: list[_PsdBlock] = []
        for sl, cone in zip(program.slices(), program.cones):
            if cone.kind == FREE:
                free_mask[sl] = True
            elif cone.kind == NONNEG:
                orth_mask[sl] = True
            else:
                self.psd.append(_PsdBlock(sl, cone.dim, self.A))
        self.free = np.flatnonzero(free_mask)
        self.orth = np.flatnonzero(orth_mask)
        self.cone_mask = ~free_mask
        self.nu = sum(cone.degree for cone in program.cones)
        self.Af = self.A[:, self.free]
        self.Ao = self.A[:, self.orth]
        self.cc = np.where(self.cone_mask, self.c, 0.0)

    # -- point helpers ------------------------------------------------------

    def _identity_point(self):
        z = np.zeros(self.program.num_vars)
        z[self.orth] = 1.0
        for blk in self.psd:
            z[blk.sl] = svec(np.eye(blk.dim))
        return z

    def _result(self, status, x, y, s, it, history):
        yfull = np.zeros(self.m_full)
        yfull[self.keep] = y
        prog = self.program
        pres, dres, gap = _metrics(prog.A, prog.b, prog.c, x, yfull, s)
        return SolverResult(
            x=x, y=yfull, s=s, status=status,
            primal_objective=float(prog.c @ x + prog.offset),
            dual_objective=float(prog.b @ yfull + prog.offset),
            iterations=it, residuals=(pres, dres, gap), history=history,
            dropped_rows=self.dropped,
        )

    # -- scaling operators --------------------------------------------------

    def _set_scaling(self, z, s):
        """Recompute NT scalings from the current explicit iterate."""
        if self.orth.size:
            xo, so = z[self.orth], s[self.orth]
            if np.any(xo <= 0) or np.any(so <= 0):
                raise np.linalg.LinAlgError("orthant iterate left the interior")
            self.g2 = xo / so
            self.g = np.sqrt(self.g2)
            self.lam_o = np.sqrt(xo * so)
        else:
            self.g2 = self.g = self.lam_o = np.zeros(0)
        for blk in self.psd:
            blk.G, blk.Ginv, blk.lam = _nt_scaling(smat(z[blk.sl], blk.dim), smat(s[blk.sl], blk.dim))
        self.Ws = [blk.W() for blk in self.psd]

    def _apply_W(self, v):
        """Apply the NT scaling W (x = W s) to a cone-space vector."""
        out = np.zeros_like(v)
        out[self.orth] = self.g2 * v[self.orth]
        for blk, W in zip(self.psd, self.Ws):
            out[blk.sl] = svec(W @ smat(v[blk.sl], blk.dim) @ W)
        return out

    def _schur(self):
        m = self.A.shape[0]
        M = np.zeros((m, m))
        if self.orth.size:
            M += (self.Ao * self.g2) @ self.Ao.T
        for blk in self.psd:
            if blk.mats is None:
                continue
            B = np.matmul(blk.G.T, np.matmul(blk.mats, blk.G))
            Bf = B.reshape(B.shape[0], -1)
            M[np.ix_(blk.rows, blk.rows)] += Bf @ Bf.T
        return _sym(M)

    def _factor(self):
        """Factor the (bordered) Newton matrix after symmetric diagonal equilibration."""
        M = self._schur()
        m = M.shape[0]
        nf = self.free.size
        reg = self.opts.regularization
        dm = np.diag(M).copy()
        dm[~(dm > 0)] = 1.0
        dy = 1.0 / np.sqrt(dm)
        if nf == 0:
            K = M * dy[:, None] * dy[None, :]
            self.K, self.scale = K, dy
            # shift M by reg * I first; near-singular K falls back to growing
            # relative shifts, which iterative refinement then corrects
            for shift in [reg * dy ** 2] + [reg * 10.0 ** k for k in RELATIVE_SHIFTS]:
                try:
                    self.fact = ("chol", sla.cho_factor(K + np.diag(np.broadcast_to(shift, (m,))),
                                                        lower=True, check_finite=False))
                    return
                except np.linalg.LinAlgError:
                    continue
            self.fact = ("lu", sla.lu_factor(K + np.diag(reg * dy ** 2), check_finite=False))
            return
        Afs = self.Af * dy[:, None]
        cn = np.sqrt(np.sum(Afs ** 2, axis=0))
        cn[~(cn > 0)] = 1.0
        df = 1.0 / cn
        K = np.zeros((m + nf, m + nf))
        K[:m, :m] = M * dy[:, None] * dy[None, :]
        K[:m, m:] = Afs * df[None, :]
        K[m:, :m] = K[:m, m:].T
        self.K, self.scale = K, np.concatenate([dy, df])
        Kreg = K.copy()
        Kreg[np.arange(m), np.arange(m)] += reg
        Kreg[np.arange(m, m + nf), np.arange(m, m + nf)] -= reg
        self.fact = ("lu", sla.lu_factor(Kreg, check_finite=False))

    def _kkt_solve(self, rhs):
        kind, f = self.fact
        solver = (lambda r: sla.cho_solve(f, r, check_finite=False)) if kind == "chol" \
            else (lambda r: sla.lu_solve(f, r, check_finite=False))
        d = self.scale
        r = d * rhs
        sol = solver(r)
        res = r - self.K @ sol
        err = np.linalg.norm(res)
        # refine against the unshifted matrix and return the best iterate;
        # near a singular K the correction can grow along the null space
        best, best_err = sol, err
        for _ in range(self.opts.refinement_steps):
            sol = sol + solver(res)
            res = r - self.K @ sol
            err = np.linalg.norm(res)
            if not np.isfinite(err):
                break
            if err < best_err:
                best, best_err = sol, err
        return d * best

    # -- Newton step --------------------------------------------------------
    #
    # The linearized embedding solved for a direction (dz, dy, ds, dtau, dkappa):
    #   (P) A dz - b dtau               = p
    #   (D) c dtau - A^T dy - ds         = dd      (ds = 0 on free variables)
    #   (G) dkappa - b^T dy + c^T dz     = g
    #   (C) dz + W ds                    = rc      (cone variables)
    #   (T) kappa dtau + tau dkappa      = rt

    def _prepare(self, z, y, s):
        """Factor and solve for the tau column ``u2``.

        ``u2`` solves the system with right-hand side ``[b + A W c; c_f]``.
        Writing ``c = (A^T y + s + rd) / tau`` and using ``W s = z`` gives
        ``u2_y = y / tau + u`` where ``u`` has a well-scaled right-hand side;
        forming ``W c`` directly loses all digits near optimality.
        """
        m = self.A.shape[0]
        self._factor()
        tau = self.tau
        rdc = np.where(self.cone_mask, self.rd, 0.0) / tau
        zc = np.where(self.cone_mask, z, 0.0) / tau
        r2 = np.concatenate([self.b + self.A @ (zc + self._apply_W(rdc)), self.rd[self.free] / tau])
        u = self._kkt_solve(r2)
        if not np.all(np.isfinite(u)):
            raise np.linalg.LinAlgError("non-finite Newton solution")
        # c - A^T y / tau, the cost seen by the shifted tau column
        self.chat = np.where(self.cone_mask, s / tau + rdc, self.rd / tau)
        self.ybar = y / tau
        self.sbar = np.where(self.cone_mask, s, 0.0) / tau
        self.zbar_f = z[self.free] / tau
        self.rpbar = self.rp / tau
        self.rdbar = self.rd / tau
        w = np.where(self.cone_mask, self.A.T @ u[:m] - self.chat, 0.0)
        u[:m] += self.ybar
        self.u2 = u
        self.v2 = self._apply_W(w)
        # <w, W w> as a sum of squares; the expanded form cancels badly near optimality
        q = float(np.sum((self.g * w[self.orth]) ** 2))
        for blk in self.psd:
            q += float(np.sum((blk.G.T @ smat(w[blk.sl], blk.dim) @ blk.G) ** 2))
        self.wq = q

    def _linear_solve(self, p, dd, g, rc, rt):
        m = self.A.shape[0]
        ddc = np.where(self.cone_mask, dd, 0.0)
        t = rc + self._apply_W(ddc)
        r1 = np.concatenate([p - self.A @ t, -dd[self.free]])
        u1 = self._kkt_solve(r1)
        u1y, u1f = u1[:m], u1[m:]
        u2y, u2f = self.u2[:m], self.u2[m:]
        v1 = t + self._apply_W(self.A.T @ u1y)
        # b = (A z + rp) / tau and W^-1 z = s turn b.u1y - c_hat.v1 into terms
        # weighted by residuals or by t; the direct products cancel badly
        cm = self.cone_mask
        num = (g - rt / self.tau - self.ybar @ p - self.sbar[cm] @ t[cm]
               - self.zbar_f @ dd[self.free] + self.rpbar @ u1y
               - self.rdbar[cm] @ v1[cm] - self.rdbar[self.free] @ u1f)
        den = -self.kappa / self.tau - self.wq
        dtau = num / den
        dy = u1y + dtau * u2y
        dz = v1 + dtau * self.v2
        dz[self.free] = u1f + dtau * u2f
        ds = np.where(self.cone_mask, self.c * dtau - self.A.T @ dy - dd, 0.0)
        dkappa = (rt - self.kappa * dtau) / self.tau
        return dz, dy, ds, dtau, dkappa

    def _linear_residual(self, rhs, sol):
        p, dd, g, rc, rt = rhs
        dz, dy, ds, dtau, dkappa = sol
        A, b, c = self.A, self.b, self.c
        ep = p - (A @ dz - b * dtau)
        ed = dd - (c * dtau - A.T @ dy - ds)
        ed[self.free] = dd[self.free] - (c[self.free] * dtau - self.Af.T @ dy)
        eg = g - (dkappa - b @ dy + c @ dz)
        ec = np.where(self.cone_mask, rc - dz - self._apply_W(ds), 0.0)
        et = rt - (self.kappa * dtau + self.tau * dkappa)
        return ep, ed, eg, ec, et

    def _newton(self, Q_orth, Q_psd, eta, rtau):
        """Solve the linearized embedding for given scaled complementarity targets,
        with iterative refinement on the full system."""
        rc = np.zeros(self.program.num_vars)
        if self.orth.size:
            rc[self.orth] = self.g * Q_orth
        for blk, Q in zip(self.psd, Q_psd):
            rc[blk.sl] = svec(blk.G @ Q @ blk.G.T)
        rhs = (eta * self.rp, -eta * self.rd, -eta * self.rg, rc, rtau)
        # blockwise relative error: the rc block dwarfs p near optimality
        norms = [float(np.linalg.norm(r)) for r in rhs]
        floor = 1e-14 * (1.0 + max(norms))
        def measure(err):
            return max(float(np.linalg.norm(e)) / (n + floor) for e, n in zip(err, norms))

        sol = self._linear_solve(*rhs)
        err = self._linear_residual(rhs, sol)
        best, best_err = sol, measure(err)
        for _ in range(self.opts.refinement_steps):
            corr = self._linear_solve(*err)
            sol = tuple(a + b for a, b in zip(sol, corr))
            err = self._linear_residual(rhs, sol)
            e = measure(err)
            if not np.isfinite(e):
                break
            if e < best_err:
                best, best_err = sol, e
        dz, dy, ds, dtau, dkappa = best
        # scaled directions for step-length and corrector computations
        dst_o = self.g * ds[self.orth]
        dxt_o = dz[self.orth] / self.g if self.orth.size else np.zeros(0)
        dst_p, dxt_p = [], []
        for blk in self.psd:
            dst_p.append(_sym(blk.G.T @ smat(ds[blk.sl], blk.dim) @ blk.G))
            dxt_p.append(_sym(blk.Ginv @ smat(dz[blk.sl], blk.dim) @ blk.Ginv.T))
        return dict(dz=dz, dy=dy, ds=ds, dtau=dtau, dkappa=dkappa,
                    dxt_o=dxt_o, dst_o=dst_o, dxt_p=dxt_p, dst_p=dst_p)

    def _max_step(self, d):
        alpha = math.inf
        if self.orth.size:
            alpha = min(alpha, _max_step_vec(self.lam_o, d["dxt_o"]), _max_step_vec(self.lam_o, d["dst_o"]))
        for blk, dxt, dst in zip(self.psd, d["dxt_p"], d["dst_p"]):
            alpha = min(alpha, _max_step_psd(blk.lam, dxt), _max_step_psd(blk.lam, dst))
        alpha = min(alpha, _max_step_vec(np.array([self.tau, self.kappa]),
                                         np.array([d["dtau"], d["dkappa"]])))
        return alpha

    def _complementarity(self, alpha=0.0, d=None):
        """Scaled complementarity ((z, s) + tau kappa) / (nu + 1) along a direction."""
        total = 0.0
        if d is None:
            total = float(self.lam_o @ self.lam_o) + sum(float(blk.lam @ blk.lam) for blk in self.psd)
            return (total + self.tau * self.kappa) / (self.nu + 1)
        if self.orth.size:
            total += float((self.lam_o + alpha * d["dxt_o"]) @ (self.lam_o + alpha * d["dst_o"]))
        for blk, dxt, dst in zip(self.psd, d["dxt_p"], d["dst_p"]):
            X = np.diag(blk.lam) + alpha * dxt
            S = np.diag(blk.lam) + alpha * dst
            total += float(np.sum(X * S))
        tk = (self.tau + alpha * d["dtau"]) * (self.kappa + alpha * d["dkappa"])
        return (total + tk) / (self.nu + 1)

    # -- main loop ----------------------------------------------------------

    def run(self) -> SolverResult:
        opts = self.opts
        n = self.program.num_vars
        m = self.A.shape[0]
        history: list[dict] = []

        if self.farkas is not None:
            return SolverResult(
                x=np.zeros(n), y=self.farkas, s=np.zeros(n), status=Status.INFEASIBLE,
                primal_objective=math.inf, dual_objective=math.inf, iterations=0,
                residuals=(math.inf, math.inf, math.inf), history=history,
                dropped_rows=self.dropped)

        z = self._identity_point()
        s = self._identity_point()
        y = np.zeros(m)
        self.tau, self.kappa = 1.0, 1.0
        A, b, c = self.A, self.b, self.c
        nb, nc = np.linalg.norm(b), np.linalg.norm(c)
        status = Status.MAX_ITER
        it = 0
        best = None          # (merit, point, iteration)
        since_best = 0

        while True:
            tau, kappa = self.tau, self.kappa
            self.rp = b * tau - A @ z
            self.rd = c * tau - A.T @ y - s
            self.rd[self.free] = c[self.free] * tau - self.Af.T @ y
            self.rg = kappa - b @ y + c @ z

            pres = np.linalg.norm(self.rp) / tau / (1.0 + nb)
            dres = np.linalg.norm(self.rd) / tau / (1.0 + nc)
            pobj, dobj = c @ z / tau, b @ y / tau
            rgap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
            merit = max(pres, dres, rgap)
            if best is None or merit < best[0]:
                best = (merit, (z, y, s, tau), it)
                since_best = 0
            else:
                since_best += 1

            try:
                self._set_scaling(z, s)
                failure = None
            except np.linalg.LinAlgError as exc:
                failure = exc
                mu = float(z[self.cone_mask] @ s[self.cone_mask] + tau * kappa) / (self.nu + 1)
            else:
                mu = self._complementarity()

            rec = dict(iter=it, mu=float(mu), pres=float(pres), dres=float(dres), gap=float(rgap),
                       pobj=float(pobj + self.program.offset), dobj=float(dobj + self.program.offset),
                       tau=float(tau), kappa=float(kappa))
            history.append(rec)
            if opts.verbosity:
                logger.info("iter %d: mu=%.3e pres=%.3e dres=%.3e gap=%.3e pobj=%.9e dobj=%.9e tau=%.3e kappa=%.3e",
                            it, mu, pres, dres, rgap, rec["pobj"], rec["dobj"], tau, kappa)

            if merit <= opts.tol:
                status = Status.OPTIMAL
                break
            by = b @ y
            if by > 0:
                ray_res = np.linalg.norm(A.T @ y + s) / by
                if ray_res <= opts.tol:
                    return self._result(Status.INFEASIBLE, z * 0.0, y / by, s / by, it, history)
            cz = c @ z
            if cz < 0:
                ray_res = np.linalg.norm(A @ z) / (-cz)
                if ray_res <= opts.tol:
                    return self._result(Status.UNBOUNDED, z / (-cz), y * 0.0, s * 0.0, it, history)
            if failure is not None:
                logger.warning("numerical failure at iteration %d: %s", it, failure)
                status = Status.NUMERICAL_FAILURE
                break
            if it >= opts.max_iter:
                status = Status.MAX_ITER
                break
            if since_best >= 10:
                logger.warning("no progress for %d iterations; stopping", since_best)
                status = Status.NUMERICAL_FAILURE
                break

            try:
                step = self._iterate(mu, z, y, s)
            except (np.linalg.LinAlgError, FloatingPointError, ValueError) as exc:
                logger.warning("numerical failure at iteration %d: %s", it, exc)
                step = None
            if step is None:
                status = Status.NUMERICAL_FAILURE
                break
            dz, dy, ds, dtau, dkappa, alpha = step
            z = z + alpha * dz
            y = y + alpha * dy
            s = s + alpha * ds
            self.tau += alpha * dtau
            self.kappa += alpha * dkappa
            it += 1

        if status != Status.OPTIMAL and best is not None:
            z, y, s, tau = best[1]
            if best[0] <= opts.tol:
                status = Status.OPTIMAL
        else:
            tau = self.tau
        return self._result(status, z / tau, y / tau, s / tau, it, history)

    def _iterate(self, mu, z, y, s):
        opts = self.opts
        for blk in self.psd:
            assert np.all(blk.lam > 0), "iterate left the PSD cone interior"
        self._prepare(z, y, s)

        # predictor
        Qo = -self.lam_o
        Qp = [-np.diag(blk.lam) for blk in self.psd]
        aff = self._newton(Qo, Qp, 1.0, -self.tau * self.kappa)
        alpha_a = min(1.0, self._max_step(aff))
        mu_a = self._complementarity(alpha_a, aff)
        sigma = float(np.clip(mu_a / mu, 0.0, 1.0) ** 3)

        # corrector
        smu = sigma * mu
        if self.orth.size:
            Qo = (smu - self.lam_o ** 2 - aff["dxt_o"] * aff["dst_o"]) / self.lam_o
        Qp = []
        for blk, dxt, dst in zip(self.psd, aff["dxt_p"], aff["dst_p"]):
            lam = blk.lam
            R = -_sym(dxt @ dst)
            R[np.diag_indices_from(R)] += smu - lam ** 2
            Qp.append(2.0 * R / (lam[:, None] + lam[None, :]))
        rtau = smu - self.tau * self.kappa - aff["dtau"] * aff["dkappa"]
        d = self._newton(Qo, Qp, 1.0 - sigma, rtau)
        amax = self._max_step(d)
        alpha = min(1.0, opts.step_fraction * amax)
        if not np.isfinite(alpha) or alpha <= 0:
            return None
        return d["dz"], d["dy"], d["ds"], d["dtau"], d["dkappa"], alpha
