"""Standard-form conic programs and a small builder for assembling them.

Problems are stored in the primal standard form::

    minimize    c^T z + offset
    subject to  A z = b,   z in K

where ``K`` is a product of free blocks, nonnegative orthants and PSD cones.
A PSD block of order ``d`` is scalarized by :func:`svec` (lower triangle,
row-major, off-diagonal entries scaled by sqrt(2)) so that the Euclidean
inner product of two scalarized blocks equals the trace inner product.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Iterable, Sequence

import numpy as np

SQRT2 = math.sqrt(2.0)

FREE = "free"
NONNEG = "nonneg"
PSD = "psd"


def svec_size(d: int) -> int:
    return d * (d + 1) // 2


def _tril(d: int):
    return np.tril_indices(d)


def svec(mat: np.ndarray) -> np.ndarray:
    """Symmetric matrix -> scaled lower-triangular vector."""
    mat = np.asarray(mat, dtype=float)
    d = mat.shape[0]
    rows, cols = _tril(d)
    v = mat[rows, cols].copy()
    v[rows != cols] *= SQRT2
    return v


def smat(vec: np.ndarray, d: int | None = None) -> np.ndarray:
    """Inverse of :func:`svec`."""
    vec = np.asarray(vec, dtype=float)
    if d is None:
        d = int(round((math.sqrt(8 * vec.size + 1) - 1) / 2))
    rows, cols = _tril(d)
    vals = vec.copy()
    vals[rows != cols] /= SQRT2
    out = np.zeros((d, d))
    out[rows, cols] = vals
    out[cols, rows] = vals
    return out


def smat_batch(rows_mat: np.ndarray, d: int) -> np.ndarray:
    """Apply :func:`smat` to every row of a 2-D array, returning (r, d, d)."""
    r = rows_mat.shape[0]
    tr, tc = _tril(d)
    vals = rows_mat.copy()
    vals[:, tr != tc] /= SQRT2
    out = np.zeros((r, d, d))
    out[:, tr, tc] = vals
    out[:, tc, tr] = vals
    return out


def _entry_index(d: int, i: int, j: int) -> int:
    if i < j:
        i, j = j, i
    return i * (i + 1) // 2 + j


@dataclasses.dataclass(frozen=True)
class Cone:
    kind: str
    dim: int

    def __post_init__(self):
        if self.kind not in (FREE, NONNEG, PSD):
            raise ValueError(f"unknown cone kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("cone dimension must be positive")

    @property
    def size(self) -> int:
        """Number of scalar variables the block occupies."""
        return svec_size(self.dim) if self.kind == PSD else self.dim

    @property
    def degree(self) -> int:
        return 0 if self.kind == FREE else self.dim


@dataclasses.dataclass(frozen=True)
class ConicProgram:
    """A conic program in standard form.  ``A`` is dense (m x total size)."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    cones: tuple[Cone, ...]
    offset: float = 0.0

    def __post_init__(self):
        n = sum(k.size for k in self.cones)
        if self.c.shape != (n,):
            raise ValueError(f"cost has shape {self.c.shape}, cones need ({n},)")
        if self.A.ndim != 2 or self.A.shape[1] != n:
            raise ValueError(f"A has shape {self.A.shape}, expected (m, {n})")
        if self.b.shape != (self.A.shape[0],):
            raise ValueError("b does not match the number of rows of A")

    @property
    def num_vars(self) -> int:
        return self.c.size

    @property
    def num_rows(self) -> int:
        return self.A.shape[0]

    def slices(self) -> list[slice]:
        out, start = [], 0
        for cone in self.cones:
            out.append(slice(start, start + cone.size))
            start += cone.size
        return out

    def block(self, z: np.ndarray, index: int) -> np.ndarray:
        """Extract block ``index`` of a scalarized point (matrix for PSD blocks)."""
        sl = self.slices()[index]
        cone = self.cones[index]
        if cone.kind == PSD:
            return smat(z[sl], cone.dim)
        return np.asarray(z[sl]).copy()

    def in_cone(self, z: np.ndarray, tol: float = 0.0) -> bool:
        for sl, cone in zip(self.slices(), self.cones):
            if cone.kind == NONNEG and np.min(z[sl]) < -tol:
                return False
            if cone.kind == PSD and np.linalg.eigvalsh(smat(z[sl], cone.dim))[0] < -tol:
                return False
        return True


@dataclasses.dataclass(frozen=True)
class Block:
    """Handle returned by :class:`ProgramBuilder` for one cone block."""

    index: int
    kind: str
    dim: int
    start: int

    def var(self, i: int) -> tuple[int, float]:
        if self.kind == PSD:
            raise TypeError("use entry(i, j) for PSD blocks")
        if not 0 <= i < self.dim:
            raise IndexError(i)
        return self.start + i, 1.0

    def entry(self, i: int, j: int) -> tuple[int, float]:
        """Column and multiplier such that X[i, j] = multiplier * z[column]."""
        if self.kind != PSD:
            raise TypeError("entry() only applies to PSD blocks")
        if not (0 <= i < self.dim and 0 <= j < self.dim):
            raise IndexError((i, j))
        col = self.start + _entry_index(self.dim, i, j)
        return col, (1.0 if i == j else 1.0 / SQRT2)


class ProgramBuilder:
    """Incrementally assemble a :class:`ConicProgram`.

    Variables are referenced through ``(column, multiplier)`` pairs produced by
    :meth:`Block.var` and :meth:`Block.entry`; every coefficient passed in is a
    coefficient on the *matrix entry* (or scalar), never on the raw svec slot.
    """

    def __init__(self):
        self._cones: list[Cone] = []
        self._size = 0
        self._rows: list[dict[int, float]] = []
        self._rhs: list[float] = []
        self._cost: dict[int, float] = {}
        self.offset = 0.0

    def _add(self, kind: str, dim: int) -> Block:
        cone = Cone(kind, dim)
        blk = Block(len(self._cones), kind, dim, self._size)
        self._cones.append(cone)
        self._size += cone.size
        return blk

    def add_free(self, dim: int) -> Block:
        return self._add(FREE, dim)

    def add_nonneg(self, dim: int) -> Block:
        return self._add(NONNEG, dim)

    def add_psd(self, dim: int) -> Block:
        return self._add(PSD, dim)

    def add_row(self, terms: Iterable[tuple[tuple[int, float], float]], rhs: float = 0.0) -> int:
        """Add the equation sum(coef * var) == rhs and return its row index."""
        row: dict[int, float] = {}
        for (col, mult), coef in terms:
            if coef == 0.0:
                continue
            row[col] = row.get(col, 0.0) + coef * mult
        self._rows.append(row)
        self._rhs.append(float(rhs))
        return len(self._rows) - 1

    def add_cost(self, var: tuple[int, float], coef: float) -> None:
        col, mult = var
        self._cost[col] = self._cost.get(col, 0.0) + coef * mult

    def build(self) -> ConicProgram:
        n = self._size
        A = np.zeros((len(self._rows), n))
        for r, row in enumerate(self._rows):
            for col, val in row.items():
                A[r, col] = val
        c = np.zeros(n)
        for col, val in self._cost.items():
            c[col] = val
        return ConicProgram(c=c, A=A, b=np.asarray(self._rhs, dtype=float),
                            cones=tuple(self._cones), offset=float(self.offset))
