import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from wulffsdp import shapes
from wulffsdp.anisotropy import AnisotropyFunction

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

EPS3 = 0.99 / 8

# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE: list[str] = []


def record(number: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"acceptance {number:2d} {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
    print(line)
    ACCEPTANCE.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def kobayashi():
    return AnisotropyFunction.kobayashi(3, EPS3)


@pytest.fixture(scope="session")
def unit_circle():
    return shapes.circle(1.0, 1000)


@pytest.fixture(scope="session")
def dendrite_curve():
    return shapes.dendrite(1000)


def random_sigma(rng: np.random.Generator, modes: int, decay: float = 1.0) -> AnisotropyFunction:
    c = (rng.normal(size=modes) + 1j * rng.normal(size=modes)) / (1.0 + np.arange(modes)) ** decay
    c[0] = abs(c[0]) + 1.0
    return AnisotropyFunction(c)


def random_program(rng: np.random.Generator):
    """Random standard-form program with strictly feasible primal and dual points."""
    from wulffsdp.solver import Cone, ConicProgram, svec

    dims = [int(rng.integers(1, 4)) for _ in range(int(rng.integers(1, 3)))]
    no = int(rng.integers(0, 4))
    cones = [Cone("psd", d) for d in dims] + ([Cone("nonneg", no)] if no else [])
    n = sum(c.size for c in cones)
    m = int(rng.integers(1, n + 1))
    A = rng.normal(size=(m, n))
    z0, s0 = [], []
    for cone in cones:
        if cone.kind == "psd":
            for out in (z0, s0):
                B = rng.normal(size=(cone.dim, cone.dim))
                out.append(svec(B @ B.T + 0.1 * np.eye(cone.dim)))
        else:
            z0.append(rng.random(cone.dim) + 0.1)
            s0.append(rng.random(cone.dim) + 0.1)
    z0, s0 = np.concatenate(z0), np.concatenate(s0)
    y0 = rng.normal(size=m)
    return ConicProgram(c=A.T @ y0 + s0, A=A, b=A @ z0, cones=tuple(cones))


def box_qcqp(rng: np.random.Generator, n: int, m: int = 0, convex: bool = False):
    """Random QCQP over the box |x_i| <= 1 (as x_i^2 <= 1) with m consistent equalities."""
    from wulffsdp.qcqp import QcqpProblem, QuadraticConstraint

    B = rng.normal(size=(n, n))
    P0 = B @ B.T if convex else 0.5 * (B + B.T)
    cons = tuple(QuadraticConstraint(np.diag(np.eye(n)[i]), np.zeros(n), -1.0) for i in range(n))
    A = b = None
    if m:
        A = rng.normal(size=(m, n))
        b = A @ rng.uniform(-0.5, 0.5, size=n)
    return QcqpProblem(P0=P0, q0=rng.normal(size=n), constraints=cons, A=A, b=b)


def box_grid_minimum(problem, step: float = 1e-3) -> float:
    """Brute-force minimum over the box, for m = 0 (n <= 3) or n = 2, m = 1."""
    n, m = problem.n, problem.m
    if m == 0:
        h = step if n <= 2 else max(step, 1e-2)
        axis = np.linspace(-1.0, 1.0, int(round(2.0 / h)) + 1)
        pts = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)
    elif n == 2 and m == 1:
        a, beta = problem.A[0], problem.b[0]
        x0 = a * beta / (a @ a)
        d = np.array([-a[1], a[0]]) / np.linalg.norm(a)
        t = np.arange(-3.0, 3.0 + step, step)
        pts = x0[None, :] + t[:, None] * d[None, :]
        pts = pts[np.all(np.abs(pts) <= 1.0, axis=1)]
    else:
        raise ValueError("grid oracle supports m = 0 or (n, m) = (2, 1)")
    vals = np.einsum("ij,jk,ik->i", pts, problem.P0, pts) + 2.0 * pts @ problem.q0 + problem.r0
    return float(vals.min())


def random_star(seed: int, K: int = 60):
    """Star-shaped (hence simple) polygon with random radii."""
    from wulffsdp.curve import load_curve

    rng = np.random.default_rng(seed)
    u = np.linspace(0, 2 * np.pi, K, endpoint=False)
    r = 1.0 + 0.3 * rng.random(K)
    return load_curve(np.column_stack([r * np.cos(u), r * np.sin(u)]))
