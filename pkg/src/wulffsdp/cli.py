"""Command-line interface.

Subcommands::

    wulffsdp spectrum   --input curve.csv [--modes N] [--output spec.json]
    wulffsdp solve      --input curve.csv | --from-spectrum spec.json
                        [--modes N] [--constraint linear|quadratic] [--plot-dir DIR]
    wulffsdp check-cone --input sigma.json
    wulffsdp relax      --input qcqp.json
    wulffsdp eotc       --input curve.csv --modes 20,30,40

Exit codes: 0 success, 2 bad arguments or input, 3 solver failure,
4 certification failure (diagnostics are still written).  Errors go to
stderr as a single line ``error: <code>: <message>``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path
from typing import Any, Sequence

from . import io
from . import pipeline as pl
from .anisotropy import AnisotropyFunction
from .curve import CurveSpectrum, spectrum
from .errors import NegativeWulffArea, SolverFailure, WulffError
from .qcqp import QcqpProblem, solve_relaxation
from .solver import SolverOptions
from .trigcone import cone_membership

EXIT_OK = 0
EXIT_ARGS = 2
EXIT_SOLVER = 3
EXIT_CERT = 4

COMMANDS = ("spectrum", "solve", "check-cone", "relax", "eotc")
DEFAULTS = {"modes": "50", "constraint": pl.QUADRATIC, "samples": 360, "tol": 1e-8, "max_iter": 200}
MIN_SAMPLES = 16
CERT_GAP = pl.GAP_WARN


class UsageError(Exception):
    code = "BadArguments"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="wulffsdp", description="Optimal anisotropy functions via enhanced SDP relaxation.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", help="curve CSV, sigma JSON or QCQP JSON depending on the command")
    p.add_argument("--from-spectrum", dest="from_spectrum", help="spectrum JSON used instead of a curve")
    p.add_argument("--output", help="result file (JSON, or CSV for eotc); stdout summary only if omitted")
    p.add_argument("--modes", help="number of Fourier modes N (comma list for eotc)")
    p.add_argument("--constraint", choices=(pl.LINEAR, pl.QUADRATIC))
    p.add_argument("--samples", type=int, help="angular samples for plot data (>= 16)")
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.add_argument("--plot-dir", dest="plot_dir", help="directory for sigma/wulff/frank/kappa_inv CSVs")
    p.add_argument("--config", help="file of 'key = value' lines; flags take precedence")
    p.add_argument("-v", "--verbose", action="store_true", help="log solver iterations")
    return p


def read_config(path: str) -> dict[str, str]:
    out = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Merge config-file values and defaults into unset flags, then validate."""
    cfg = read_config(args.config) if args.config else {}
    known = set(vars(args))
    for key in cfg:
        if key not in known or key in ("command", "config"):
            raise UsageError(f"unknown config key {key!r}")
    casts = {"samples": int, "tol": float, "max_iter": int}
    for key, value in cfg.items():
        if getattr(args, key) is None:
            setattr(args, key, casts.get(key, str)(value))
    for key, value in DEFAULTS.items():
        if getattr(args, key) is None:
            setattr(args, key, value)
    if args.constraint not in (pl.LINEAR, pl.QUADRATIC):
        raise UsageError(f"constraint must be {pl.LINEAR} or {pl.QUADRATIC}")
    if args.samples < MIN_SAMPLES:
        raise UsageError(f"--samples must be >= {MIN_SAMPLES}")
    if not args.tol > 0:
        raise UsageError("--tol must be positive")
    if args.max_iter < 1:
        raise UsageError("--max-iter must be >= 1")
    try:
        args.mode_list = [int(v) for v in str(args.modes).split(",")]
    except ValueError:
        raise UsageError(f"bad --modes value {args.modes!r}") from None
    if args.command != "eotc" and len(args.mode_list) != 1:
        raise UsageError("--modes takes a single value for this command")
    if args.command == "solve" and args.mode_list[0] < 2:
        raise UsageError("solve needs --modes >= 2")
    if args.command == "eotc" and (len(args.mode_list) < 2 or sorted(set(args.mode_list)) != args.mode_list):
        raise UsageError("eotc needs an increasing --modes list of length >= 2")
    if args.command in ("solve", "eotc"):
        if (args.input is None) == (args.from_spectrum is None):
            raise UsageError("give exactly one of --input and --from-spectrum")
    elif args.input is None:
        raise UsageError("--input is required")
    return args


def _options(args) -> SolverOptions:
    return SolverOptions(tol=args.tol, max_iter=args.max_iter, verbosity=int(args.verbose))


def _spectrum(args, modes: int) -> CurveSpectrum:
    if args.from_spectrum is not None:
        spec = CurveSpectrum.from_json(io.read_json(args.from_spectrum))
        return spec.truncated(modes)
    return spectrum(io.read_curve_csv(args.input), modes)


def _fmt(v) -> str:
    if v is None:
        return "nan"
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def summary(objective, gap, rank_defect, ratio) -> str:
    return f"objective={_fmt(objective)} gap={_fmt(gap)} rank_defect={_fmt(rank_defect)} ratio={_fmt(ratio)}"


def _emit(args, data: Any) -> None:
    if args.output:
        io.write_json(args.output, data)


# ---------------------------------------------------------------------------

def cmd_spectrum(args) -> int:
    spec = spectrum(io.read_curve_csv(args.input), args.mode_list[0])
    _emit(args, spec.to_json())
    print(f"modes={spec.modes} length={spec.length:.10g} area={spec.enclosed_area:.10g}")
    return EXIT_OK


def cmd_solve(args) -> int:
    N = args.mode_list[0]
    spec = pl.AnisotropyProblemSpec(_spectrum(args, N), N, args.constraint, _options(args))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", pl.UncertifiedSolution)
        result = pl.solve_anisotropy(spec)
    _emit(args, result.to_json())
    if args.plot_dir:
        io.export_plot_data(result.sigma, args.samples, args.plot_dir)
    print(summary(result.objective, result.gap, result.rank_defect, result.anisoperimetric_ratio))
    if result.gap is not None and result.gap > CERT_GAP:
        print(f"error: Uncertified: relaxation gap {result.gap:.3e} exceeds {CERT_GAP:g}", file=sys.stderr)
        return EXIT_CERT
    return EXIT_OK


def cmd_check_cone(args) -> int:
    sigma = AnisotropyFunction.from_json(io.read_json(args.input))
    res = cone_membership(sigma, _options(args))
    _emit(args, res.to_json())
    print(f"member={str(res.member).lower()} sigma_min={res.sigma_min:.10g} stiffness_min={res.stiffness_min:.10g}")
    return EXIT_OK


def cmd_relax(args) -> int:
    problem = QcqpProblem.from_json(io.read_json(args.input))
    sol = solve_relaxation(problem, _options(args))
    _emit(args, sol.to_json())
    print(summary(sol.objective_value, sol.gap, sol.rank_defect, None))
    if sol.gap is None or sol.gap > CERT_GAP:
        print(f"error: Uncertified: relaxation gap {_fmt(sol.gap)} exceeds {CERT_GAP:g}", file=sys.stderr)
        return EXIT_CERT
    return EXIT_OK


def cmd_eotc(args) -> int:
    spec = pl.AnisotropyProblemSpec(_spectrum(args, max(args.mode_list)), args.mode_list[0],
                                    args.constraint, _options(args))
    rows = pl.eotc_report(spec, args.mode_list)
    text = pl.eotc_csv(rows)
    if args.output:
        Path(args.output).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


HANDLERS = {"spectrum": cmd_spectrum, "solve": cmd_solve, "check-cone": cmd_check_cone,
            "relax": cmd_relax, "eotc": cmd_eotc}


def _fail(code: str, message: str, status: int) -> int:
    message = " ".join(str(message).split())
    print(f"error: {code}: {message}", file=sys.stderr)
    return status


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = resolve(build_parser().parse_args(argv))
    except UsageError as exc:
        return _fail(UsageError.code, exc, EXIT_ARGS)
    except OSError as exc:
        return _fail("IOError", exc, EXIT_ARGS)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    try:
        return HANDLERS[args.command](args)
    except SolverFailure as exc:
        return _fail(exc.code, exc, EXIT_SOLVER)
    except NegativeWulffArea as exc:
        return _fail(exc.code, exc, EXIT_CERT)
    except WulffError as exc:
        return _fail(exc.code, exc, EXIT_ARGS)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        return _fail(type(exc).__name__, exc, EXIT_ARGS)


if __name__ == "__main__":
    sys.exit(main())
