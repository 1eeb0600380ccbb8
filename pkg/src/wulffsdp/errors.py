"""Exception hierarchy shared across the package."""


class WulffError(Exception):
    """Base class; ``code`` is the short machine-readable tag used by the CLI."""

    code = "error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.__class__.__name__)


class CurveError(WulffError):
    code = "CurveError"


class TooFewVertices(CurveError):
    code = "TooFewVertices"


class DegenerateEdge(CurveError):
    code = "DegenerateEdge"


class DegenerateChord(CurveError):
    code = "DegenerateChord"


class ModeMismatch(WulffError):
    code = "ModeMismatch"


class NonpositiveSigma(WulffError):
    code = "NonpositiveSigma"


class NonpositiveWulffArea(WulffError):
    code = "NonpositiveWulffArea"


class NonpositiveScale(WulffError):
    code = "NonpositiveScale"


class NotHermitian(WulffError):
    code = "NotHermitian"


class Infeasible(WulffError):
    code = "Infeasible"


class SolverFailure(WulffError):
    code = "SolverFailure"

    def __init__(self, message: str = "", result=None):
        super().__init__(message)
        self.result = result


class ZeroDenominator(WulffError):
    code = "ZeroDenominator"


class InvalidProblem(WulffError):
    code = "InvalidProblem"


class DegenerateSpectrum(WulffError):
    code = "DegenerateSpectrum"


class NegativeWulffArea(WulffError):
    code = "NegativeWulffArea"


class RankDeficientA(UserWarning):
    """The equality matrix is numerically rank deficient; the rank bound on
    relaxed solutions no longer applies, but the relaxation is still valid."""


class IndefiniteConstraint(UserWarning):
    """A quadratic constraint matrix is indefinite, so a small relaxation gap
    no longer certifies the recovered point."""
