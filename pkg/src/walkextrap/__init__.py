"""Walk-measure evaluation functions, drift minimisation and linear extrapolation of a function graph."""

from .evaluation import EvalSpec, WPolynomial, build_v, build_v_derivative, build_v_discrete_dtrw
from .extrapolate import ExtrapolationResult, extrapolate
from .inner_products import Bracket, FunctionSpec, bracket, bracket_discrete
from .measures import (
    CTQW,
    CTRW_Z,
    DTRW_Z,
    HADAMARD_R,
    RW,
    DomainError,
    Family,
    WalkKind,
    density,
    dtqw,
    moment,
    moment_coefficients,
    variance,
)
from .optimize import MinimaReport, argmin_p, find_local_minima, minimize_closed_form_n2

__all__ = [
    "EvalSpec",
    "WPolynomial",
    "build_v",
    "build_v_derivative",
    "build_v_discrete_dtrw",
    "ExtrapolationResult",
    "extrapolate",
    "Bracket",
    "FunctionSpec",
    "bracket",
    "bracket_discrete",
    "CTQW",
    "CTRW_Z",
    "DTRW_Z",
    "HADAMARD_R",
    "RW",
    "DomainError",
    "Family",
    "WalkKind",
    "density",
    "dtqw",
    "moment",
    "moment_coefficients",
    "variance",
    "MinimaReport",
    "argmin_p",
    "find_local_minima",
    "minimize_closed_form_n2",
]

__version__ = "0.1.0"
