"""Brackets <x^alpha f^beta>: integrals (or lattice sums) of x^alpha f(x)^beta over [0, a]."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate

__all__ = [
    "QuadratureError",
    "FunctionSpec",
    "Bracket",
    "bracket",
    "bracket_discrete",
    "adaptive_quad",
    "load_csv",
]

QUAD_EPSREL = 1e-10
QUAD_EPSABS = 1e-13
QUAD_LIMIT = 500

# Largest integer alpha for which the closed form for x^alpha cos(kx) is used;
# beyond it the integration-by-parts sum cancels catastrophically for small a.
_COS_ANALYTIC_MAX_ALPHA = 4
# Largest beta*deg for which a polynomial's power is expanded symbolically.
_POLY_ANALYTIC_MAX_DEGREE = 24


class QuadratureError(RuntimeError):
    """Adaptive quadrature stopped before reaching its tolerance."""

    def __init__(self, what: str, value: float, abserr: float, message: str = ""):
        self.value = value
        self.abserr = abserr
        super().__init__(f"quadrature failed for {what}: value={value!r}, estimated error={abserr:.3e}. {message}".rstrip())


def adaptive_quad(fn, lo: float, hi: float, what: str = "integrand", epsrel: float = QUAD_EPSREL,
                  epsabs: float = QUAD_EPSABS, **kwargs) -> float:
    """Gauss-Kronrod adaptive quadrature that raises instead of warning on failure."""
    kwargs.setdefault("limit", QUAD_LIMIT)
    value, abserr, info, *rest = integrate.quad(fn, lo, hi, epsabs=epsabs, epsrel=epsrel, full_output=1, **kwargs)
    ier = 0 if not rest else 1
    # QUADPACK also flags roundoff when the error estimate is already at the target
    if ier and abserr > 10.0 * max(epsabs, epsrel * abs(value)):
        raise QuadratureError(what, value, abserr, rest[0] if rest else "")
    return value


@dataclass(frozen=True)
class FunctionSpec:
    """The graph y = f(x) on [0, a].

    ``form`` is one of ``identity``, ``cosine``, ``polynomial`` (``coeffs`` in
    increasing powers) or ``sampled`` (``points`` as (x, y) pairs, linearly
    interpolated).
    """

    form: str
    a: float
    coeffs: tuple[float, ...] | None = None
    points: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self) -> None:
        if self.form not in ("identity", "cosine", "polynomial", "sampled"):
            raise ValueError(f"unknown function form {self.form!r}")
        if not self.a > 0:
            raise ValueError(f"interval end a must be positive, got {self.a!r}")
        if self.form == "polynomial" and not self.coeffs:
            raise ValueError("polynomial needs at least one coefficient")
        if self.form == "sampled":
            pts = self.points or ()
            if len(pts) < 3:
                raise ValueError("sampled function needs at least 3 points")
            xs = [x for x, _ in pts]
            if xs[0] != 0.0:
                raise ValueError(f"sampled function must start at x=0, got {xs[0]!r}")
            if any(b <= a for a, b in zip(xs, xs[1:])):
                raise ValueError("sampled x values must be strictly increasing")
            if not math.isclose(xs[-1], self.a, rel_tol=1e-12, abs_tol=0.0):
                raise ValueError(f"last sample x={xs[-1]!r} must equal a={self.a!r}")

    @classmethod
    def identity(cls, a: float) -> "FunctionSpec":
        return cls("identity", float(a))

    @classmethod
    def cosine(cls, a: float) -> "FunctionSpec":
        return cls("cosine", float(a))

    @classmethod
    def polynomial(cls, coeffs: Sequence[float], a: float) -> "FunctionSpec":
        return cls("polynomial", float(a), coeffs=tuple(float(c) for c in coeffs))

    @classmethod
    def sampled(cls, points: Sequence[tuple[float, float]]) -> "FunctionSpec":
        pts = tuple((float(x), float(y)) for x, y in points)
        return cls("sampled", pts[-1][0] if pts else 1.0, points=pts)

    def with_a(self, a: float) -> "FunctionSpec":
        if self.form == "sampled":
            raise ValueError("the interval of a sampled function is fixed by its table")
        return FunctionSpec(self.form, float(a), self.coeffs, self.points)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.form == "identity":
            out = x.copy()
        elif self.form == "cosine":
            out = np.cos(x)
        elif self.form == "polynomial":
            out = P.polyval(x, self.coeffs)
        else:
            xs, ys = self._table
            out = np.interp(x, xs, ys)
        return out if out.ndim else float(out)

    @property
    def _table(self) -> tuple[np.ndarray, np.ndarray]:
        arr = np.asarray(self.points, dtype=float)
        return arr[:, 0], arr[:, 1]

    @property
    def f_at_a(self) -> float:
        if self.form == "sampled":
            return self.points[-1][1]
        return float(self(self.a))

    def describe(self) -> str:
        if self.form == "polynomial":
            return "polynomial(" + ",".join(f"{c:.17g}" for c in self.coeffs) + ")"
        if self.form == "sampled":
            return f"sampled({len(self.points)} points)"
        return self.form


@dataclass(frozen=True)
class Bracket:
    alpha: float
    beta: int
    value: float
    method: str  # analytic | quadrature | discrete_sum


def _is_int(v) -> bool:
    return float(v) == int(v)


def _x_pow_cos(alpha: int, k: int, a: float) -> float:
    """Integral of x^alpha cos(k x) over [0, a] for integer alpha >= 0, k >= 0."""
    if k == 0:
        return a ** (alpha + 1) / (alpha + 1)
    ik = 1j * k
    fall = 1.0  # alpha!/(alpha-j)!
    at_a = 0.0
    for j in range(alpha + 1):
        at_a += (-1) ** j * fall * a ** (alpha - j) / ik ** (j + 1)
        fall *= alpha - j
    at_zero = (-1) ** alpha * math.factorial(alpha) / ik ** (alpha + 1)
    return ((at_a * complex(math.cos(k * a), math.sin(k * a))) - at_zero).real


def _cos_analytic(alpha: int, beta: int, a: float) -> float:
    # cos^b x = 2^-b sum_j C(b, j) cos((b - 2j) x)
    total = math.fsum(math.comb(beta, j) * _x_pow_cos(alpha, abs(beta - 2 * j), a) for j in range(beta + 1))
    return total / 2**beta


def _poly_analytic(coeffs: tuple[float, ...], alpha: float, beta: int, a: float) -> float:
    power = P.polypow(np.asarray(coeffs, dtype=float), beta)
    return math.fsum(c * a ** (j + alpha + 1) / (j + alpha + 1) for j, c in enumerate(power) if c != 0.0)


def _sampled_piecewise(f: FunctionSpec, alpha: float, beta: int) -> float:
    xs, ys = f._table
    x0, x1 = xs[:-1], xs[1:]
    y0, y1 = ys[:-1], ys[1:]
    slope = (y1 - y0) / (x1 - x0)

    if _is_int(alpha):
        n = int(alpha) + beta
        nodes, weights = np.polynomial.legendre.leggauss(n // 2 + 2)
        half = (x1 - x0)[:, None] / 2.0
        x = (x0 + x1)[:, None] / 2.0 + half * nodes[None, :]
        vals = x ** int(alpha) * (y0[:, None] + slope[:, None] * (x - x0[:, None])) ** beta
        return math.fsum((half * weights[None, :] * vals).ravel())

    if _is_int(2 * alpha):
        # x = t^2 makes x^alpha * linear^beta dx a polynomial in t of degree 2*alpha + 1 + 2*beta.
        n = int(2 * alpha) + 1 + 2 * beta
        nodes, weights = np.polynomial.legendre.leggauss(n // 2 + 2)
        t0, t1 = np.sqrt(x0), np.sqrt(x1)
        half = (t1 - t0)[:, None] / 2.0
        t = (t0 + t1)[:, None] / 2.0 + half * nodes[None, :]
        x = t * t
        vals = 2.0 * t ** (2 * alpha + 1) * (y0[:, None] + slope[:, None] * (x - x0[:, None])) ** beta
        return math.fsum((half * weights[None, :] * vals).ravel())

    return math.fsum(
        adaptive_quad(lambda x, i=i: x**alpha * (y0[i] + slope[i] * (x - x0[i])) ** beta, x0[i], x1[i],
                      what=f"sampled <x^{alpha} f^{beta}> segment {i}")
        for i in range(len(x0))
    )


def _quad_bracket(f: FunctionSpec, alpha: float, beta: int) -> float:
    return adaptive_quad(lambda x: x**alpha * f(x) ** beta, 0.0, f.a, what=f"<x^{alpha} f^{beta}> ({f.describe()})")


def bracket(f: FunctionSpec, alpha: float | Fraction, beta: int, method: str | None = None) -> Bracket:
    """Compute the integral of x^alpha f(x)^beta over [0, f.a].

    ``method`` forces ``"quadrature"`` (used to cross-check the closed forms);
    by default the closed form is used whenever one is available and stable.
    """
    alpha = float(alpha)
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    if beta < 0 or not _is_int(beta):
        raise ValueError(f"beta must be a nonnegative integer, got {beta}")
    beta = int(beta)
    a = f.a

    if method == "quadrature":
        return Bracket(alpha, beta, _quad_bracket(f, alpha, beta), "quadrature")
    if method not in (None, "analytic"):
        raise ValueError(f"unknown bracket method {method!r}")

    if beta == 0:
        return Bracket(alpha, beta, a ** (alpha + 1) / (alpha + 1), "analytic")
    if f.form == "identity":
        return Bracket(alpha, beta, a ** (alpha + beta + 1) / (alpha + beta + 1), "analytic")
    if f.form == "cosine" and _is_int(alpha) and alpha <= _COS_ANALYTIC_MAX_ALPHA:
        return Bracket(alpha, beta, _cos_analytic(int(alpha), beta, a), "analytic")
    if f.form == "polynomial" and beta * (len(f.coeffs) - 1) <= _POLY_ANALYTIC_MAX_DEGREE:
        return Bracket(alpha, beta, _poly_analytic(f.coeffs, alpha, beta, a), "analytic")
    if f.form == "sampled":
        return Bracket(alpha, beta, _sampled_piecewise(f, alpha, beta), "analytic")
    if method == "analytic":
        raise ValueError(f"no closed form for <x^{alpha} f^{beta}> with {f.describe()}")
    return Bracket(alpha, beta, _quad_bracket(f, alpha, beta), "quadrature")


def bracket_discrete(f: FunctionSpec, alpha: int, beta: int, a: int) -> Bracket:
    """Lattice sum of x^alpha f(x)^beta over x = 0, 1, ..., a."""
    if a < 1 or not _is_int(a):
        raise ValueError(f"a must be a positive integer, got {a!r}")
    xs = np.arange(int(a) + 1, dtype=float)
    fx = np.asarray(f(xs), dtype=float)
    terms = xs**alpha * fx**beta  # 0**0 == 1 keeps the x=0 term for alpha=0
    return Bracket(float(alpha), int(beta), math.fsum(terms), "discrete_sum")


def load_csv(path: str | Path) -> FunctionSpec:
    """Read a sampled function from a UTF-8 CSV with header ``x,y``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [h.strip() for h in reader.fieldnames] != ["x", "y"]:
            raise ValueError(f"{path}: expected header 'x,y', got {reader.fieldnames!r}")
        points = []
        for lineno, row in enumerate(reader, start=2):
            try:
                points.append((float(row["x"]), float(row["y"])))
            except (TypeError, ValueError):
                raise ValueError(f"{path}:{lineno}: cannot parse row {row!r}") from None
    return FunctionSpec.sampled(points)
