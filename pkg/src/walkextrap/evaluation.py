"""The evaluation function V_a^(n) as an exact polynomial in the signed drift w = 1 - 2p.

V_a^(n)(p) = sum_k C(n, k) (-1)^(n-k) integral_0^a f(x)^(n-k) M^(k)(x, p) dx, and each moment
M^(k) is a finite sum of monomials coef * w^e * x^g, so V collapses to
sum_e w^e * sum(weight * <x^g f^(n-k)>).  The combinatorial weights are summed
exactly before any bracket is multiplied in.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .inner_products import Bracket, FunctionSpec, bracket, bracket_discrete
from .measures import MAX_ORDER, RW, Family, WalkKind, moment_coefficients

__all__ = [
    "WPolynomial",
    "EvalSpec",
    "build_v",
    "build_v_derivative",
    "build_v_discrete_dtrw",
    "brackets_used",
]


@dataclass(frozen=True)
class WPolynomial:
    """Polynomial in w with ``coeffs[i]`` multiplying ``w**i``."""

    coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        c = [float(v) for v in self.coeffs]
        while len(c) > 1 and c[-1] == 0.0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c) if c else (0.0,))

    @property
    def degree(self) -> int:
        return -1 if self.coeffs == (0.0,) else len(self.coeffs) - 1

    def __call__(self, w):
        # Horner; works elementwise on arrays
        out = np.zeros_like(np.asarray(w, dtype=float)) if np.ndim(w) else 0.0
        for c in reversed(self.coeffs):
            out = out * w + c
        return out

    def at_p(self, p):
        return self(1.0 - 2.0 * (np.asarray(p, dtype=float) if np.ndim(p) else p))

    def derivative(self) -> "WPolynomial":
        if len(self.coeffs) == 1:
            return WPolynomial((0.0,))
        return WPolynomial(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def dp(self, p: float) -> float:
        """dV/dp at p; w = 1 - 2p gives d/dp = -2 d/dw."""
        return -2.0 * self.derivative()(1.0 - 2.0 * p)

    def d2p(self, p: float) -> float:
        return 4.0 * self.derivative().derivative()(1.0 - 2.0 * p)

    @property
    def scale(self) -> float:
        return math.fsum(abs(c) for c in self.coeffs)


@dataclass(frozen=True)
class EvalSpec:
    """Which walk, which function graph, and which even order n of the deviation moment."""

    walk: WalkKind
    f: FunctionSpec
    n: int = 2

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 2 or self.n % 2:
            raise ValueError(f"n must be a positive even integer, got {self.n!r}")
        if self.n > MAX_ORDER:
            raise ValueError(f"n={self.n} exceeds the supported maximum {MAX_ORDER}")
        if not self.walk.continuous:
            if self.n != 2:
                raise ValueError(f"{self.walk.family.value} supports only n=2, got n={self.n}")
            if self.walk.family is Family.DTRW_Z and (self.a != int(self.a) or self.a < 2):
                raise ValueError(f"dtrw-z needs an integer a >= 2, got a={self.a!r}")

    @property
    def a(self) -> float:
        return self.f.a


_bracket = lru_cache(maxsize=4096)(bracket)


def _continuous_terms(walk: WalkKind, n: int) -> dict[tuple[int, Fraction, int], object]:
    """Exact weight of w^e * <x^g f^beta> in V for each (e, g, beta)."""
    weights: dict[tuple[int, Fraction, int], object] = defaultdict(int)
    for k in range(n + 1):
        outer = (-1) ** (n - k) * math.comb(n, k)
        for coef, e, g in moment_coefficients(walk, k).terms:
            weights[(e, g, n - k)] += outer * coef
    return weights


def _assemble(spec: EvalSpec) -> tuple[WPolynomial, dict[tuple[float, int], Bracket]]:
    fam = spec.walk.family
    if fam is Family.DTRW_Z:
        return _assemble_dtrw(spec.f, int(spec.a))
    # the lattice CTRW shares M^(0..2) with the Gaussian family
    walk = RW if fam is Family.CTRW_Z else spec.walk

    coeffs = [0.0] * (spec.n + 1)
    used: dict[tuple[float, int], Bracket] = {}
    for (e, g, beta), weight in sorted(_continuous_terms(walk, spec.n).items()):
        if weight == 0:
            continue
        br = _bracket(spec.f, g, beta)
        used[(float(g), beta)] = br
        coeffs[e] += float(weight) * br.value
    poly = WPolynomial(tuple(coeffs))
    lead = spec.a ** (spec.n + 1) / (spec.n + 1)
    if not math.isclose(poly.coeffs[-1], lead, rel_tol=1e-9) or poly.degree != spec.n:
        raise ArithmeticError(f"leading coefficient {poly.coeffs[-1]!r} of V differs from a^(n+1)/(n+1)={lead!r}")
    return poly, used


def _assemble_dtrw(f: FunctionSpec, a: int) -> tuple[WPolynomial, dict[tuple[float, int], Bracket]]:
    if a != int(a) or a < 2:
        raise ValueError(f"dtrw-z needs an integer a >= 2, got a={a!r}")
    a = int(a)
    f2 = bracket_discrete(f, 0, 2, a)
    xf = bracket_discrete(f, 1, 1, a)
    poly = WPolynomial((f2.value + a * (a + 1) / 2.0, -2.0 * xf.value, (a - 1) * a * (a + 1) / 3.0))
    return poly, {(0.0, 2): f2, (1.0, 1): xf}


def build_v(spec: EvalSpec) -> WPolynomial:
    """V_a^(n) as a polynomial in w."""
    return _assemble(spec)[0]


def build_v_derivative(spec: EvalSpec) -> WPolynomial:
    """dV/dw; use :meth:`WPolynomial.dp` for the derivative in p."""
    return build_v(spec).derivative()


def build_v_discrete_dtrw(f: FunctionSpec, a: int) -> WPolynomial:
    """Quadratic V_a^(2) of the discrete-time lattice walk, brackets summed over x = 0..a."""
    return _assemble_dtrw(f, a)[0]


def brackets_used(spec: EvalSpec) -> list[Bracket]:
    """The brackets that enter V, sorted by (alpha, beta)."""
    return [b for _, b in sorted(_assemble(spec)[1].items())]
