"""Minimisers of V over the drift parameter p.

Interior critical points are found in the w-domain: the float coefficients of
dV/dw are lifted to exact rationals, a Sturm chain certifies how many distinct
roots lie in (-1, 1), bisection isolates each one, and a float bisection plus
Newton pass polishes it.  A root is a local minimum when dV/dw changes sign
from negative to positive across it; since p = (1 - w)/2 is affine the same
point is a local minimum in p.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from .evaluation import EvalSpec, WPolynomial, build_v
from .inner_products import FunctionSpec, bracket, bracket_discrete
from .measures import Family

__all__ = [
    "MinimaReport",
    "minimize_closed_form_n2",
    "minimize_closed_form_n2_discrete",
    "find_local_minima",
    "argmin_p",
    "sturm_chain",
    "count_roots",
    "quartic_discriminant",
]

log = logging.getLogger(__name__)

TIE_RTOL = 1e-10
NEWTON_TOL = 1e-12
# a minimum this close to p=0 or p=1 is the endpoint itself, displaced by rounding
EDGE_TOL = 1e-9


@dataclass(frozen=True)
class MinimaReport:
    local_minima: tuple[float, ...]
    candidate_set: tuple[float, ...]
    p_star: float
    v_at_candidates: tuple[tuple[float, float], ...]
    unique: bool
    discriminant: float | None = None
    unconstrained_p: float | None = None  # n=2 only: global minimiser over the whole real line

    @property
    def v_star(self) -> float:
        return min(v for _, v in self.v_at_candidates)


def minimize_closed_form_n2(spec: EvalSpec) -> float:
    """Global minimiser on the real line of the quadratic V_a^(2): 1/2 - 3<xf>/(2a^3)."""
    if spec.n != 2:
        raise ValueError(f"closed form exists only for n=2, got n={spec.n}")
    if spec.walk.family is Family.DTRW_Z:
        return minimize_closed_form_n2_discrete(spec.f, int(spec.a))
    a = spec.a
    return 0.5 - 1.5 * bracket(spec.f, 1, 1).value / a**3


def minimize_closed_form_n2_discrete(f: FunctionSpec, a: int) -> float:
    """Minimiser of the discrete-time lattice quadratic: 1/2 - 3<xf>/(2(a-1)a(a+1)), lattice sums."""
    if a != int(a) or a < 2:
        raise ValueError(f"a must be an integer >= 2, got {a!r}")
    a = int(a)
    return 0.5 - 1.5 * bracket_discrete(f, 1, 1, a).value / ((a - 1) * a * (a + 1))


# --- exact polynomial arithmetic on lists of Fractions, lowest power first ---

def _trim(c: list[Fraction]) -> list[Fraction]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _horner(c: list[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for v in reversed(c):
        acc = acc * x + v
    return acc


def _rem(num: list[Fraction], den: list[Fraction]) -> list[Fraction]:
    num = list(num)
    lead = den[-1]
    while len(num) >= len(den):
        q = num[-1] / lead
        shift = len(num) - len(den)
        for i, d in enumerate(den):
            num[shift + i] -= q * d
        num.pop()
        _trim(num)
    return num


def _normalise(c: list[Fraction]) -> list[Fraction]:
    # dividing by a positive constant leaves every sign unchanged
    s = abs(c[-1])
    return [v / s for v in c]


def sturm_chain(coeffs) -> list[list[Fraction]]:
    """Sturm sequence p, p', -rem(p, p'), ... with exact rational coefficients."""
    p0 = _trim([Fraction(v) for v in coeffs])
    if not p0:
        raise ValueError("Sturm chain of the zero polynomial")
    chain = [_normalise(p0)]
    p1 = _trim([i * v for i, v in enumerate(p0)][1:])
    if not p1:
        return chain
    chain.append(_normalise(p1))
    while True:
        r = _rem(chain[-2], chain[-1])
        if not r:
            break
        chain.append(_normalise([-v for v in r]))
    return chain


def _variations(chain: list[list[Fraction]], x: Fraction) -> int:
    signs = [s for s in ((_horner(c, x) > 0) - (_horner(c, x) < 0) for c in chain) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(chain: list[list[Fraction]], lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots in (lo, hi] (lo, hi must not be roots)."""
    return _variations(chain, lo) - _variations(chain, hi)


def _deflate_at(c: list[Fraction], root: Fraction) -> list[Fraction]:
    # synthetic division by (x - root); caller guarantees an exact root
    out = [Fraction(0)] * (len(c) - 1)
    carry = Fraction(0)
    for i in range(len(c) - 1, 0, -1):
        carry = c[i] + carry * root
        out[i - 1] = carry
    return out


def _isolate(chain, p0, lo: Fraction, hi: Fraction, depth: int = 0) -> list[tuple[Fraction, Fraction]]:
    n = count_roots(chain, lo, hi)
    if n == 0:
        return []
    if n == 1:
        return [(lo, hi)]
    if depth > 400:
        raise ArithmeticError("root isolation did not separate roots")
    mid = (lo + hi) / 2
    nudge = (hi - lo) / 1031
    while _horner(p0, mid) == 0:
        mid += nudge
        nudge /= 2
    return _isolate(chain, p0, lo, mid, depth + 1) + _isolate(chain, p0, mid, hi, depth + 1)


def _polish(d: WPolynomial, lo: float, hi: float, sign_lo: int) -> float:
    dd = d.derivative()
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        val = d(mid)
        if val == 0:
            return mid
        if (val > 0) == (sign_lo > 0):
            lo = mid
        else:
            hi = mid
    w = 0.5 * (lo + hi)
    for _ in range(5):
        slope = dd(w)
        if slope == 0:
            break
        step = d(w) / slope
        if not lo - abs(hi - lo) <= w - step <= hi + abs(hi - lo):
            break
        w -= step
    return w


def _interior_critical_points(v: WPolynomial) -> list[tuple[float, int, int]]:
    """Distinct roots of dV/dw in (-1, 1) as (w, sign of dV/dw left of it, sign right of it)."""
    d = v.derivative()
    p0 = _trim([Fraction(c) for c in d.coeffs])
    if not p0:
        return []
    one = Fraction(1)
    # (w - 1) is negative inside (-1, 1): each factor removed at w=1 flips the sign
    flip = 1
    for end, factor_sign in ((one, -1), (-one, 1)):
        while len(p0) > 1 and _horner(p0, end) == 0:
            p0 = _deflate_at(p0, end)
            flip *= factor_sign
    if len(p0) <= 1:
        return []
    chain = sturm_chain(p0)
    out = []
    for lo, hi in _isolate(chain, p0, -one, one):
        s_lo = flip * (1 if _horner(p0, lo) > 0 else -1)
        s_hi = flip * (1 if _horner(p0, hi) > 0 else -1)
        w = _polish(d, float(lo), float(hi), s_lo)
        if abs(d(w)) > NEWTON_TOL * max(1.0, d.scale):
            log.debug("critical point w=%r polished only to |dV/dw|=%g", w, abs(d(w)))
        out.append((w, s_lo, s_hi))
    return out


def find_local_minima(v: WPolynomial) -> list[float]:
    """All p in (0, 1) at which V has a local minimum, ascending."""
    if v.degree < 2:
        raise ValueError(f"V must have degree >= 2, got {v.degree}")
    pts = []
    for w, s_lo, s_hi in _interior_critical_points(v):
        if s_lo < 0 < s_hi:
            p = (1.0 - w) / 2.0
            if EDGE_TOL < p < 1.0 - EDGE_TOL:
                pts.append(p)
    return sorted(pts)


def quartic_discriminant(v: WPolynomial) -> float:
    """9 A3^2 - 24 A2 A4 for V = A4 w^4 + ... + A0: the discriminant of V''/2 = 6A4 w^2 + 3A3 w + A2."""
    if v.degree != 4:
        raise ValueError(f"expected a quartic, got degree {v.degree}")
    a4, a3, a2 = v.coeffs[4], v.coeffs[3], v.coeffs[2]
    return 9.0 * a3 * a3 - 24.0 * a2 * a4


def argmin_p(spec: EvalSpec, v: WPolynomial | None = None) -> MinimaReport:
    """p_* = argmin of V over {0, 1} and the interior local minima; ties are averaged."""
    v = build_v(spec) if v is None else v
    minima = find_local_minima(v)
    candidates = [0.0, 1.0] + minima
    values = [(p, float(v.at_p(p))) for p in candidates]
    v_min = min(val for _, val in values)
    tied = [p for p, val in values if val - v_min <= TIE_RTOL * (1.0 + abs(v_min))]
    p_star = math.fsum(tied) / len(tied)
    return MinimaReport(
        local_minima=tuple(minima),
        candidate_set=tuple(candidates),
        p_star=p_star,
        v_at_candidates=tuple(values),
        unique=len(tied) == 1,
        discriminant=quartic_discriminant(v) if v.degree == 4 else None,
        unconstrained_p=minimize_closed_form_n2(spec) if spec.n == 2 else None,
    )
