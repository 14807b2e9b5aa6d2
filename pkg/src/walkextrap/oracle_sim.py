"""Brute-force oracles for the closed forms.

Nothing here reuses the moment expansions: continuous measures are integrated
numerically after a substitution that removes their edge singularities
(y = c + x sin(theta) for the arcsine law, y = c + x r sin(theta) for the Konno
law), the lattice walks are propagated step by step, and the Hadamard walk is
run on explicit two-component amplitudes.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterator

import numpy as np
from scipy import stats

from .evaluation import EvalSpec
from .inner_products import FunctionSpec, adaptive_quad
from .measures import Family, WalkKind, _check_discrete, _check_x, ctrw_pmf

__all__ = [
    "SimulationTooLarge",
    "DistributionOnZ",
    "KSReport",
    "quad_moment",
    "quad_v",
    "quad_mean",
    "simulate_dtrw",
    "simulate_hadamard_dtqw",
    "hadamard_norm_drift",
    "ctrw_distribution",
    "discrete_v",
    "simulate_ctrw_measure_check",
    "ks_statistic",
    "gaussian_cdf",
    "arcsine_cdf",
    "konno_cdf",
]

MAX_DTQW_TIME = 2_000_000
INNER_EPSREL = 1e-11
OUTER_EPSREL = 1e-9
CTRW_TAIL = 1e-12


class SimulationTooLarge(MemoryError):
    pass


@dataclass(frozen=True, eq=False)
class DistributionOnZ:
    """Masses at consecutive integers ``support_offset, support_offset + 1, ...``."""

    support_offset: int
    masses: np.ndarray

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.support_offset, self.support_offset + len(self.masses))

    def total(self):
        if self.masses.dtype == object:
            return sum(self.masses, Fraction(0))
        return math.fsum(self.masses)

    def mass_at(self, y: int):
        i = y - self.support_offset
        return self.masses[i] if 0 <= i < len(self.masses) else 0

    def moment(self, k: int, scale: float = 1.0) -> float:
        y = self.positions.astype(float) / scale
        return math.fsum(np.asarray(self.masses, dtype=float) * y**k)

    def as_dict(self) -> dict[int, object]:
        return {int(y): m for y, m in zip(self.positions, self.masses) if m != 0}

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["position", "mass"])
            for y, m in zip(self.positions, self.masses):
                writer.writerow([int(y), repr(float(m))])


@dataclass(frozen=True)
class KSReport:
    statistic: float
    sample_or_time_scale: float
    target: str


# --- quadrature oracles ---------------------------------------------------

def _inner_integrand(walk: WalkKind, x: float, c: float, g: Callable[[float], float]):
    """Return (integrand in the substituted variable, lower, upper)."""
    fam = walk.family
    if fam is Family.CTQW:
        return (lambda th: g(c + x * math.sin(th)) / math.pi), -math.pi / 2, math.pi / 2
    if fam is Family.DTQW:
        r = walk.r
        s = math.sqrt(1.0 - r * r)
        return (lambda th: g(c + x * r * math.sin(th)) * s / (math.pi * (1.0 - (r * math.sin(th)) ** 2))), \
            -math.pi / 2, math.pi / 2
    if fam is Family.RW:
        sd = math.sqrt(x)
        return (lambda u: g(c + sd * u) * math.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi)), -math.inf, math.inf
    raise ValueError(f"no continuous integrand for {fam.value}")


def _expect(walk: WalkKind, x: float, p: float, g: Callable[[float], float], scale: float,
            epsrel: float = INNER_EPSREL) -> float:
    """E[g(Y)] for Y ~ mu_x(., p)."""
    fam = walk.family
    if fam is Family.CTRW_Z:
        dist = ctrw_distribution(x, p)
        return math.fsum(m * g(float(y)) for y, m in zip(dist.positions, dist.masses))
    if fam is Family.DTRW_Z:
        dist = simulate_dtrw(int(x), p)
        return math.fsum(m * g(float(y)) for y, m in zip(dist.positions, dist.masses) if m)
    c = (1.0 - 2.0 * p) * x
    fn, lo, hi = _inner_integrand(walk, x, c, g)
    return adaptive_quad(fn, lo, hi, what=f"E[g(Y)] under {walk} at x={x}, p={p}",
                         epsrel=epsrel, epsabs=1e-14 * scale)


def quad_moment(walk: WalkKind, k: int, x: float, p: float) -> float:
    """k-th moment of mu_x(., p) by quadrature (continuous walks) or lattice summation."""
    if walk.continuous:
        _check_x(x)
    else:
        _check_discrete(walk, x, p)
    spread = math.sqrt(x) * 8.0 if walk.family in (Family.RW, Family.CTRW_Z) else x
    scale = max(1.0, abs((1.0 - 2.0 * p) * x) + spread) ** k
    return _expect(walk, x, p, lambda y: y**k, scale, epsrel=1e-13)


def quad_mean(walk: WalkKind, x: float, p: float) -> float:
    return quad_moment(walk, 1, x, p)


def quad_v(spec: EvalSpec, p: float) -> float:
    """V_a^(n)(p) as the double integral over x in [0, a] and y under mu_x(., p)."""
    walk, f, n = spec.walk, spec.f, spec.n
    if walk.family is Family.DTRW_Z:
        return discrete_v(f, int(spec.a), p)

    def inner(x: float) -> float:
        if x == 0.0:
            return (-float(f(0.0))) ** n
        fx = float(f(x))
        spread = 8.0 * math.sqrt(x) if walk.family in (Family.RW, Family.CTRW_Z) else x
        scale = (abs(fx) + abs(x) + spread + 1.0) ** n
        return _expect(walk, x, p, lambda y: (y - fx) ** n, scale)

    return adaptive_quad(inner, 0.0, spec.a, what=f"V for {walk}, n={n}, p={p}", epsrel=OUTER_EPSREL, epsabs=0.0)


# --- lattice walks --------------------------------------------------------

def _dtrw_steps(t: int, p) -> Iterator[np.ndarray]:
    """Distributions at times 0..t on positions -t..t (index = position + t)."""
    exact = isinstance(p, Fraction)
    q = 1 - p
    dist = np.zeros(2 * t + 1, dtype=object if exact else float)
    if exact:
        dist[:] = Fraction(0)
    dist[t] = Fraction(1) if exact else 1.0
    yield dist
    for s in range(1, t + 1):
        lo, hi = t - s, t + s + 1  # active window after this step
        new = np.zeros_like(dist)
        if exact:
            new[:] = Fraction(0)
        # a step left happens with probability p, right with 1 - p
        new[lo:hi - 1] += p * dist[lo + 1:hi]
        new[lo + 1:hi] += q * dist[lo:hi - 1]
        dist = new
        yield dist


def simulate_dtrw(t: int, p) -> DistributionOnZ:
    """Exact distribution of the discrete-time walk after t steps (Fraction p gives exact rationals)."""
    if t < 0 or int(t) != t:
        raise ValueError(f"t must be a nonnegative integer, got {t!r}")
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    t = int(t)
    for dist in _dtrw_steps(t, p):
        pass
    return DistributionOnZ(-t, dist)


def discrete_v(f: FunctionSpec, a: int, p) -> float:
    """Sum over x = 0..a of E[(Y - f(x))^2] under the discrete-time walk at time x."""
    if a != int(a) or a < 0:
        raise ValueError(f"a must be a nonnegative integer, got {a!r}")
    a = int(a)
    pos = np.arange(-a, a + 1, dtype=float)
    total = []
    for x, dist in enumerate(_dtrw_steps(a, p)):
        fx = float(f(float(x)))
        total.append(math.fsum(np.asarray(dist, dtype=float) * (pos - fx) ** 2))
    return math.fsum(total)


def ctrw_distribution(x: float, p: float) -> DistributionOnZ:
    """Lattice law of the continuous-time walk, truncated where the tail mass is below 1e-12."""
    _check_discrete(WalkKind(Family.CTRW_Z), x, p)
    centre = (1.0 - 2.0 * p) * x
    half = int(math.ceil(abs(centre) + 12.0 * math.sqrt(x) + 40.0))
    while True:
        ys = np.arange(-half, half + 1)
        pmf = ctrw_pmf(ys, x, p)
        tail = 1.0 - math.fsum(pmf)
        if abs(tail) < CTRW_TAIL and max(pmf[0], pmf[-1]) < CTRW_TAIL * 1e-3:
            return DistributionOnZ(-half, pmf)
        half *= 2
        if half > 10_000_000:
            raise SimulationTooLarge(f"continuous-time walk support at x={x} is too wide")


def simulate_ctrw_measure_check(x: float, p: float, y_range: tuple[int, int] = (-10, 10), h: float = 1e-5) -> float:
    """Largest residual of d mu/dx = p mu(y+1) + (1-p) mu(y-1) - mu(y) over integer y in y_range."""
    if not x > h:
        raise ValueError(f"x must exceed the finite-difference step {h}")
    ys = np.arange(y_range[0], y_range[1] + 1)
    lhs = (ctrw_pmf(ys, x + h, p) - ctrw_pmf(ys, x - h, p)) / (2.0 * h)
    rhs = p * ctrw_pmf(ys + 1, x, p) + (1.0 - p) * ctrw_pmf(ys - 1, x, p) - ctrw_pmf(ys, x, p)
    return float(np.max(np.abs(lhs - rhs)))


# --- Hadamard walk --------------------------------------------------------

def _hadamard_steps(t: int) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    if t < 0 or int(t) != t:
        raise ValueError(f"t must be a nonnegative integer, got {t!r}")
    if t > MAX_DTQW_TIME:
        raise SimulationTooLarge(f"t={t} needs {2 * t + 1} sites per component; limit is t={MAX_DTQW_TIME}")
    t = int(t)
    s = 1.0 / math.sqrt(2.0)
    left = np.zeros(2 * t + 1, dtype=complex)
    right = np.zeros(2 * t + 1, dtype=complex)
    # coin state (1, i)/sqrt(2) gives a left-right symmetric distribution
    left[t], right[t] = s, 1j * s
    yield left, right
    for _ in range(t):
        up, down = s * (left + right), s * (left - right)
        left = np.zeros_like(left)
        right = np.zeros_like(right)
        left[:-1] = up[1:]      # first component moves one site left
        right[1:] = down[:-1]   # second component moves one site right
        yield left, right


def simulate_hadamard_dtqw(t: int) -> DistributionOnZ:
    """Position distribution of the Hadamard walk after t steps."""
    for left, right in _hadamard_steps(t):
        pass
    return DistributionOnZ(-int(t), np.abs(left) ** 2 + np.abs(right) ** 2)


def hadamard_norm_drift(t: int) -> float:
    """max over steps 0..t of |total probability - 1|."""
    return max(abs(math.fsum(np.abs(l) ** 2) + math.fsum(np.abs(r) ** 2) - 1.0) for l, r in _hadamard_steps(t))


# --- weak-limit diagnostics -----------------------------------------------

def gaussian_cdf(z):
    return stats.norm.cdf(z)


def arcsine_cdf(z):
    return 0.5 + np.arcsin(np.clip(z, -1.0, 1.0)) / math.pi


def konno_cdf(z, r: float):
    # with u = r sin(theta) the density integrates to arctan(sqrt(1-r^2) tan(theta)) / pi
    theta = np.arcsin(np.clip(np.asarray(z, dtype=float) / r, -1.0, 1.0))
    return 0.5 + np.arctan(math.sqrt(1.0 - r * r) * np.tan(theta)) / math.pi


def ks_statistic(dist: DistributionOnZ, scale: float, cdf: Callable, target: str) -> KSReport:
    """Kolmogorov distance between the law of X / scale and a continuous limit law."""
    masses = np.asarray(dist.masses, dtype=float)
    z = dist.positions / scale
    after = np.cumsum(masses)
    before = after - masses
    g = cdf(z)
    stat = float(max(np.max(np.abs(after - g)), np.max(np.abs(before - g))))
    return KSReport(stat, float(scale), target)
