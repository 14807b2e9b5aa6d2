"""Walk measures mu_x(y, p) and their exact moments.

Five families are supported.  Three are continuous in y and come from weak
limits of walks on Z (CTQW: arcsine law, DTQW: Konno law, RW: Gaussian); two
live on the lattice itself (CTRW_Z: modified-Bessel law of a continuous-time
walk, DTRW_Z: binomial law of a discrete-time walk).  Every family is shifted
so that its mean is ``(1 - 2p) x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from numbers import Real

import numpy as np
from scipy import special, stats

__all__ = [
    "HADAMARD_R",
    "DomainError",
    "Family",
    "WalkKind",
    "DriftParam",
    "MomentCoefficients",
    "CTQW",
    "RW",
    "CTRW_Z",
    "DTRW_Z",
    "dtqw",
    "konno_a",
    "density",
    "moment",
    "moment_coefficients",
    "variance",
]

HADAMARD_R = 1.0 / math.sqrt(2.0)

# Highest moment order with a precomputed coefficient table.
MAX_ORDER = 16


class DomainError(ValueError):
    """An argument lies outside the domain on which a measure is defined."""


class Family(str, Enum):
    CTQW = "ctqw"
    DTQW = "dtqw"
    RW = "rw"
    CTRW_Z = "ctrw-z"
    DTRW_Z = "dtrw-z"


@dataclass(frozen=True)
class WalkKind:
    """A measure family; ``r`` is the DTQW coin parameter and unused otherwise."""

    family: Family
    r: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", Family(self.family))
        if self.family is Family.DTQW:
            if self.r is None:
                object.__setattr__(self, "r", HADAMARD_R)
            if not 0.0 < self.r < 1.0:
                raise DomainError(f"DTQW needs 0 < r < 1, got r={self.r!r}")
        elif self.r is not None:
            raise DomainError(f"r is only meaningful for DTQW, got r={self.r!r} for {self.family.value}")

    @classmethod
    def parse(cls, name: str, r: float | None = None) -> "WalkKind":
        key = name.strip().lower().replace("_", "-")
        try:
            family = Family(key)
        except ValueError:
            raise DomainError(f"unknown walk {name!r}; choose from {[f.value for f in Family]}") from None
        return cls(family, r if family is Family.DTQW else None)

    @property
    def continuous(self) -> bool:
        return self.family in (Family.CTQW, Family.DTQW, Family.RW)

    @property
    def label(self) -> str:
        if self.family is Family.DTQW:
            return f"dtqw(r={self.r:.12g})"
        return self.family.value

    def __str__(self) -> str:
        return self.label


CTQW = WalkKind(Family.CTQW)
RW = WalkKind(Family.RW)
CTRW_Z = WalkKind(Family.CTRW_Z)
DTRW_Z = WalkKind(Family.DTRW_Z)


def dtqw(r: float = HADAMARD_R) -> WalkKind:
    return WalkKind(Family.DTQW, r)


@dataclass(frozen=True)
class DriftParam:
    """The drift parameter p together with its signed form w = 1 - 2p."""

    p: float

    @classmethod
    def from_w(cls, w: float) -> "DriftParam":
        return cls((1.0 - w) / 2.0)

    @property
    def w(self) -> float:
        return 1.0 - 2.0 * self.p

    def c_at(self, x: float) -> float:
        """Centre of mu_x(., p)."""
        return self.w * x


@dataclass(frozen=True)
class MomentCoefficients:
    """``M^(k)(x, p) = sum(coef * w**w_exp * x**x_exp for coef, w_exp, x_exp in terms)``.

    ``coef`` is an exact :class:`~fractions.Fraction` for CTQW and RW; for DTQW
    it carries the irrational factor ``A_r(l)`` and is a float.
    """

    walk: WalkKind
    k: int
    terms: tuple[tuple[Real, int, Fraction], ...]

    def evaluate(self, x: float, p: float) -> float:
        w = 1.0 - 2.0 * p
        return math.fsum(float(c) * w**e * x ** float(g) for c, e, g in self.terms)


def _check_x(x: float) -> None:
    if not x > 0:
        raise DomainError(f"location x must be positive, got {x!r}")


def _check_discrete(walk: WalkKind, x: float, p: float) -> None:
    _check_x(x)
    if not 0.0 < p < 1.0:
        raise DomainError(f"{walk.family.value} is defined only for p in (0, 1), got p={p!r}")
    if walk.family is Family.DTRW_Z and float(x) != int(x):
        raise DomainError(f"dtrw-z needs an integer time x, got {x!r}")


def konno_a(r: float, l: int) -> float:
    """Even moments of the Konno density on (-r, r); zero for odd ``l``."""
    if l % 2:
        return 0.0
    if l == 0:
        return 1.0
    partial = math.fsum(math.comb(2 * s, s) * (r * r / 4.0) ** s for s in range(l // 2))
    return 1.0 - math.sqrt(1.0 - r * r) * partial


def _ctrw_log_weight(x: float, p: float) -> tuple[float, float]:
    # mu_x(y) = exp(-x + z + (y/2) log((1-p)/p)) * ive(|y|, z),   z = 2 sqrt(p(1-p)) x
    return 2.0 * math.sqrt(p * (1.0 - p)) * x, 0.5 * math.log((1.0 - p) / p)


def ctrw_pmf(y: np.ndarray | int, x: float, p: float) -> np.ndarray | float:
    """Lattice pmf of the continuous-time walk (vectorised over integer ``y``)."""
    z, half_log_ratio = _ctrw_log_weight(x, p)
    y = np.asarray(y)
    out = np.exp(-x + z + y * half_log_ratio) * special.ive(np.abs(y), z)
    return out if out.ndim else float(out)


def density(walk: WalkKind, x: float, p: float, y: float) -> float:
    """Value of mu_x(y, p): a density for continuous walks, a point mass on Z otherwise."""
    fam = walk.family
    if not walk.continuous:
        _check_discrete(walk, x, p)
        if float(y) != int(y):
            return 0.0
        y = int(y)
        if fam is Family.CTRW_Z:
            return float(ctrw_pmf(y, x, p))
        x = int(x)
        if abs(y) > x or (x - y) % 2:
            return 0.0
        return float(stats.binom.pmf((x - y) // 2, x, p))

    _check_x(x)
    u = (y - (1.0 - 2.0 * p) * x) / x
    if fam is Family.CTQW:
        if abs(u) >= 1.0:
            return 0.0
        return 1.0 / (math.pi * x * math.sqrt(1.0 - u * u))
    if fam is Family.DTQW:
        r = walk.r
        if abs(u) >= r:
            return 0.0
        return math.sqrt(1.0 - r * r) / (math.pi * x * (1.0 - u * u) * math.sqrt(r * r - u * u))
    return math.exp(-0.5 * x * u * u) / math.sqrt(2.0 * math.pi * x)


@lru_cache(maxsize=None)
def moment_coefficients(walk: WalkKind, k: int) -> MomentCoefficients:
    """Expand the k-th moment of a continuous walk as a sum of monomials in w and x."""
    if k < 0:
        raise DomainError(f"moment order must be nonnegative, got {k}")
    if k > MAX_ORDER:
        raise DomainError(f"moment order {k} exceeds the supported maximum {MAX_ORDER}")
    if not walk.continuous:
        raise DomainError(f"no symbolic moment expansion for {walk.family.value}; use moment()")

    terms = []
    for l in range(0, k + 1, 2):
        if walk.family is Family.CTQW:
            coef = Fraction(math.comb(k, l) * math.comb(l, l // 2), 2**l)
            x_exp = Fraction(k)
        elif walk.family is Family.DTQW:
            coef = math.comb(k, l) * konno_a(walk.r, l)
            x_exp = Fraction(k)
        else:
            # standard normal moment l!/(2^{l/2} (l/2)!)
            gauss = Fraction(math.factorial(l), 2 ** (l // 2) * math.factorial(l // 2))
            coef = math.comb(k, l) * gauss
            x_exp = Fraction(k) - Fraction(l, 2)
        terms.append((coef, k - l, x_exp))
    return MomentCoefficients(walk, k, tuple(terms))


def _moments_from_cumulants(kappa: list[float], k: int) -> float:
    m = [1.0]
    for order in range(1, k + 1):
        m.append(math.fsum(math.comb(order - 1, j - 1) * kappa[j] * m[order - j] for j in range(1, order + 1)))
    return m[k]


def moment(walk: WalkKind, k: int, x: float, p: float) -> float:
    """Exact k-th moment of mu_x(., p)."""
    if k < 0:
        raise DomainError(f"moment order must be nonnegative, got {k}")
    fam = walk.family
    if walk.continuous:
        _check_x(x)
        return moment_coefficients(walk, k).evaluate(x, p)

    _check_discrete(walk, x, p)
    w = 1.0 - 2.0 * p
    if fam is Family.CTRW_Z:
        # Compound Poisson(x) of +-1 steps: kappa_j = x * E[step^j].
        kappa = [0.0] + [x * (1.0 if j % 2 == 0 else w) for j in range(1, k + 1)]
        return _moments_from_cumulants(kappa, k)

    t = int(x)
    left = np.arange(t + 1)
    pmf = stats.binom.pmf(left, t, p)
    return math.fsum(pmf * (t - 2.0 * left) ** k)


def variance(walk: WalkKind, x: float) -> float:
    """Variance of mu_x(., p); for the continuous families it does not depend on p."""
    _check_x(x)
    if walk.family is Family.CTQW:
        return x * x / 2.0
    if walk.family is Family.DTQW:
        return konno_a(walk.r, 2) * x * x
    if walk.family is Family.RW:
        return float(x)
    raise DomainError(f"variance of {walk.family.value} depends on p; use moment() instead")
