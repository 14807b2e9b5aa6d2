"""Linear extrapolation of f beyond [0, a] from the optimal drift."""

from __future__ import annotations

from dataclasses import dataclass

from .evaluation import EvalSpec
from .measures import WalkKind
from .optimize import MinimaReport, argmin_p

__all__ = ["ExtrapolationResult", "extrapolate", "extrapolators"]


@dataclass(frozen=True)
class ExtrapolationResult:
    walk: WalkKind
    n: int
    a: float
    b: float
    p_star: float
    m: float
    m_tilde: float
    f_at_a: float
    report: MinimaReport | None = None

    @property
    def slope(self) -> float:
        return 1.0 - 2.0 * self.p_star


def extrapolators(p_star: float, a: float, b: float, f_at_a: float) -> tuple[float, float]:
    """Means of mu_b and of f(a) + mu_(b-a) at drift p_star.

    Both are exact: every measure has mean (1 - 2p) x, so no integration is needed.
    """
    slope = 1.0 - 2.0 * p_star
    return slope * b, f_at_a + slope * (b - a)


def extrapolate(spec: EvalSpec, b: float, report: MinimaReport | None = None) -> ExtrapolationResult:
    a = spec.a
    if not b > a:
        raise ValueError(f"extrapolation point b={b!r} must exceed a={a!r}")
    report = argmin_p(spec) if report is None else report
    f_at_a = spec.f.f_at_a
    m, m_tilde = extrapolators(report.p_star, a, b, f_at_a)
    return ExtrapolationResult(spec.walk, spec.n, a, b, report.p_star, m, m_tilde, f_at_a, report)
