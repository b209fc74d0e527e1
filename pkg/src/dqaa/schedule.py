"""Fractional-degree Chebyshev evaluation and fixed-point phase schedules."""

from __future__ import annotations

import math
from dataclasses import dataclass

_BRANCH_ATOL = 1e-12


def chebyshev_t(m: float, x: float) -> float:
    """First-kind Chebyshev value T_m(x) for real, possibly fractional, m.

    Defined as cos(m*arccos(x)) on [-1, 1) and cosh(m*arccosh(x)) on
    [1, inf), with arccosh(x) = ln(x + sqrt(x^2 - 1)); the branches agree at
    x = 1 where both equal 1. Inputs within 1e-12 below 1 are clamped to 1 so
    floating-point values straddling the branch point stay on the hyperbolic
    side. Inputs below -1 are outside the domain.
    """
    if x < -1.0:
        raise ValueError(f"chebyshev_t domain is [-1, inf), got x = {x!r}")
    if x >= 1.0 or 1.0 - x <= _BRANCH_ATOL:
        xc = max(x, 1.0)
        return math.cosh(m * math.log(xc + math.sqrt(xc * xc - 1.0)))
    return math.cos(m * math.acos(x))


def gamma_from(L: int, epsilon: float) -> float:
    """Schedule shape parameter: gamma = 1 / T_{1/L}(1/epsilon), L = 2l + 1.

    For epsilon in (0, 1) the hyperbolic branch applies and
    T_{1/L}(1/epsilon) >= 1, so gamma lies in (0, 1].
    """
    if L < 1 or L % 2 == 0:
        raise ValueError(f"L must be a positive odd integer, got {L}")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    return 1.0 / chebyshev_t(1.0 / L, 1.0 / epsilon)


@dataclass(frozen=True)
class PhaseSchedule:
    """Angle pairs (phi_r, varphi_r), r = 1..l, for one fixed-point run.

    The pairs obey phi_r = -varphi_{l-r+1} by construction; identical
    schedules are reused across nodes of a partitioned run.
    """

    l: int
    L: int
    epsilon: float
    gamma: float
    pairs: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if self.l < 1:
            raise ValueError(f"l must be positive, got {self.l}")
        if self.L != 2 * self.l + 1:
            raise ValueError(f"L must equal 2l + 1 = {2 * self.l + 1}, got {self.L}")
        if len(self.pairs) != self.l:
            raise ValueError(f"expected {self.l} angle pairs, got {len(self.pairs)}")


def phase_angles(l: int, epsilon: float) -> PhaseSchedule:
    """Build the length-l schedule.

    phi_r = -2 * arccot(tan(2*pi*r / L) * sqrt(1 - gamma^2)) with
    arccot(y) = pi/2 - arctan(y) (continuous, range (0, pi)), L = 2l + 1,
    and varphi_r = -phi_{l-r+1}.
    """
    if l < 1:
        raise ValueError(f"l must be positive, got {l}")
    L = 2 * l + 1
    gamma = gamma_from(L, epsilon)
    spread = math.sqrt(max(0.0, 1.0 - gamma * gamma))
    phis = [
        -2.0 * (math.pi / 2.0 - math.atan(math.tan(2.0 * math.pi * r / L) * spread))
        for r in range(1, l + 1)
    ]
    pairs = tuple((phis[r - 1], -phis[l - r]) for r in range(1, l + 1))
    return PhaseSchedule(l, L, epsilon, gamma, pairs)


def schedule_dump(schedule: PhaseSchedule) -> str:
    """Diagnostic dump at 15 significant digits, one row per r."""
    lines = [
        f"# fixed-point phase schedule: l={schedule.l} L={schedule.L}"
        f" epsilon={schedule.epsilon:.15g} gamma={schedule.gamma:.15g}",
        "r,phi_r,varphi_r",
    ]
    for r, (phi, varphi) in enumerate(schedule.pairs, start=1):
        lines.append(f"{r},{phi:.15g},{varphi:.15g}")
    return "\n".join(lines) + "\n"
