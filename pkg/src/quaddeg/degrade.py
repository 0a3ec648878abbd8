"""Approximate degradability of the MLS and generalized Pauli families.

The degrading map is the complementary channel at a slightly larger noise
level, ``D = N^c_s`` with ``s = p + a p**2``, and the degradability
parameter is ``eta = || N^c - D o N ||_diamond``.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .channels import (
    GpcParams,
    KrausChannel,
    LinearMapChoi,
    MlsParams,
    complementary,
    compose,
    diff_choi,
    gpc_channel,
    mls_channel,
)
from .diamond import diamond_lower_entangled, diamond_norm, diamond_upper_maxnorm, maximally_entangled
from .sdp import SolverError
from .spin import make_spin

log = logging.getLogger(__name__)

FLOOR = 1e-8
SANDWICH_SLACK = 1e-8


@dataclass(frozen=True)
class MLS:
    j: Fraction

    def __post_init__(self):
        # make_spin rejects labels that are not positive half-integers
        object.__setattr__(self, "j", make_spin(self.j).j)

    @property
    def tag(self) -> str:
        return f"MLS(j={self.j})"

    @property
    def dim(self) -> int:
        return int(2 * self.j + 1)

    @property
    def env_dim(self) -> int:
        return 4

    def channel(self, p: float) -> KrausChannel:
        return mls_channel(MlsParams(self.j, p), make_spin(self.j))

    def optimal_a(self) -> float:
        return 2.0 / float(self.j * (self.j + 1))

    def decay_rate(self) -> float:
        """First-order rate ``gamma`` in the eigenvalue ``1 - gamma p`` of the noise operators."""
        return 1.0 / float(self.j * (self.j + 1))


@dataclass(frozen=True)
class GPC:
    d: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"GPC needs an integer dimension d >= 2, got {self.d}")
        object.__setattr__(self, "d", int(self.d))

    @property
    def tag(self) -> str:
        return f"GPC(d={self.d})"

    @property
    def dim(self) -> int:
        return self.d

    @property
    def env_dim(self) -> int:
        return self.d**2

    def channel(self, p: float) -> KrausChannel:
        return gpc_channel(GpcParams(self.d, p))

    def optimal_a(self) -> float:
        return 2.0 * self.d**2 / (self.d**2 - 1)

    def decay_rate(self) -> float:
        return self.d**2 / (self.d**2 - 1)


Family = Union[MLS, GPC]


def optimal_a(family: Family) -> float:
    """``2/(j(j+1))`` for MLS, ``2 d^2/(d^2-1)`` for GPC."""
    return family.optimal_a()


@dataclass(frozen=True)
class DegradeSpec:
    family: Family
    p: float
    a: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.a < 0:
            raise ValueError(f"a must be nonnegative, got {self.a}")
        if not 0.0 <= self.s <= 1.0:
            raise ValueError(f"perturbed noise s = p + a p^2 = {self.s} leaves [0, 1]")

    @property
    def s(self) -> float:
        return self.p + self.a * self.p**2


@dataclass(frozen=True)
class ScalingRecord:
    family: str
    p: float
    a: float
    eta: float
    eta_upper: float
    eta_lower: float
    error: str | None = None

    @property
    def floor(self) -> bool:
        """True when eta is too small to carry slope information."""
        return not self.failed and self.eta < FLOOR

    @property
    def failed(self) -> bool:
        return self.error is not None

    def sandwich_ok(self, slack: float = SANDWICH_SLACK) -> bool:
        return self.eta_lower - slack <= self.eta <= self.eta_upper + slack


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    residual: float
    points: int


def degrading_map(spec: DegradeSpec) -> KrausChannel:
    return complementary(spec.family.channel(spec.s))


def difference_map(spec: DegradeSpec) -> LinearMapChoi:
    """Choi matrix of ``N^c - D o N``; the difference is not CP, so it lives as a Choi matrix."""
    n = spec.family.channel(spec.p)
    return diff_choi(complementary(n), compose(degrading_map(spec), n))


def leading_coefficient(j, p: float, a: float) -> float:
    """MLS ``(0, k)`` coefficient ``c_j(p) - c_j(s) (1 - p_j)`` of the difference map."""
    g = float(Fraction(j) * (Fraction(j) + 1))
    s = p + a * p * p

    def c(x):
        return np.sqrt((1.0 - x) * x / g)

    return float(c(p) - c(s) * (1.0 - p / g))


def eta(spec: DegradeSpec) -> ScalingRecord:
    """Diamond-norm degradability parameter with max-norm and entangled-probe bounds."""
    phi = difference_map(spec)
    upper = diamond_upper_maxnorm(phi)
    lower = diamond_lower_entangled(phi, maximally_entangled(phi.d_in))
    try:
        value = diamond_norm(phi)
    except SolverError as exc:
        raise SolverError(f"{exc} for {spec}", exc.solution) from exc
    return ScalingRecord(spec.family.tag, spec.p, spec.a, value, upper, lower)


def _point(family: Family, p: float, a: float) -> ScalingRecord:
    try:
        return eta(DegradeSpec(family, p, a))
    except (SolverError, ValueError) as exc:
        log.warning("sweep point p=%g failed: %s", p, exc)
        return ScalingRecord(family.tag, p, a, np.nan, np.nan, np.nan, error=str(exc))


def scaling_sweep(family: Family, p_grid: Sequence[float], a: float,
                  workers: int | None = None) -> list[ScalingRecord]:
    """One record per grid point; failures are recorded rather than raised.

    Points are independent, so ``workers > 1`` evaluates them on a thread
    pool; results always come back in grid order.
    """
    grid = [float(p) for p in p_grid]
    if not grid:
        raise ValueError("empty p grid")
    if any(p <= 0 for p in grid) or any(b <= a_ for a_, b in zip(grid, grid[1:])):
        raise ValueError("p grid must be strictly positive and ascending")
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(lambda p: _point(family, p, a), grid))
    return [_point(family, p, a) for p in grid]


def standard_grid(points: int = 9, p_min: float = 1e-3, p_max: float = 1e-1) -> np.ndarray:
    return np.logspace(np.log10(p_min), np.log10(p_max), points)


def fit_slope(records: Sequence[ScalingRecord]) -> SlopeFit:
    """Least-squares line through ``(log p, log eta)``.

    Failed points and points at the solver floor are skipped. Natural logs
    are used; the slope does not depend on the base.
    """
    usable = [r for r in records if not r.failed and not r.floor]
    bad = [r for r in usable if not r.eta > 0]
    if bad:
        raise ValueError(f"nonpositive eta at p={bad[0].p}; trim the grid")
    if len(usable) < 3:
        raise ValueError(f"need at least 3 usable points, got {len(usable)}")
    x = np.log([r.p for r in usable])
    y = np.log([r.eta for r in usable])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return SlopeFit(float(slope), float(intercept), float(np.abs(resid).max()), len(usable))
