"""Entropies, coherent information and capacity lower bounds (all in bits)."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .channels import KrausChannel, MlsParams, apply, complementary, mls_channel
from .degrade import MLS, DegradeSpec, eta as degrade_eta
from .matcore import as_matrix, herm_eig, is_hermitian
from .spin import make_spin

STATE_TOL = 1e-10
CLAMP = 1e-14
MLS_ENV_DIM = 4
A_MODES = ("optimal", "generic15")


def _xlog2x(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log2(x[pos])
    return out


def vn_entropy(rho) -> float:
    """``-sum lambda log2 lambda`` over the spectrum of a density matrix."""
    rho = as_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if not is_hermitian(rho, STATE_TOL):
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > STATE_TOL:
        raise ValueError(f"density matrix has trace {tr}, expected 1")
    lam = herm_eig(rho, STATE_TOL).eigenvalues
    if lam[0] < -STATE_TOL:
        raise ValueError(f"density matrix has negative eigenvalue {lam[0]:.3g}")
    lam = np.where(lam < CLAMP, 0.0, lam)
    return float(max(0.0, -_xlog2x(lam).sum()))


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy needs x in [0, 1], got {x}")
    return float(-_xlog2x(x) - _xlog2x(1.0 - x))


def coherent_info(ch: KrausChannel, rho) -> float:
    """``S(N(rho)) - S(N^c(rho))``."""
    rho = as_matrix(rho)
    if rho.shape != (ch.d_in, ch.d_in):
        raise ValueError(f"state of shape {rho.shape} for input dimension {ch.d_in}")
    return vn_entropy(apply(ch, rho)) - vn_entropy(apply(complementary(ch), rho))


def ic_mls_pi(j, p: float) -> float:
    """Coherent information of the MLS channel at the maximally mixed input.

    ``log2(2j+1) + (1-p) log2(1-p) + p log2(p/3)``, continuous at the endpoints.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    d = 2 * Fraction(j) + 1
    return float(np.log2(float(d)) + _xlog2x(1.0 - p) + (_xlog2x(p / 3.0) * 3.0))


def delta_correction(eta: float, d_e: int) -> float:
    """Continuity correction for an ``eta``-degradable channel with environment dimension ``d_e``."""
    if not 0.0 <= eta <= 2.0:
        raise ValueError(f"eta must lie in [0, 2], got {eta}")
    if d_e < 2:
        raise ValueError(f"environment dimension must be at least 2, got {d_e}")
    if eta == 0.0:
        return 0.0
    return float(
        0.5 * eta * np.log2(d_e - 1)
        + eta * np.log2(d_e)
        + binary_entropy(eta / 2.0)
        + (1.0 + eta / 2.0) * binary_entropy(eta / (2.0 + eta))
    )


@dataclass(frozen=True)
class CapacityPoint:
    p: float
    ic: float
    eta: float
    delta: float
    lower_bound: float


def _point(p: float, ic: float, eta: float) -> CapacityPoint:
    delta = delta_correction(eta, MLS_ENV_DIM)
    return CapacityPoint(p, ic, eta, delta, ic - delta)


def optimal_etas(j, p_grid: Sequence[float]) -> np.ndarray:
    """SDP value of eta at the optimal degrading parameter; ``p = 0`` maps to 0."""
    fam = MLS(j)
    a = fam.optimal_a()
    return np.array([0.0 if p == 0 else degrade_eta(DegradeSpec(fam, p, a)).eta for p in p_grid])


def capacity_curve(j, p_grid: Sequence[float], a_mode: str = "optimal",
                   etas: Sequence[float] | None = None) -> list[CapacityPoint]:
    """Coherent information and its degradability lower bound along ``p_grid``.

    ``generic15`` replaces eta by ``C p**1.5`` with ``C`` matched to the
    optimal-mode eta at the largest grid point. ``etas`` may carry
    precomputed optimal-mode values to avoid solving the SDPs twice.
    """
    if a_mode not in A_MODES:
        raise ValueError(f"a_mode must be one of {A_MODES}, got {a_mode!r}")
    grid = np.asarray(p_grid, dtype=float)
    if grid.size == 0 or grid.min() < 0 or grid.max() > 0.2:
        raise ValueError("capacity grid must be nonempty and lie in [0, 0.2]")
    opt = np.asarray(etas, dtype=float) if etas is not None else optimal_etas(j, grid)
    if opt.shape != grid.shape:
        raise ValueError("etas must match the grid")
    ic = [ic_mls_pi(j, p) for p in grid]
    if a_mode == "optimal":
        used = opt
    else:
        top = int(np.argmax(grid))
        c = opt[top] / grid[top] ** 1.5 if grid[top] > 0 else 0.0
        used = c * grid**1.5
    return [_point(float(p), float(i), float(e)) for p, i, e in zip(grid, ic, used)]


def mls_environment_at_pi(j, p: float) -> np.ndarray:
    """Environment output of the MLS channel for the maximally mixed input."""
    s = make_spin(j)
    ch = mls_channel(MlsParams(s.j, p), s)
    return apply(complementary(ch), np.eye(s.d) / s.d)
