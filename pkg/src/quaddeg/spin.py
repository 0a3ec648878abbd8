"""Spin-j angular momentum operators of the irreducible SU(2) representation.

Basis states are ordered by descending magnetic number: row 0 is
``|j, j>`` and row ``d-1`` is ``|j, -j>``, so ``J3 = diag(j, ..., -j)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .matcore import as_matrix, kron, mat_exp_skew_hermitian

MAX_DIM = 64


def _as_spin(j) -> Fraction:
    try:
        twice = Fraction(j) * 2
    except (TypeError, ValueError) as exc:
        raise ValueError(f"invalid spin label {j!r}") from exc
    if twice.denominator != 1 or twice <= 0:
        raise ValueError(f"spin must be a positive half-integer, got {j!r}")
    return twice / 2


@dataclass(frozen=True)
class SpinSystem:
    j: Fraction
    d: int
    j1: np.ndarray = field(repr=False)
    j2: np.ndarray = field(repr=False)
    j3: np.ndarray = field(repr=False)

    @property
    def generators(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.j1, self.j2, self.j3

    @property
    def casimir_value(self) -> float:
        """``j(j+1)``."""
        return float(self.j * (self.j + 1))

    def magnetic_numbers(self) -> np.ndarray:
        return float(self.j) - np.arange(self.d)

    def basis_state(self, m) -> np.ndarray:
        """Column vector for ``|j, m>``."""
        idx = self.j - Fraction(m)
        if idx.denominator != 1 or not 0 <= idx < self.d:
            raise ValueError(f"m={m} is not a valid magnetic number for j={self.j}")
        v = np.zeros(self.d, dtype=complex)
        v[int(idx)] = 1.0
        return v


def make_spin(j) -> SpinSystem:
    """Build ``J1, J2, J3`` for spin ``j`` (an int, float, str or Fraction like ``"3/2"``).

    Matrix elements follow the ladder action
    ``J+|j,m> = sqrt(j(j+1) - m(m+1)) |j,m+1>``.
    """
    js = _as_spin(j)
    d = int(2 * js + 1)
    if d > MAX_DIM:
        raise ValueError(f"dimension {d} exceeds the supported maximum {MAX_DIM}")
    jf = float(js)
    m = jf - np.arange(d)
    # J+ maps column m (index k) to m+1 (index k-1)
    coef = np.sqrt(jf * (jf + 1) - m[1:] * (m[1:] + 1))
    jp = np.diag(coef, k=1).astype(complex)
    jm = jp.conj().T
    j1 = 0.5 * (jp + jm)
    j2 = -0.5j * (jp - jm)
    j3 = np.diag(m).astype(complex)
    for a in (j1, j2, j3):
        a.setflags(write=False)
    return SpinSystem(js, d, j1, j2, j3)


def ladder_ops(s: SpinSystem) -> tuple[np.ndarray, np.ndarray]:
    jp = s.j1 + 1j * s.j2
    return jp, jp.conj().T


def cyclic(k: int, shift: int) -> int:
    """Generator index ``k + shift`` with the wrap-around 3 -> 1 (indices are 1-based)."""
    return (k - 1 + shift) % 3 + 1


def generator(s: SpinSystem, k: int) -> np.ndarray:
    """``J_k`` for ``k`` in {1, 2, 3}."""
    if k not in (1, 2, 3):
        raise ValueError(f"generator index must be 1, 2 or 3, got {k}")
    return s.generators[k - 1]


def conjugation_sum(s: SpinSystem, a) -> np.ndarray:
    """``sum_l J_l A J_l``."""
    a = as_matrix(a)
    if a.shape != (s.d, s.d):
        raise ValueError(f"operator shape {a.shape} does not match spin dimension {s.d}")
    return sum(jl @ a @ jl for jl in s.generators)


def singlet_state(s: SpinSystem) -> np.ndarray:
    """``d^(-1/2) sum_m (-1)^(j-m) |j,m> (x) |j,-m>`` as a length ``d**2`` vector."""
    d = s.d
    psi = np.zeros(d * d, dtype=complex)
    for k in range(d):
        # index k <-> m = j - k, so -m sits at index d-1-k and (-1)^(j-m) = (-1)^k
        psi[k * d + (d - 1 - k)] = (-1) ** k
    return psi / np.sqrt(d)


def random_su2_unitary(s: SpinSystem, seed: int) -> np.ndarray:
    """``exp(-i theta n.J)`` with ``theta ~ U[0, 2pi)`` and ``n`` uniform on the sphere.

    Randomness comes from numpy's PCG64 bit generator seeded with ``seed``,
    so the result is reproducible across platforms.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    theta = rng.uniform(0.0, 2.0 * np.pi)
    n = rng.normal(size=3)
    n /= np.linalg.norm(n)
    return rotation(s, n, theta)


def rotation(s: SpinSystem, axis, theta: float) -> np.ndarray:
    n = np.asarray(axis, dtype=float)
    h = n[0] * s.j1 + n[1] * s.j2 + n[2] * s.j3
    return mat_exp_skew_hermitian(h, theta)


def adjoint_rotation_matrix(s: SpinSystem, u) -> np.ndarray:
    """Coefficients ``R`` with ``U^H J_k U = sum_l R[k, l] J_l``.

    Uses Hilbert-Schmidt orthogonality of the generators; the result is
    complex-typed so callers can check that the imaginary part vanishes.
    """
    u = as_matrix(u)
    norm = s.casimir_value * s.d / 3.0
    r = np.empty((3, 3), dtype=complex)
    for k, jk in enumerate(s.generators):
        rot = u.conj().T @ jk @ u
        for l, jl in enumerate(s.generators):
            r[k, l] = np.trace(jl @ rot) / norm
    return r


def total_generator(s: SpinSystem, k: int) -> np.ndarray:
    """``J_k (x) I + I (x) J_k`` on two copies of the spin."""
    jk = generator(s, k)
    eye = np.eye(s.d)
    return kron(jk, eye) + kron(eye, jk)
