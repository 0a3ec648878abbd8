"""Dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The Hermitian
eigensolver is a cyclic Jacobi method; inputs here never exceed a few dozen
rows, which is where Jacobi is both accurate and fast enough.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12
ATOL = 1e-12
RTOL = 1e-10

_JACOBI_REL_TOL = 1e-14
_JACOBI_MAX_SWEEPS = 60


class NotHermitianError(ValueError):
    pass


@dataclass(frozen=True)
class HermitianEig:
    """Eigenvalues in ascending order and the unitary whose columns are eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def dagger(m) -> np.ndarray:
    return as_matrix(m).conj().T


def partial_trace(m, dim_a: int, dim_b: int, which: str = "B") -> np.ndarray:
    """Trace out one factor of an operator on ``A (x) B``.

    ``which`` names the factor that is removed: ``"B"`` returns an operator
    on A, ``"A"`` one on B.
    """
    m = as_matrix(m)
    n = dim_a * dim_b
    if m.shape != (n, n):
        raise ValueError(f"matrix of shape {m.shape} is not {n}x{n} for dims ({dim_a}, {dim_b})")
    t = m.reshape(dim_a, dim_b, dim_a, dim_b)
    if which == "B":
        return np.einsum("ibjb->ij", t)
    if which == "A":
        return np.einsum("aiaj->ij", t)
    raise ValueError(f"which must be 'A' or 'B', not {which!r}")


def max_norm(m) -> float:
    m = as_matrix(m)
    if m.size == 0:
        return 0.0
    return float(np.abs(m).max())


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    scale = max(1.0, max_norm(m))
    return max_norm(m - m.conj().T) <= tol * scale


def _round_robin(n: int) -> list[list[tuple[int, int]]]:
    """Rounds of disjoint index pairs covering every pair exactly once."""
    players = list(range(n)) if n % 2 == 0 else list(range(n)) + [-1]
    k = len(players)
    rounds = []
    for _ in range(k - 1):
        pairs = []
        for i in range(k // 2):
            p, q = players[i], players[k - 1 - i]
            if p >= 0 and q >= 0:
                pairs.append((min(p, q), max(p, q)))
        rounds.append(pairs)
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def herm_eig(m, tol: float = HERMITIAN_TOL) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    The input is symmetrized as ``(M + M^H)/2`` after checking Hermiticity
    to ``tol`` (relative to the largest entry). Each sweep visits every
    off-diagonal pair once; pairs are grouped into disjoint rounds so a
    whole round is applied as a single unitary. Iteration stops once the
    off-diagonal Frobenius mass drops below ``1e-14 * ||M||_F``.
    """
    a = as_matrix(m)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"herm_eig needs a square matrix, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if not is_hermitian(a, tol):
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    if n == 1:
        return HermitianEig(a.diagonal().real.copy(), v)

    fro = np.linalg.norm(a)
    target = _JACOBI_REL_TOL * fro
    rounds = [
        (np.array([p for p, _ in r]), np.array([q for _, q in r])) for r in _round_robin(n)
    ]
    offmask = ~np.eye(n, dtype=bool)

    for _ in range(_JACOBI_MAX_SWEEPS):
        if np.linalg.norm(a[offmask]) <= target:
            break
        for ps, qs in rounds:
            apq = a[ps, qs]
            r = np.abs(apq)
            live = r > 1e-300
            if not live.any():
                continue
            ps_l, qs_l, apq, r = ps[live], qs[live], apq[live], r[live]
            phase = apq / r
            app = a[ps_l, ps_l].real
            aqq = a[qs_l, qs_l].real
            tau = (aqq - app) / (2.0 * r)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            g = np.eye(n, dtype=complex)
            g[ps_l, ps_l] = c
            g[ps_l, qs_l] = s
            g[qs_l, ps_l] = -s * phase.conj()
            g[qs_l, qs_l] = c * phase.conj()
            a = g.conj().T @ a @ g
            a[ps_l, qs_l] = 0.0
            a[qs_l, ps_l] = 0.0
            a = 0.5 * (a + a.conj().T)
            v = v @ g
    else:
        if np.linalg.norm(a[offmask]) > target:
            raise RuntimeError("Jacobi iteration did not converge")

    w = a.diagonal().real
    order = np.argsort(w, kind="stable")
    return HermitianEig(w[order].copy(), v[:, order])


def trace_norm(m) -> float:
    """Sum of singular values; Hermitian input goes through ``herm_eig``."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError("trace_norm needs a square matrix")
    if is_hermitian(m, 1e-10):
        return float(np.abs(herm_eig(m, 1e-10).eigenvalues).sum())
    return float(np.linalg.svd(m, compute_uv=False).sum())


def mat_exp_skew_hermitian(h, t: float) -> np.ndarray:
    """``exp(-i t H)`` for Hermitian ``H``, built from its eigendecomposition."""
    e = herm_eig(h)
    v = e.eigenvectors
    return (v * np.exp(-1j * t * e.eigenvalues)) @ v.conj().T


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (g + g.conj().T)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(g)
    return q * (r.diagonal() / np.abs(r.diagonal()))


def random_density(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    k = n if rank is None else rank
    g = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
