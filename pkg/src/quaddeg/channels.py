"""Kraus-represented quantum channels and their Choi matrices.

Choi matrices use the input-first convention
``J(Phi) = sum_ij |i><j| (x) Phi(|i><j|)``, so the output factor is the
second tensor factor.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .matcore import as_matrix, herm_eig, is_hermitian, partial_trace, trace_norm
from .spin import SpinSystem, make_spin

TP_TOL = 1e-10
DROP_TOL = 1e-14


@dataclass(frozen=True)
class KrausChannel:
    kraus: tuple[np.ndarray, ...] = field(repr=False)
    d_in: int
    d_out: int

    def __post_init__(self):
        if len(self.kraus) == 0:
            raise ValueError("a channel needs at least one Kraus operator")
        for k in self.kraus:
            if k.shape != (self.d_out, self.d_in):
                raise ValueError(f"Kraus operator of shape {k.shape}, expected {(self.d_out, self.d_in)}")

    @classmethod
    def from_kraus(cls, kraus: Sequence, check: bool = True) -> "KrausChannel":
        ops = tuple(as_matrix(k).copy() for k in kraus)
        for k in ops:
            k.setflags(write=False)
        d_out, d_in = ops[0].shape
        ch = cls(ops, d_in, d_out)
        if check:
            defect = ch.tp_defect()
            if defect > TP_TOL:
                raise ValueError(f"Kraus operators are not trace preserving (defect {defect:.3g})")
        return ch

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)

    @property
    def n_kraus(self) -> int:
        return len(self.kraus)

    def tp_defect(self) -> float:
        s = sum(k.conj().T @ k for k in self.kraus)
        return float(np.abs(s - np.eye(self.d_in)).max())


@dataclass(frozen=True)
class LinearMapChoi:
    """A Hermiticity-preserving linear map stored through its Choi matrix."""

    choi: np.ndarray = field(repr=False)
    d_in: int
    d_out: int

    def __post_init__(self):
        n = self.d_in * self.d_out
        if self.choi.shape != (n, n):
            raise ValueError(f"Choi matrix of shape {self.choi.shape} does not match dims ({self.d_in}, {self.d_out})")
        if not is_hermitian(self.choi, 1e-10):
            raise ValueError("Choi matrix is not Hermitian")

    def __sub__(self, other: "LinearMapChoi") -> "LinearMapChoi":
        _check_same_dims(self, other)
        return LinearMapChoi(self.choi - other.choi, self.d_in, self.d_out)

    def __add__(self, other: "LinearMapChoi") -> "LinearMapChoi":
        _check_same_dims(self, other)
        return LinearMapChoi(self.choi + other.choi, self.d_in, self.d_out)

    def __mul__(self, c: float) -> "LinearMapChoi":
        return LinearMapChoi(c * self.choi, self.d_in, self.d_out)

    __rmul__ = __mul__

    def apply(self, x) -> np.ndarray:
        """``Phi(X) = Tr_in[(X^T (x) I) J]``."""
        x = as_matrix(x)
        t = self.choi.reshape(self.d_in, self.d_out, self.d_in, self.d_out)
        return np.einsum("ij,iajb->ab", x, t)


def _check_same_dims(a, b):
    if (a.d_in, a.d_out) != (b.d_in, b.d_out):
        raise ValueError(f"dimension mismatch: ({a.d_in}, {a.d_out}) vs ({b.d_in}, {b.d_out})")


@dataclass(frozen=True)
class MlsParams:
    j: Fraction
    p: float

    def __post_init__(self):
        object.__setattr__(self, "j", Fraction(self.j).limit_denominator(2))
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")

    @property
    def casimir(self) -> float:
        return float(self.j * (self.j + 1))

    @property
    def p_j(self) -> float:
        return self.p / self.casimir

    @property
    def c_j(self) -> float:
        return float(np.sqrt((1.0 - self.p) * self.p_j))


@dataclass(frozen=True)
class GpcParams:
    d: int
    p: float

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"d must be at least 2, got {self.d}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")

    @property
    def q(self) -> float:
        return self.p / (self.d**2 - 1)

    @property
    def shrink(self) -> float:
        """Factor multiplying every non-identity Weyl component."""
        return 1.0 - self.d**2 * self.p / (self.d**2 - 1)


def apply(ch: KrausChannel, rho) -> np.ndarray:
    rho = as_matrix(rho)
    if rho.shape != (ch.d_in, ch.d_in):
        raise ValueError(f"input of shape {rho.shape} for a channel on dimension {ch.d_in}")
    return sum(k @ rho @ k.conj().T for k in ch.kraus)


def adjoint_apply(ch: KrausChannel, a) -> np.ndarray:
    """Heisenberg-picture action ``sum K^H A K``."""
    a = as_matrix(a)
    if a.shape != (ch.d_out, ch.d_out):
        raise ValueError(f"operator of shape {a.shape} for a channel with output dimension {ch.d_out}")
    return sum(k.conj().T @ a @ k for k in ch.kraus)


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel.from_kraus([np.eye(d)])


def unitary_channel(u) -> KrausChannel:
    return KrausChannel.from_kraus([as_matrix(u)])


def landau_streater(s: SpinSystem) -> KrausChannel:
    g = np.sqrt(s.casimir_value)
    return KrausChannel.from_kraus([jk / g for jk in s.generators])


def mls_channel(params: MlsParams, spin: SpinSystem | None = None) -> KrausChannel:
    """Kraus set ``sqrt(1-p) I, sqrt(p_j) J_1, sqrt(p_j) J_2, sqrt(p_j) J_3``.

    All four operators are kept at ``p = 0`` or ``p = 1`` so the
    environment is always four-dimensional.
    """
    s = spin if spin is not None else make_spin(params.j)
    if s.j != params.j:
        raise ValueError("spin system does not match the channel parameters")
    k0 = np.sqrt(1.0 - params.p) * np.eye(s.d, dtype=complex)
    a = np.sqrt(params.p_j)
    return KrausChannel.from_kraus([k0] + [a * jk for jk in s.generators])


def weyl_operators(d: int) -> list[np.ndarray]:
    """``W_{m,n} = X^m Z^n`` in lexicographic order of ``(m, n)``, identity first."""
    if d < 2:
        raise ValueError(f"d must be at least 2, got {d}")
    x = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    omega = np.exp(2j * np.pi / d)
    z = np.diag(omega ** np.arange(d))
    ops = []
    for m in range(d):
        xm = np.linalg.matrix_power(x, m)
        for n in range(d):
            ops.append(xm @ np.linalg.matrix_power(z, n))
    return ops


def gpc_channel(params: GpcParams) -> KrausChannel:
    w = weyl_operators(params.d)
    kraus = [np.sqrt(1.0 - params.p) * w[0]] + [np.sqrt(params.q) * op for op in w[1:]]
    return KrausChannel.from_kraus(kraus)


def depolarizing_channel(d: int, p: float) -> KrausChannel:
    """``(1-p) rho + p tr(rho) I/d`` via the Weyl twirl."""
    w = weyl_operators(d)
    lam = 1.0 - p + p / d**2
    rest = p / d**2
    return KrausChannel.from_kraus([np.sqrt(lam) * w[0]] + [np.sqrt(rest) * op for op in w[1:]])


def choi(ch: KrausChannel) -> LinearMapChoi:
    # |k> = sum_i |i> (x) K|i>, index i * d_out + o
    vecs = np.stack([k.T.reshape(-1) for k in ch.kraus], axis=1)
    j = vecs @ vecs.conj().T
    return LinearMapChoi(0.5 * (j + j.conj().T), ch.d_in, ch.d_out)


def choi_from_action(action, d_in: int, d_out: int) -> LinearMapChoi:
    """Choi matrix assembled by applying ``action`` to every matrix unit."""
    j = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for a in range(d_in):
        for b in range(d_in):
            e = np.zeros((d_in, d_in), dtype=complex)
            e[a, b] = 1.0
            j[a * d_out:(a + 1) * d_out, b * d_out:(b + 1) * d_out] = action(e)
    return LinearMapChoi(j, d_in, d_out)


def stinespring(ch: KrausChannel) -> np.ndarray:
    """Isometry ``V|psi> = sum_mu |mu>_E (x) K_mu |psi>`` (environment first)."""
    return np.concatenate(ch.kraus, axis=0)


def complementary(ch: KrausChannel) -> KrausChannel:
    """Channel to the environment obtained by tracing the output out of the Stinespring dilation.

    The Kraus operator for output basis vector ``o`` is
    ``(I_E (x) <o|) V``, with matrix elements ``E_o[mu, i] = K_mu[o, i]``.
    """
    v = stinespring(ch).reshape(ch.n_kraus, ch.d_out, ch.d_in)
    kraus = [np.ascontiguousarray(v[:, o, :]) for o in range(ch.d_out)]
    return KrausChannel.from_kraus(kraus)


def mls_complementary_blockform(params: MlsParams, rho, spin: SpinSystem | None = None) -> np.ndarray:
    """Environment output of the MLS channel written entry by entry.

    ``(0,0) = (1-p) tr rho``, ``(k,0) = c_j tr(J_k rho)`` and
    ``(k,l) = p_j tr(J_k rho J_l)``.
    """
    s = spin if spin is not None else make_spin(params.j)
    rho = as_matrix(rho)
    if rho.shape != (s.d, s.d):
        raise ValueError(f"input of shape {rho.shape} for spin dimension {s.d}")
    out = np.empty((4, 4), dtype=complex)
    out[0, 0] = (1.0 - params.p) * np.trace(rho)
    for k, jk in enumerate(s.generators, start=1):
        out[k, 0] = params.c_j * np.trace(jk @ rho)
        out[0, k] = params.c_j * np.trace(rho @ jk)
        for l, jl in enumerate(s.generators, start=1):
            out[k, l] = params.p_j * np.trace(jk @ rho @ jl)
    return out


def compose(outer: KrausChannel, inner: KrausChannel) -> KrausChannel:
    """``outer o inner`` with Kraus set ``{A_i B_j}``; negligible products are dropped."""
    if inner.d_out != outer.d_in:
        raise ValueError(f"cannot compose: inner output {inner.d_out} != outer input {outer.d_in}")
    kraus = [a @ b for a in outer.kraus for b in inner.kraus]
    kept = [k for k in kraus if np.linalg.norm(k) >= DROP_TOL]
    if not kept:
        kept = kraus[:1]
    return KrausChannel.from_kraus(kept)


def diff_choi(a: KrausChannel, b: KrausChannel) -> LinearMapChoi:
    _check_same_dims(a, b)
    return choi(a) - choi(b)


def covariance_defect(ch: KrausChannel, s: SpinSystem, u, rho) -> float:
    """``|| ch(U rho U^H) - U ch(rho) U^H ||_1``."""
    u = as_matrix(u)
    rho = as_matrix(rho)
    if ch.d_in != s.d or ch.d_out != s.d:
        raise ValueError("channel does not act on the spin space")
    if u.shape != (s.d, s.d) or rho.shape != (s.d, s.d):
        raise ValueError("unitary or state has the wrong dimension")
    lhs = apply(ch, u @ rho @ u.conj().T)
    rhs = u @ apply(ch, rho) @ u.conj().T
    return trace_norm(lhs - rhs)


def choi_min_eigenvalue(c: LinearMapChoi) -> float:
    return float(herm_eig(c.choi, 1e-10).eigenvalues[0])


def choi_tp_defect(c: LinearMapChoi) -> float:
    """Deviation of ``Tr_out J`` from the identity."""
    red = partial_trace(c.choi, c.d_in, c.d_out, "B")
    return float(np.abs(red - np.eye(c.d_in)).max())
