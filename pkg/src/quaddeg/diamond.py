"""Diamond norm of a Hermiticity-preserving map, plus cheap bounds around it.

The norm is computed from the semidefinite program::

    minimize   (||Tr_out Y0||_inf + ||Tr_out Y1||_inf) / 2
    subject to [[Y0, -J], [-J^H, Y1]] >= 0

with each ``||Tr_out Y||_inf`` written in epigraph form
``t I - Tr_out Y >= 0``. Complex Hermitian blocks are handed to the real
solver through ``H -> [[Re H, -Im H], [Im H, Re H]]``.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .channels import LinearMapChoi
from .matcore import as_matrix, max_norm, trace_norm
from .sdp import SdpProblem, SdpSolution, SdpStatus, SolverError, solve


def _lower(rows, cols, vals, size: int):
    """COO entries of a real symmetric ``G'`` with ``<G', embed(H)> = Re tr(G H)``.

    ``G`` is given by its complex COO entries and ``H`` ranges over Hermitian
    matrices of size ``size``. Since ``tr(embed(G) embed(H)) = 2 Re tr(G H)``
    the embedded matrix is halved here; this is the only place the factor
    of two appears.
    """
    r = np.asarray(rows, dtype=np.intp)
    c = np.asarray(cols, dtype=np.intp)
    v = np.asarray(vals, dtype=complex)
    er = np.concatenate([r, r, r + size, r + size])
    ec = np.concatenate([c, c + size, c, c + size])
    ev = np.concatenate([v.real, -v.imag, v.imag, v.real])
    keep = ev != 0.0
    er, ec, ev = er[keep], ec[keep], ev[keep]
    return np.concatenate([er, ec]), np.concatenate([ec, er]), 0.25 * np.concatenate([ev, ev])


def _hermitian_basis(d: int) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """COO triples of matrices ``G`` whose functionals ``Re tr(G H)`` determine a Hermitian ``H``."""
    basis = []
    for a in range(d):
        basis.append((np.array([a]), np.array([a]), np.array([1.0 + 0j])))
    for a in range(d):
        for b in range(a + 1, d):
            basis.append((np.array([a, b]), np.array([b, a]), np.array([1.0 + 0j, 1.0 + 0j])))
            basis.append((np.array([a, b]), np.array([b, a]), np.array([1j, -1j])))
    return basis


class _Rows:
    """Accumulates constraint entries for one block as (constraint, flat index, value)."""

    def __init__(self, size: int):
        self.size = size
        self.i, self.f, self.v = [], [], []

    def add(self, row: int, r, c, v):
        self.i.append(np.full(len(r), row, dtype=np.intp))
        self.f.append(np.asarray(r) * self.size + np.asarray(c))
        self.v.append(np.asarray(v, dtype=float))

    def csr(self, m: int) -> sp.csr_matrix:
        if not self.i:
            return sp.csr_matrix((m, self.size * self.size))
        a = sp.coo_matrix(
            (np.concatenate(self.v), (np.concatenate(self.i), np.concatenate(self.f))),
            shape=(m, self.size * self.size),
        ).tocsr()
        a.eliminate_zeros()
        return a


def diamond_problem(phi: LinearMapChoi) -> SdpProblem:
    """SDP whose optimal value is ``||phi||_diamond``.

    Blocks, in order: the embedded ``[[Y0, W01], [W01^H, Y1]]`` (real size
    ``4n`` with ``n = d_in d_out``), the two embedded slacks
    ``t_k I - Tr_out Y_k`` (real size ``2 d_in``), and ``t0``, ``t1`` as
    1x1 blocks (both are nonnegative at any feasible point).
    """
    d_in, d_out = phi.d_in, phi.d_out
    n = d_in * d_out
    jm = as_matrix(phi.choi)
    big = 2 * n
    dims = (2 * big, 2 * d_in, 2 * d_in, 1, 1)
    blocks = [_Rows(k) for k in dims]
    rhs = []

    # off-diagonal block pinned to -J: Re tr(G W) picks W[p, n+q] for G = E_{n+q, p}
    pq = np.arange(n * n)
    p, q = pq // n, pq % n
    row0 = 0
    for coef, target in ((1.0, -jm.real), (-1j, -jm.imag)):
        er, ec, ev = _lower(n + q, p, np.full(n * n, coef), big)
        # entries come in 8 groups of n*n (4 embedded copies, then their transposes)
        which = np.tile(pq, len(er) // (n * n))
        blocks[0].i.append(row0 + 2 * which)
        blocks[0].f.append(er * blocks[0].size + ec)
        blocks[0].v.append(ev)
        rhs.append((row0, target.reshape(-1)))
        row0 += 1
    m_off = 2 * n * n
    b = np.zeros(m_off + 2 * d_in * d_in)
    for shift, vals in rhs:
        b[shift:m_off:2] = vals

    row = m_off
    outs = np.arange(d_out)
    for which in (0, 1):
        off = which * n
        for hr, hc, hv in _hermitian_basis(d_in):
            wr = (hr[:, None] * d_out + outs[None, :]).reshape(-1) + off
            wc = (hc[:, None] * d_out + outs[None, :]).reshape(-1) + off
            wv = np.repeat(hv, d_out)
            blocks[0].add(row, *_lower(wr, wc, wv, big))
            blocks[1 + which].add(row, *_lower(hr, hc, hv, d_in))
            blocks[3 + which].add(row, [0], [0], [-hv[hr == hc].real.sum()])
            row += 1

    objective = [np.zeros((k, k)) for k in dims[:3]] + [np.full((1, 1), 0.5), np.full((1, 1), 0.5)]
    return SdpProblem(
        block_dims=dims,
        objective=objective,
        constraints=[blk.csr(len(b)) for blk in blocks],
        rhs=b,
    )


def diamond_norm_solution(phi: LinearMapChoi) -> tuple[float, SdpSolution]:
    """Diamond norm and the raw solver output.

    The Choi matrix is rescaled to unit max-norm before solving so the
    solver's relative tolerances act relative to the answer's magnitude.
    """
    scale = max_norm(phi.choi)
    if scale == 0.0:
        scale = 1.0
    prob = diamond_problem(LinearMapChoi(phi.choi / scale, phi.d_in, phi.d_out))
    sol = solve(prob)
    if sol.status is not SdpStatus.OPTIMAL:
        raise SolverError(f"diamond-norm SDP ended with status {sol.status.value}", sol)
    return max(0.0, sol.primal_value) * scale, sol


def diamond_norm(phi: LinearMapChoi) -> float:
    return diamond_norm_solution(phi)[0]


def diamond_upper_maxnorm(phi: LinearMapChoi) -> float:
    """``d_in * d_out**2 * max_ij |J_ij|``."""
    return phi.d_in * phi.d_out**2 * max_norm(phi.choi)


def apply_on_probe(phi: LinearMapChoi, probe) -> np.ndarray:
    """``(id (x) phi)(|psi><psi|)`` for ``psi`` on reference (x) input."""
    psi = np.asarray(probe, dtype=complex).reshape(-1)
    if psi.shape[0] % phi.d_in:
        raise ValueError(f"probe of length {psi.shape[0]} does not factor through input dimension {phi.d_in}")
    mat = psi.reshape(-1, phi.d_in)
    lift = np.kron(mat, np.eye(phi.d_out))
    return lift @ phi.choi @ lift.conj().T


def diamond_lower_entangled(phi: LinearMapChoi, probe) -> float:
    """``||(id (x) phi)(|psi><psi|)||_1`` for a unit probe vector ``psi``."""
    psi = np.asarray(probe, dtype=complex).reshape(-1)
    if psi.shape[0] != phi.d_in**2:
        raise ValueError(f"probe must have length {phi.d_in ** 2}, got {psi.shape[0]}")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ValueError("probe must be a unit vector")
    return trace_norm(apply_on_probe(phi, psi))


def maximally_entangled(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
