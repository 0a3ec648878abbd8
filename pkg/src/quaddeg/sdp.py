"""Dense primal-dual interior point solver for block-diagonal semidefinite programs.

Standard form, with ``X = diag(X_1, ..., X_K)`` real symmetric and ``u`` free::

    minimize    sum_k <C_k, X_k> + c_u . u
    subject to  sum_k <A_ik, X_k> + (B u)_i = b_i      i = 1..m
                X_k >= 0

and its dual::

    maximize    b . y
    subject to  C_k - sum_i y_i A_ik = Z_k >= 0,   B^T y = c_u

Search directions are HKM (``dX = sym((R_c - X dZ) Z^-1)``) with a
Mehrotra predictor-corrector. The Schur complement
``M_ij = tr(A_i X A_j Z^-1)`` is formed blockwise: constraints touching
only a few entries of a block are handled by index gathers, the rest by
explicit dense products.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

log = logging.getLogger(__name__)

GAP_TOL = 1e-9
FEAS_TOL = 1e-9
MAX_ITER = 200
STEP_FRACTION = 0.98
REFINE_STEPS = 2
PCG_STEPS = 8
# an iterate that stalls short of the targets is still reported optimal if it
# meets the targets relaxed by this factor, i.e. the SdpSolution guarantees
ACCEPT_FACTOR = 10.0
STALL_ITERS = 5
SYM_TOL = 1e-12

# constraints with at most this many nonzeros in a block use the gather path
_SPARSE_NNZ = 4


class SdpStatus(enum.Enum):
    OPTIMAL = "Optimal"
    MAX_ITER = "MaxIter"
    NUMERICAL_FAILURE = "NumericalFailure"


class SolverError(RuntimeError):
    def __init__(self, message: str, solution: "SdpSolution | None" = None):
        super().__init__(message)
        self.solution = solution


@dataclass
class SdpProblem:
    """Block-diagonal SDP in standard primal form.

    ``constraints[k]`` is an ``m x n_k**2`` sparse matrix whose row ``i`` is
    the row-major flattening of the (full, symmetric) matrix ``A_ik``.
    ``free_coef`` (``m x f``) and ``free_cost`` (``f``) describe free scalars.
    """

    block_dims: tuple[int, ...]
    objective: list[np.ndarray]
    constraints: list[sp.csr_matrix]
    rhs: np.ndarray
    free_coef: np.ndarray | None = None
    free_cost: np.ndarray | None = None

    def __post_init__(self):
        self.block_dims = tuple(int(n) for n in self.block_dims)
        self.rhs = np.asarray(self.rhs, dtype=float)
        m = self.rhs.shape[0]
        if len(self.objective) != len(self.block_dims) or len(self.constraints) != len(self.block_dims):
            raise ValueError("objective and constraint lists must have one entry per block")
        self.objective = [np.asarray(c, dtype=float) for c in self.objective]
        self.constraints = [sp.csr_matrix(a, dtype=float) for a in self.constraints]
        for n, c, a in zip(self.block_dims, self.objective, self.constraints):
            if c.shape != (n, n):
                raise ValueError(f"objective block of shape {c.shape}, expected {(n, n)}")
            if np.abs(c - c.T).max(initial=0.0) > SYM_TOL * max(1.0, np.abs(c).max(initial=0.0)):
                raise ValueError("objective block is not symmetric")
            if a.shape != (m, n * n):
                raise ValueError(f"constraint block of shape {a.shape}, expected {(m, n * n)}")
            perm = np.arange(n * n).reshape(n, n).T.reshape(-1)
            asym = a - a[:, perm]
            if asym.nnz and np.abs(asym.data).max() > SYM_TOL * max(1.0, np.abs(a.data).max(initial=0.0)):
                raise ValueError("constraint matrix is not symmetric")
        if self.free_coef is None:
            self.free_coef = np.zeros((m, 0))
            self.free_cost = np.zeros(0)
        self.free_coef = np.asarray(self.free_coef, dtype=float).reshape(m, -1)
        self.free_cost = np.asarray(self.free_cost, dtype=float).reshape(-1)
        if self.free_coef.shape[1] != self.free_cost.shape[0]:
            raise ValueError("free_coef and free_cost disagree on the number of free variables")

    @property
    def n_constraints(self) -> int:
        return self.rhs.shape[0]

    @property
    def n_free(self) -> int:
        return self.free_cost.shape[0]

    @classmethod
    def from_pairs(
        cls,
        block_dims: Sequence[int],
        objective: Sequence,
        pairs: Sequence[tuple[Sequence, float]],
        free_cost: Sequence[float] | None = None,
        free_coefs: Sequence[Sequence[float]] | None = None,
    ) -> "SdpProblem":
        """Build from ``(blocks, b)`` pairs; ``blocks[k]`` is a matrix or ``None``.

        ``free_coefs[i]`` gives the free-variable coefficients of constraint ``i``.
        """
        rows = [[] for _ in block_dims]
        for blocks, _ in pairs:
            if len(blocks) != len(block_dims):
                raise ValueError("each constraint needs one entry per block")
            for k, (n, a) in enumerate(zip(block_dims, blocks)):
                if a is None:
                    rows[k].append(sp.csr_matrix((1, n * n)))
                else:
                    a = sp.csr_matrix(a)
                    if a.shape != (n, n):
                        raise ValueError(f"constraint block of shape {a.shape}, expected {(n, n)}")
                    rows[k].append(a.reshape(1, n * n))
        constraints = [sp.vstack(r, format="csr") for r in rows]
        rhs = np.array([b for _, b in pairs], dtype=float)
        fc = None
        if free_cost is not None:
            fc = np.asarray(free_coefs, dtype=float).reshape(len(pairs), -1)
        return cls(tuple(block_dims), list(objective), constraints, rhs, fc,
                   None if free_cost is None else np.asarray(free_cost, dtype=float))

    def apply_constraints(self, xs: Sequence[np.ndarray]) -> np.ndarray:
        out = np.zeros(self.n_constraints)
        for a, x in zip(self.constraints, xs):
            out += a @ x.reshape(-1)
        return out

    def adjoint(self, y: np.ndarray) -> list[np.ndarray]:
        return [(a.T @ y).reshape(n, n) for n, a in zip(self.block_dims, self.constraints)]


@dataclass
class SdpSolution:
    primal_value: float
    dual_value: float
    gap: float
    x: list[np.ndarray] = field(repr=False)
    u: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    z: list[np.ndarray] = field(repr=False)
    iterations: int
    status: SdpStatus
    primal_residual: float
    dual_residual: float

    @property
    def value(self) -> float:
        return self.primal_value


class _BlockSchur:
    """Precomputed index data for forming one block's Schur contribution."""

    def __init__(self, a: sp.csr_matrix, n: int):
        self.a = a
        self.n = n
        nnz = np.diff(a.indptr)
        touched = np.flatnonzero(nnz)
        self.sparse_rows = touched[nnz[touched] <= _SPARSE_NNZ]
        self.dense_rows = touched[nnz[touched] > _SPARSE_NNZ]
        s = len(self.sparse_rows)
        k = int(nnz[self.sparse_rows].max()) if s else 0
        self.r = np.zeros((s, k), dtype=np.intp)
        self.c = np.zeros((s, k), dtype=np.intp)
        self.v = np.zeros((s, k))
        for t, i in enumerate(self.sparse_rows):
            lo, hi = a.indptr[i], a.indptr[i + 1]
            cols = a.indices[lo:hi]
            self.r[t, : hi - lo] = cols // n
            self.c[t, : hi - lo] = cols % n
            self.v[t, : hi - lo] = a.data[lo:hi]
        self.dense_mats = [a[i].toarray().reshape(n, n) for i in self.dense_rows]

    def add_to(self, m: np.ndarray, x: np.ndarray, zinv: np.ndarray) -> None:
        rows = self.sparse_rows
        if len(rows):
            # term(k, l)[i, j] = v_ik v_jl X[c_ik, r_jl] Zinv[r_ik, c_jl]
            acc = np.zeros((len(rows), len(rows)))
            kk = self.r.shape[1]
            for k in range(kk):
                xk = x[self.c[:, k]] * self.v[:, k, None]
                zk = zinv[self.r[:, k]]
                for l in range(kk):
                    term = np.take(xk, self.r[:, l], axis=1)
                    term *= np.take(zk, self.c[:, l], axis=1)
                    term *= self.v[None, :, l]
                    acc += term
            m[np.ix_(rows, rows)] += acc
        if len(self.dense_rows):
            gt = np.stack([(x @ aj @ zinv).T.reshape(-1) for aj in self.dense_mats], axis=1)
            cols = self.a @ gt
            m[:, self.dense_rows] += cols
            # the dense-dense entries were already added as part of the columns
            upd = cols.T.copy()
            upd[:, self.dense_rows] = 0.0
            m[self.dense_rows, :] += upd


def _sym(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def _inner(a: Sequence[np.ndarray], b: Sequence[np.ndarray]) -> float:
    return float(sum(np.vdot(x, y).real for x, y in zip(a, b)))


def _max_step(x: np.ndarray, dx: np.ndarray) -> float:
    """Largest ``alpha`` with ``x + alpha dx`` PSD (``inf`` if unbounded)."""
    try:
        l = np.linalg.cholesky(x)
    except np.linalg.LinAlgError:
        return 0.0
    t = sla.solve_triangular(l, dx, lower=True)
    t = sla.solve_triangular(l, t.T, lower=True)
    lam = np.linalg.eigvalsh(_sym(t))[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _factor(m: np.ndarray):
    scale = max(1.0, float(np.abs(np.diag(m)).max(initial=0.0)))
    reg = 0.0
    for _ in range(8):
        try:
            return sla.cho_factor(m + reg * np.eye(m.shape[0]), lower=True, check_finite=False)
        except (np.linalg.LinAlgError, sla.LinAlgError):
            reg = 1e-15 * scale if reg == 0.0 else reg * 100.0
    return None


def solve(prob: SdpProblem, max_iter: int = MAX_ITER, gap_tol: float = GAP_TOL,
          feas_tol: float = FEAS_TOL) -> SdpSolution:
    """Run the interior point method; ``status`` reports how it stopped."""
    dims = prob.block_dims
    ntot = sum(dims)
    m = prob.n_constraints
    b = prob.rhs
    cs = prob.objective
    bmat = prob.free_coef
    cu = prob.free_cost
    schur = [_BlockSchur(a, n) for a, n in zip(prob.constraints, dims)]

    norm_b = np.linalg.norm(b)
    norm_c = np.sqrt(sum(np.sum(c * c) for c in cs) + np.sum(cu * cu))
    a_norms = np.sqrt(sum(np.asarray(a.multiply(a).sum(axis=1)).ravel() for a in prob.constraints))
    a_norms = np.maximum(a_norms, 1e-300)
    xi = max(10.0, np.sqrt(max(dims)), float(np.max(max(dims) * (1.0 + np.abs(b)) / (1.0 + a_norms))))
    eta = max(10.0, np.sqrt(max(dims)), float(a_norms.max()), norm_c)
    xs = [xi * np.eye(n) for n in dims]
    zs = [eta * np.eye(n) for n in dims]
    y = np.zeros(m)
    u = np.zeros(prob.n_free)

    status = SdpStatus.MAX_ITER
    it = 0
    pobj = dobj = np.nan
    pres = dres = np.inf
    best = None
    best_merit = np.inf
    since_best = 0

    def residuals(xs, u, y, zs):
        rp = b - prob.apply_constraints(xs) - bmat @ u
        aty = prob.adjoint(y)
        rd = [c - z - g for c, z, g in zip(cs, zs, aty)]
        ru = cu - bmat.T @ y
        return rp, rd, ru

    for it in range(max_iter + 1):
        rp, rd, ru = residuals(xs, u, y, zs)
        pobj = _inner(cs, xs) + float(cu @ u)
        dobj = float(b @ y)
        pres = np.linalg.norm(rp) / (1.0 + norm_b)
        dres = np.sqrt(sum(np.sum(r * r) for r in rd) + np.sum(ru * ru)) / (1.0 + norm_c)
        relgap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        mu = _inner(xs, zs) / ntot
        log.debug("it %3d pobj %.12e dobj %.12e gap %.2e pres %.2e dres %.2e mu %.2e",
                  it, pobj, dobj, relgap, pres, dres, mu)
        if relgap <= gap_tol and pres <= feas_tol and dres <= feas_tol:
            status = SdpStatus.OPTIMAL
            break
        merit = max(relgap / gap_tol, pres / feas_tol, dres / feas_tol)
        if merit < 0.9 * best_merit:
            since_best = 0
        else:
            since_best += 1
        if merit < best_merit:
            best_merit = merit
            best = (it, xs, u, y, zs, pobj, dobj, pres, dres, relgap)
        if it == max_iter:
            break
        if since_best >= STALL_ITERS:
            status = SdpStatus.NUMERICAL_FAILURE
            log.debug("stalled at iteration %d", it)
            break

        try:
            zinvs = [sla.cho_solve(sla.cho_factor(z, lower=True), np.eye(z.shape[0])) for z in zs]
        except (np.linalg.LinAlgError, sla.LinAlgError):
            status = SdpStatus.NUMERICAL_FAILURE
            break
        zinvs = [_sym(zi) for zi in zinvs]
        mmat = np.zeros((m, m))
        for s, x, zi in zip(schur, xs, zinvs):
            s.add_to(mmat, x, zi)
        mmat = _sym(mmat)
        fac = _factor(mmat)
        if fac is None:
            status = SdpStatus.NUMERICAL_FAILURE
            break
        if prob.n_free:
            minv_b = sla.cho_solve(fac, bmat)
            bmb = bmat.T @ minv_b
            try:
                fac_u = sla.cho_factor(_sym(bmb), lower=True)
            except (np.linalg.LinAlgError, sla.LinAlgError):
                status = SdpStatus.NUMERICAL_FAILURE
                break

        def schur_solve(h, ru_target):
            if prob.n_free:
                minv_h = sla.cho_solve(fac, h)
                du = sla.cho_solve(fac_u, bmat.T @ minv_h - ru_target)
                return minv_h - minv_b @ du, du
            return sla.cho_solve(fac, h), np.zeros(0)

        def schur_op(v):
            # the unreduced Schur operator v -> A(sym(X A^T(v) Z^-1))
            g = prob.adjoint(v)
            return prob.apply_constraints([_sym(x @ gi @ zi) for x, gi, zi in zip(xs, g, zinvs)])

        def pcg(h, y0):
            # conjugate gradients on M dy = h preconditioned by the Cholesky factor; near the
            # optimum M is so ill conditioned that plain refinement can diverge while PCG cannot
            tol = 1e-15 * (1.0 + norm_b)
            y = y0
            r = h - schur_op(y)
            best, best_r = y, np.linalg.norm(r)
            z = sla.cho_solve(fac, r)
            d = z
            rz = r @ z
            for _ in range(PCG_STEPS):
                if best_r <= tol or rz <= 0.0:
                    break
                q = schur_op(d)
                dq = d @ q
                if dq <= 0.0:
                    break
                alpha = rz / dq
                y = y + alpha * d
                r = r - alpha * q
                nr = np.linalg.norm(r)
                if nr < best_r:
                    best, best_r = y, nr
                z = sla.cho_solve(fac, r)
                rz_new = r @ z
                d = z + (rz_new / rz) * d
                rz = rz_new
            return best

        def refine(dxs, du, dy, dzs):
            # iterative refinement against the unreduced primal equation A(dX) + B du = rp
            for _ in range(REFINE_STEPS):
                r1 = rp - prob.apply_constraints(dxs) - bmat @ du
                r2 = ru - bmat.T @ dy
                if np.linalg.norm(r1) + np.linalg.norm(r2) <= 1e-15 * (1.0 + norm_b):
                    break
                ddy, ddu = schur_solve(r1, r2)
                dy = dy + ddy
                du = du + ddu
                corr = prob.adjoint(ddy)
                dzs = [dz - g for dz, g in zip(dzs, corr)]
                dxs = [dx + _sym(x @ g @ zi) for dx, x, g, zi in zip(dxs, xs, corr, zinvs)]
            return dxs, du, dy, dzs

        def direction(rcs):
            # rcs: complementarity targets R_c = sigma mu I - X Z - corrections
            h = rp - prob.apply_constraints(
                [(rc - x @ r) @ zi for rc, x, r, zi in zip(rcs, xs, rd, zinvs)]
            )
            dy, du = schur_solve(h, ru)
            aty = prob.adjoint(dy)
            dzs = [r - g for r, g in zip(rd, aty)]
            dxs = [_sym((rc - x @ dz) @ zi) for rc, x, dz, zi in zip(rcs, xs, dzs, zinvs)]
            if prob.n_free:
                dxs, du, dy, dzs = refine(dxs, du, dy, dzs)
            else:
                dy = pcg(h, dy)
                aty = prob.adjoint(dy)
                dzs = [r - g for r, g in zip(rd, aty)]
                dxs = [_sym((rc - x @ dz) @ zi) for rc, x, dz, zi in zip(rcs, xs, dzs, zinvs)]
            return dxs, du, dy, dzs

        def steps(dxs, dzs):
            ap = min([_max_step(x, dx) for x, dx in zip(xs, dxs)] + [np.inf])
            ad = min([_max_step(z, dz) for z, dz in zip(zs, dzs)] + [np.inf])
            return min(1.0, STEP_FRACTION * ap), min(1.0, STEP_FRACTION * ad)

        xz = [x @ z for x, z in zip(xs, zs)]
        dxa, dua, dya, dza = direction([-p for p in xz])
        apa, ada = steps(dxa, dza)
        mu_aff = _inner([x + apa * dx for x, dx in zip(xs, dxa)],
                        [z + ada * dz for z, dz in zip(zs, dza)]) / ntot
        sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3)) if mu > 0 else 0.0
        rcs = [sigma * mu * np.eye(x.shape[0]) - p - dx @ dz
               for x, p, dx, dz in zip(xs, xz, dxa, dza)]
        dxs, du, dy, dzs = direction(rcs)
        ap, ad = steps(dxs, dzs)
        if ap < 1e-12 and ad < 1e-12:
            status = SdpStatus.NUMERICAL_FAILURE
            break
        xs = [x + ap * dx for x, dx in zip(xs, dxs)]
        u = u + ap * du
        y = y + ad * dy
        zs = [_sym(z + ad * dz) for z, dz in zip(zs, dzs)]

    if status is not SdpStatus.OPTIMAL and best is not None:
        b_it, b_xs, b_u, b_y, b_zs, b_p, b_d, b_pres, b_dres, b_gap = best
        loose_gap, loose_feas = ACCEPT_FACTOR * gap_tol, ACCEPT_FACTOR * feas_tol
        if abs(b_p - b_d) <= loose_gap * (1.0 + abs(b_p)) and b_pres <= loose_feas and b_dres <= loose_feas:
            log.debug("accepting iterate %d after stall (gap %.1e, pres %.1e)", b_it, b_gap, b_pres)
            status = SdpStatus.OPTIMAL
            it, xs, u, y, zs, pobj, dobj, pres, dres = b_it, b_xs, b_u, b_y, b_zs, b_p, b_d, b_pres, b_dres

    return SdpSolution(
        primal_value=pobj,
        dual_value=dobj,
        gap=abs(pobj - dobj),
        x=xs,
        u=u,
        y=y,
        z=zs,
        iterations=it,
        status=status,
        primal_residual=pres,
        dual_residual=dres,
    )
