"""Numerical invariant checks shared by ``quaddeg verify`` and the test suite.

Every check returns the largest defect it observed, so callers compare
against their own tolerance and can report how close a pass was.
"""
from __future__ import annotations

import numpy as np

from .channels import (
    GpcParams,
    KrausChannel,
    MlsParams,
    adjoint_apply,
    apply,
    choi,
    complementary,
    covariance_defect,
    gpc_channel,
    identity_channel,
    mls_channel,
    mls_complementary_blockform,
    weyl_operators,
)
from .diamond import diamond_norm
from .matcore import random_density, random_unitary
from .sdp import SdpProblem, SdpStatus, solve
from .spin import SpinSystem, conjugation_sum, cyclic, generator, make_spin, random_su2_unitary, singlet_state

SPINS = ("1/2", "1", "3/2", "2", "5/2")

_LEVI = {(1, 2, 3): 1, (2, 3, 1): 1, (3, 1, 2): 1, (1, 3, 2): -1, (3, 2, 1): -1, (2, 1, 3): -1}


def _dev(a, b) -> float:
    return float(np.abs(np.asarray(a) - np.asarray(b)).max())


def commutator_defect(s: SpinSystem) -> float:
    """``[J_a, J_b] = i eps_abc J_c`` over all ordered pairs."""
    worst = 0.0
    for a in (1, 2, 3):
        for b in (1, 2, 3):
            ja, jb = generator(s, a), generator(s, b)
            rhs = np.zeros((s.d, s.d), dtype=complex)
            for c in (1, 2, 3):
                rhs += 1j * _LEVI.get((a, b, c), 0) * generator(s, c)
            worst = max(worst, _dev(ja @ jb - jb @ ja, rhs))
    return worst


def casimir_defect(s: SpinSystem) -> float:
    total = sum(jk @ jk for jk in s.generators)
    return _dev(total, s.casimir_value * np.eye(s.d))


def trace_defect(s: SpinSystem) -> float:
    return max(abs(np.trace(jk)) for jk in s.generators)


def hermiticity_defect(s: SpinSystem) -> float:
    return max(_dev(jk, jk.conj().T) for jk in s.generators)


def conjugation_sum_defects(s: SpinSystem) -> tuple[float, float, float]:
    """Defects of the three conjugation-sum identities, each maximised over ``k``."""
    g = s.casimir_value
    eye = np.eye(s.d)
    d1 = d2 = d3 = 0.0
    for k in (1, 2, 3):
        jk = generator(s, k)
        jk1 = generator(s, cyclic(k, 1))
        jk2 = generator(s, cyclic(k, 2))
        d1 = max(d1, _dev(conjugation_sum(s, jk), (g - 1) * jk))
        d2 = max(d2, _dev(conjugation_sum(s, jk @ jk), (g - 3) * jk @ jk + g * eye))
        d3 = max(d3, _dev(conjugation_sum(s, jk @ jk1), (g - 3) * jk @ jk1 + 1j * jk2))
    return d1, d2, d3


def spin_defects(j) -> dict[str, float]:
    """All spin-algebra defects for a spin label or a prebuilt ``SpinSystem``."""
    s = j if isinstance(j, SpinSystem) else make_spin(j)
    d1, d2, d3 = conjugation_sum_defects(s)
    return {
        "commutator": commutator_defect(s),
        "casimir": casimir_defect(s),
        "trace": trace_defect(s),
        "hermitian": hermiticity_defect(s),
        "conj_sum_linear": d1,
        "conj_sum_square": d2,
        "conj_sum_product": d3,
    }


def singlet_defects(s: SpinSystem) -> dict[str, float]:
    psi = singlet_state(s)
    eye = np.eye(s.d)
    annihilation = max(
        float(np.abs((np.kron(jk, eye) + np.kron(eye, jk)) @ psi).max()) for jk in s.generators
    )
    # <psi| (LS (x) id)(|psi><psi|) |psi> with LS acting on the first factor
    # built from the raw generators so a corrupted spin system is reported, not rejected
    rho = np.outer(psi, psi.conj())
    lifted = [np.kron(jk, eye) for jk in s.generators]
    out = sum(k @ rho @ k.conj().T for k in lifted) / s.casimir_value
    overlap = abs(psi.conj() @ out @ psi)
    return {"annihilation": annihilation, "ls_overlap": float(overlap)}


def mls_eigen_defect(j, p: float) -> float:
    """``M^dagger(J_k) = (1 - p/(j(j+1))) J_k`` for all ``k``."""
    s = make_spin(j)
    ch = mls_channel(MlsParams(s.j, p), s)
    lam = 1.0 - p / s.casimir_value
    return max(_dev(adjoint_apply(ch, jk), lam * jk) for jk in s.generators)


def gpc_eigen_defect(d: int, p: float) -> float:
    """``N^dagger(W) = (1 - d^2 p/(d^2-1)) W`` for every non-identity Weyl operator."""
    params = GpcParams(d, p)
    ch = gpc_channel(params)
    return max(_dev(adjoint_apply(ch, w), params.shrink * w) for w in weyl_operators(d)[1:])


def blockform_defect(j, p: float, n_states: int = 20, seed: int = 0) -> float:
    """Entry-wise block formula against the Stinespring complementary on random states."""
    rng = np.random.Generator(np.random.PCG64(seed))
    s = make_spin(j)
    params = MlsParams(s.j, p)
    comp = complementary(mls_channel(params, s))
    worst = 0.0
    for _ in range(n_states):
        rho = random_density(s.d, rng)
        worst = max(worst, _dev(mls_complementary_blockform(params, rho, s), apply(comp, rho)))
    return worst


def environment_pi_defect(j, p: float) -> float:
    s = make_spin(j)
    comp = complementary(mls_channel(MlsParams(s.j, p), s))
    env = apply(comp, np.eye(s.d) / s.d)
    return _dev(env, np.diag([1.0 - p, p / 3, p / 3, p / 3]))


def dropped_kraus_mls(j, p: float, drop: int = 3) -> KrausChannel:
    """MLS with the ``J_drop`` Kraus operator removed: trace decreasing and not SU(2) covariant."""
    s = make_spin(j)
    full = mls_channel(MlsParams(s.j, p), s)
    kept = tuple(k for i, k in enumerate(full.kraus) if i != drop)
    return KrausChannel(kept, s.d, s.d)


def covariance_max_defect(ch: KrausChannel, j, n_unitaries: int = 100, n_states: int = 10,
                          seed: int = 0) -> float:
    """Largest ``||ch(U rho U^H) - U ch(rho) U^H||_1`` over seeded SU(2) unitaries and random states."""
    s = make_spin(j)
    rng = np.random.Generator(np.random.PCG64(seed))
    states = [random_density(s.d, rng) for _ in range(n_states)]
    worst = 0.0
    for t in range(n_unitaries):
        u = random_su2_unitary(s, seed * 100003 + t)
        for rho in states:
            worst = max(worst, covariance_defect(ch, s, u, rho))
    return worst


def random_cptp(d_in: int, d_out: int, n_kraus: int, rng) -> KrausChannel:
    """Random channel from a Haar-like isometry cut into Kraus blocks."""
    if d_out * n_kraus < d_in:
        raise ValueError("need d_out * n_kraus >= d_in for an isometry")
    u = random_unitary(d_out * n_kraus, rng)
    v = u[:, :d_in]
    return KrausChannel.from_kraus([v[i * d_out:(i + 1) * d_out] for i in range(n_kraus)])


def lambda_max_problem(h) -> SdpProblem:
    """``min t`` subject to ``S = t I - H >= 0``, with ``t`` a free variable.

    The optimum is the largest eigenvalue of the real symmetric ``h``.
    """
    h = np.asarray(h, dtype=float)
    n = h.shape[0]
    pairs = []
    coefs = []
    for a in range(n):
        for b in range(a, n):
            g = np.zeros((n, n))
            g[a, b] = g[b, a] = 0.5 if a != b else 1.0
            pairs.append(([g], -h[a, b]))
            coefs.append([-1.0 if a == b else 0.0])
    return SdpProblem.from_pairs((n,), [np.zeros((n, n))], pairs, free_cost=[1.0], free_coefs=coefs)


def sdp_health(seed: int = 0, n_channels: int = 5, n_eig: int = 5) -> dict[str, float]:
    """Diamond norms of random channels (should be 1) and lambda_max problems against eigvalsh."""
    rng = np.random.Generator(np.random.PCG64(seed))
    dn = 0.0
    for _ in range(n_channels):
        ch = random_cptp(2, 2, 3, rng)
        dn = max(dn, abs(diamond_norm(choi(ch)) - 1.0))
    dn = max(dn, abs(diamond_norm(choi(identity_channel(3))) - 1.0))
    eig = 0.0
    for _ in range(n_eig):
        a = rng.normal(size=(5, 5))
        h = 0.5 * (a + a.T)
        sol = solve(lambda_max_problem(h))
        if sol.status is not SdpStatus.OPTIMAL:
            eig = np.inf
            continue
        ref = np.linalg.eigvalsh(h)[-1]
        eig = max(eig, abs(sol.primal_value - ref) / max(1.0, abs(ref)))
    return {"random_channel_diamond": dn, "lambda_max_rel": float(eig)}
