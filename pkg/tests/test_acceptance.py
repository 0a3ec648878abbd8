"""Acceptance criteria, one test each, at the stated tolerances.

Each test stores a one-line PASS/FAIL verdict that the conftest prints in
the terminal summary. Running this file directly prints the same lines.
"""
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from quaddeg import checks
from quaddeg.capacity import capacity_curve, coherent_info, ic_mls_pi, optimal_etas
from quaddeg.channels import MlsParams, choi, identity_channel, landau_streater, mls_channel
from quaddeg.degrade import fit_slope, leading_coefficient
from quaddeg.diamond import diamond_lower_entangled, diamond_norm
from quaddeg.spin import make_spin, singlet_state

sys.path.insert(0, str(Path(__file__).parent))
import _sweeps  # noqa: E402

from conftest import ACCEPTANCE, AUDIT, install_audit, sandwich_violations  # noqa: E402


def _record(n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[n] = line
    print(line)
    return ok


def criterion_1():
    t0 = time.perf_counter()
    worst = {}
    for j in checks.SPINS:
        for name, v in checks.spin_defects(j).items():
            worst[name] = max(worst.get(name, 0.0), v)
    elapsed = time.perf_counter() - t0
    top = max(worst.values())
    ok = top <= 1e-12 and elapsed < 1.0
    return ok, f"spin algebra max defect {top:.2e} (<= 1e-12), {elapsed:.2f}s (< 1s)"


def criterion_2():
    t0 = time.perf_counter()
    ls_err = probe_err = mls_err = 0.0
    for j in ("1/2", "1", "3/2"):
        s = make_spin(j)
        phi = choi(landau_streater(s)) - choi(identity_channel(s.d))
        ls_err = max(ls_err, abs(diamond_norm(phi) - 2.0))
        probe_err = max(probe_err, abs(diamond_lower_entangled(phi, singlet_state(s)) - 2.0))
        for p in (0.1, 0.3):
            phi = choi(mls_channel(MlsParams(s.j, p), s)) - choi(identity_channel(s.d))
            mls_err = max(mls_err, abs(diamond_norm(phi) - 2 * p))
    elapsed = time.perf_counter() - t0
    ok = ls_err <= 1e-6 and probe_err <= 1e-10 and mls_err <= 1e-6 and elapsed < 60
    return ok, (f"|LS-id| err {ls_err:.1e}, singlet probe err {probe_err:.1e}, "
                f"|M-id|-2p err {mls_err:.1e}, {elapsed:.1f}s")


def _slopes(tags):
    lines, ok, total = [], True, 0.0
    for tag in tags:
        name = _sweeps.family(tag).tag
        for mode, lo, hi in (("optimal", 1.9, 2.1), ("zero", 1.4, 1.6)):
            recs, secs = _sweeps.sweep(tag, mode)
            total += secs
            slope = fit_slope(recs).slope
            good = lo <= slope <= hi
            ok &= good
            lines.append(f"{name} a={mode} slope {slope:.3f}{'' if good else ' OUT'}")
    ok &= total < 600
    return ok, "; ".join(lines) + f"; {total:.0f}s"


def criterion_3():
    return _slopes([("mls", "1"), ("mls", "3/2")])


def criterion_4():
    return _slopes([("gpc", 2), ("gpc", 3)])


def criterion_5():
    worst = 0.0
    for p in (0.05, 0.2):
        for j in checks.SPINS:
            worst = max(worst, checks.mls_eigen_defect(j, p))
        for d in (2, 3, 4):
            worst = max(worst, checks.gpc_eigen_defect(d, p))
    return worst <= 1e-12, f"eigen-operator defect {worst:.2e} (<= 1e-12)"


def criterion_6():
    block = env = 0.0
    for j in ("1/2", "1", "3/2", "2"):
        for p in (0.05, 0.2, 0.5):
            block = max(block, checks.blockform_defect(j, p, n_states=20, seed=7))
            env = max(env, checks.environment_pi_defect(j, p))
    ok = block <= 1e-12 and env <= 1e-12
    return ok, f"block form defect {block:.2e}, environment at pi defect {env:.2e}"


def criterion_7():
    j = "1"
    s = make_spin(j)
    grid10 = np.linspace(0.01, 0.1, 10)
    ic_err = max(
        abs(coherent_info(mls_channel(MlsParams(s.j, p), s), np.eye(s.d) / s.d) - ic_mls_pi(j, p))
        for p in grid10
    )
    grid = np.logspace(-3, -1, 10)
    etas = optimal_etas(j, grid)
    opt = capacity_curve(j, grid, "optimal", etas=etas)
    gen = capacity_curve(j, grid, "generic15", etas=etas)
    dominates = all(o.lower_bound >= g.lower_bound for o, g in zip(opt, gen))
    gap = opt[0].ic - opt[0].lower_bound
    ok = ic_err <= 1e-10 and dominates and gap <= 0.01
    return ok, f"ic closed-form err {ic_err:.1e}, optimal dominates generic: {dominates}, gap at p=1e-3 {gap:.2e} bits"


def criterion_8():
    worst = 0.0
    control = np.inf
    for j in ("1", "3/2"):
        s = make_spin(j)
        ch = mls_channel(MlsParams(s.j, 0.1), s)
        worst = max(worst, checks.covariance_max_defect(ch, j, 100, 10, seed=3))
        control = min(control, checks.covariance_max_defect(checks.dropped_kraus_mls(j, 0.1), j, 100, 10, seed=3))
    ok = worst <= 1e-10 and control > 1e-3
    return ok, f"covariance defect {worst:.2e} (<= 1e-10), dropped-Kraus control {control:.2e} (> 1e-3)"


def criterion_9():
    health = checks.sdp_health(seed=11, n_channels=5, n_eig=5)
    bad = sandwich_violations()
    ok = health["random_channel_diamond"] <= 1e-6 and health["lambda_max_rel"] <= 1e-7 and not bad
    return ok, (f"random CPTP |diamond-1| {health['random_channel_diamond']:.1e}, "
                f"lambda_max rel err {health['lambda_max_rel']:.1e}, "
                f"sandwich violations {len(bad)}/{len(AUDIT)} so far (full audit at session end)")


def criterion_10():
    lines, ok = [], True
    for j in ("1", "3/2"):
        g = float(make_spin(j).casimir_value)
        a = 2.0 / g
        for p in (1e-3, 1e-2):
            opt = abs(leading_coefficient(j, p, a))
            ctl = abs(leading_coefficient(j, p, 0.0))
            ok &= opt <= 10 * p**2.5 and ctl > 0.1 * p**1.5 / np.sqrt(g)
            lines.append(f"j={j} p={p:g}: {opt / p**2.5:.2f} p^2.5, control {ctl * np.sqrt(g) / p**1.5:.2f} p^1.5/sqrt(g)")
    return ok, "; ".join(lines)


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 10: criterion_10, 9: criterion_9,
}


# criterion 9 audits every diamond norm solved so far, so it is checked last
SLOW = {3, 4}


@pytest.mark.parametrize(
    "n", [pytest.param(n, marks=pytest.mark.slow) if n in SLOW else n for n in CRITERIA]
)
def test_criterion(n):
    ok, detail = CRITERIA[n]()
    assert _record(n, ok, detail), detail


if __name__ == "__main__":
    install_audit()
    results = [_record(n, *fn()) for n, fn in CRITERIA.items()]
    sys.exit(0 if all(results) else 1)
