import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quaddeg import checks
from quaddeg.channels import (
    GpcParams,
    KrausChannel,
    LinearMapChoi,
    MlsParams,
    adjoint_apply,
    apply,
    choi,
    choi_from_action,
    choi_min_eigenvalue,
    choi_tp_defect,
    complementary,
    compose,
    depolarizing_channel,
    gpc_channel,
    identity_channel,
    landau_streater,
    mls_channel,
    mls_complementary_blockform,
    stinespring,
    unitary_channel,
    weyl_operators,
)
from quaddeg.matcore import partial_trace, random_density, random_unitary
from quaddeg.spin import make_spin

probs = st.floats(0.0, 1.0)
spin_labels = st.sampled_from(["1/2", "1", "3/2", "2"])
seeds = st.integers(0, 2**32 - 1)


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def test_params_derived_quantities():
    m = MlsParams("1", 0.2)
    assert m.casimir == 2.0
    assert m.p_j == pytest.approx(0.1)
    assert m.c_j == pytest.approx(np.sqrt(0.8 * 0.1))
    g = GpcParams(3, 0.16)
    assert g.q == pytest.approx(0.02)
    assert g.shrink == pytest.approx(1 - 9 * 0.16 / 8)


@pytest.mark.parametrize("bad", [-0.1, 1.1])
def test_params_reject_p(bad):
    with pytest.raises(ValueError):
        MlsParams(1, bad)
    with pytest.raises(ValueError):
        GpcParams(2, bad)


def test_gpc_needs_d2():
    with pytest.raises(ValueError):
        GpcParams(1, 0.1)


def test_kraus_validation():
    with pytest.raises(ValueError):
        KrausChannel.from_kraus([np.eye(2) * 0.9])
    with pytest.raises(ValueError):
        KrausChannel((), 2, 2)
    ch = KrausChannel.from_kraus([np.eye(2) * 0.9], check=False)
    assert ch.tp_defect() == pytest.approx(0.19)


@given(spin_labels, probs)
def test_mls_is_cptp(j, p):
    s = make_spin(j)
    ch = mls_channel(MlsParams(s.j, p), s)
    assert ch.n_kraus == 4
    c = choi(ch)
    assert choi_tp_defect(c) < 1e-12
    assert choi_min_eigenvalue(c) > -1e-12


@given(st.integers(2, 4), probs)
def test_gpc_is_cptp(d, p):
    ch = gpc_channel(GpcParams(d, p))
    assert ch.n_kraus == d * d
    assert ch.tp_defect() < 1e-12


def test_mls_at_zero_is_identity():
    s = make_spin(1)
    rho = random_density(3, _rng(0))
    assert np.allclose(apply(mls_channel(MlsParams(s.j, 0.0), s), rho), rho)


def test_mls_at_one_is_landau_streater():
    s = make_spin("3/2")
    rho = random_density(4, _rng(1))
    ls = landau_streater(s)
    assert np.allclose(apply(mls_channel(MlsParams(s.j, 1.0), s), rho), apply(ls, rho))
    assert np.allclose(apply(ls, np.eye(4) / 4), np.eye(4) / 4)


def test_spin_mismatch():
    with pytest.raises(ValueError):
        mls_channel(MlsParams(1, 0.1), make_spin(2))


def test_weyl_operators():
    w = weyl_operators(3)
    assert len(w) == 9
    assert np.allclose(w[0], np.eye(3))
    for a in range(9):
        for b in range(9):
            assert abs(np.trace(w[a].conj().T @ w[b])) == pytest.approx(3.0 if a == b else 0.0, abs=1e-12)
    with pytest.raises(ValueError):
        weyl_operators(1)


@given(st.integers(2, 4), probs, seeds)
def test_gpc_is_depolarizing(d, p, seed):
    # Weyl twirl: the GPC with weight p equals depolarizing with weight d^2 p/(d^2-1)
    rho = random_density(d, _rng(seed))
    lam = d * d * p / (d * d - 1)
    expected = (1 - lam) * rho + lam * np.eye(d) / d
    assert np.abs(apply(gpc_channel(GpcParams(d, p)), rho) - expected).max() < 1e-12


def test_depolarizing_full_noise():
    rho = random_density(3, _rng(2))
    assert np.allclose(apply(depolarizing_channel(3, 1.0), rho), np.eye(3) / 3)


def test_identity_choi_is_unnormalised_bell():
    c = choi(identity_channel(2)).choi
    omega = np.array([1, 0, 0, 1.0])
    assert np.allclose(c, np.outer(omega, omega))


@given(seeds)
def test_choi_matches_action_oracle(seed):
    rng = _rng(seed)
    ch = checks.random_cptp(2, 3, 2, rng)
    c1 = choi(ch).choi
    c2 = choi_from_action(lambda x: apply(ch, x), 2, 3).choi
    assert np.abs(c1 - c2).max() < 1e-12
    x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    assert np.abs(choi(ch).apply(x) - apply(ch, x)).max() < 1e-12


def test_linear_map_algebra():
    a = choi(identity_channel(2))
    b = choi(depolarizing_channel(2, 1.0))
    diff = a - b
    assert np.allclose((diff + b).choi, a.choi)
    assert np.allclose((2 * a).choi, (a * 2).choi)
    with pytest.raises(ValueError):
        a - choi(identity_channel(3))
    with pytest.raises(ValueError):
        LinearMapChoi(np.array([[0, 1], [0, 0]], dtype=complex), 1, 2)
    with pytest.raises(ValueError):
        LinearMapChoi(np.eye(3), 2, 2)


@given(seeds)
def test_complementary_from_isometry(seed):
    rng = _rng(seed)
    ch = checks.random_cptp(2, 2, 3, rng)
    v = stinespring(ch)
    assert np.abs(v.conj().T @ v - np.eye(2)).max() < 1e-12
    rho = random_density(2, rng)
    big = v @ rho @ v.conj().T  # environment first
    assert np.abs(partial_trace(big, 3, 2, "B") - apply(complementary(ch), rho)).max() < 1e-12
    assert np.abs(partial_trace(big, 3, 2, "A") - apply(ch, rho)).max() < 1e-12


@given(spin_labels, probs, seeds)
def test_blockform_matches_complementary(j, p, seed):
    s = make_spin(j)
    params = MlsParams(s.j, p)
    rho = random_density(s.d, _rng(seed))
    comp = apply(complementary(mls_channel(params, s)), rho)
    assert np.abs(mls_complementary_blockform(params, rho, s) - comp).max() < 1e-12


@given(spin_labels, probs)
def test_environment_at_pi(j, p):
    assert checks.environment_pi_defect(j, p) < 1e-12


@given(spin_labels, st.floats(0.0, 0.5))
def test_mls_eigen_invariance(j, p):
    assert checks.mls_eigen_defect(j, p) < 1e-12
    # the forward map has the same eigen-operators
    s = make_spin(j)
    ch = mls_channel(MlsParams(s.j, p), s)
    lam = 1 - p / s.casimir_value
    for jk in s.generators:
        assert np.abs(apply(ch, jk) - lam * jk).max() < 1e-12


@given(st.integers(2, 4), st.floats(0.0, 0.5))
def test_gpc_eigen_invariance(d, p):
    assert checks.gpc_eigen_defect(d, p) < 1e-12


def test_adjoint_is_unital_for_tp():
    ch = gpc_channel(GpcParams(3, 0.2))
    assert np.allclose(adjoint_apply(ch, np.eye(3)), np.eye(3))
    with pytest.raises(ValueError):
        adjoint_apply(ch, np.eye(2))


def test_compose_with_identity_and_unitaries(rng):
    ch = checks.random_cptp(3, 3, 2, rng)
    rho = random_density(3, rng)
    assert np.allclose(apply(compose(identity_channel(3), ch), rho), apply(ch, rho))
    u = random_unitary(3, rng)
    both = compose(unitary_channel(u.conj().T), unitary_channel(u))
    assert np.allclose(apply(both, rho), rho)
    with pytest.raises(ValueError):
        compose(identity_channel(2), ch)


def test_compose_drops_zero_products():
    s = make_spin(1)
    ch = mls_channel(MlsParams(s.j, 0.0), s)
    assert compose(ch, ch).n_kraus == 1


def test_covariance():
    s = make_spin(1)
    ch = mls_channel(MlsParams(s.j, 0.3), s)
    assert checks.covariance_max_defect(ch, 1, 10, 3) < 1e-12
    assert checks.covariance_max_defect(checks.dropped_kraus_mls(1, 0.3), 1, 10, 3) > 1e-3


def test_apply_shape_checks():
    with pytest.raises(ValueError):
        apply(identity_channel(2), np.eye(3))
