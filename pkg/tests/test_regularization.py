import numpy as np
import pytest
from hypothesis import given, strategies as st

from cr3bp import core_dynamics as cd
from cr3bp import regularization as rg


def _regular_points(rng, n):
    out = []
    while len(out) < n:
        w = np.concatenate([rng.normal(size=2), [rng.uniform(0.05, 1.5), rng.uniform(0, 2 * np.pi)]])
        if rg.flow_correspondence_factor(w[2:]) > 1e-2:
            out.append(w)
    return np.array(out)


def test_origin_maps_to_moon():
    np.testing.assert_allclose(rg.chart(np.array([0.0, 0.0])), [0.5, 0.0], atol=1e-16)
    with pytest.raises(cd.DomainError):
        rg.from_regularized(np.array([0.3, 0.1, 0.0, 0.0]))
    with pytest.raises(cd.DomainError):
        rg.to_regularized(np.array([0.0, 0.0, -0.5, 0.0]))


def test_round_trip(rng):
    w = _regular_points(rng, 200)
    back = rg.to_regularized(rg.from_regularized(w))
    np.testing.assert_allclose(back, w, atol=1e-11)


def test_chart_is_symplectic(rng):
    h = 1e-6
    for w in _regular_points(rng, 20):
        Jc = np.zeros((4, 4))
        for i in range(4):
            e = np.zeros(4)
            e[i] = h
            Jc[:, i] = (rg.from_regularized(w + e) - rg.from_regularized(w - e)) / (2 * h)
        np.testing.assert_allclose(Jc.T @ cd.J4 @ Jc, cd.J4, atol=1e-9)


@given(mu=st.floats(0.05, 0.95), h=st.floats(-3.0, -1.5), seed=st.integers(0, 2**31))
def test_closed_form_matches_product_form(mu, h, seed):
    w = _regular_points(np.random.default_rng(seed), 1)[0]
    p = rg.RegularizedHamiltonianParams(mu, h)
    assert rg.hat_hamiltonian(p, w) == pytest.approx(float(rg.hat_hamiltonian_product(p, w)), rel=1e-10, abs=1e-10)


@given(mu=st.floats(0.05, 0.95), seed=st.integers(0, 2**31))
def test_antipodal_symmetry(mu, seed):
    w = np.random.default_rng(seed).normal(size=4)
    p = rg.RegularizedHamiltonianParams(mu, -2.3)
    assert rg.hat_hamiltonian(p, -w) == pytest.approx(float(rg.hat_hamiltonian(p, w)), abs=1e-13)


def test_derivatives_against_differences(rng):
    p = rg.RegularizedHamiltonianParams(0.3, -2.1)
    for w in rng.normal(size=(5, 4)):
        _, g, H = rg.hat_hamiltonian(p, w, derivatives=True)
        for i in range(4):
            e = np.zeros(4)
            e[i] = 1e-6
            gp = rg.hat_hamiltonian(p, w + e, True)[1]
            gm = rg.hat_hamiltonian(p, w - e, True)[1]
            fd = (rg.hat_hamiltonian(p, w + e) - rg.hat_hamiltonian(p, w - e)) / 2e-6
            assert fd == pytest.approx(g[i], rel=1e-7, abs=1e-8)
            np.testing.assert_allclose((gp - gm) / 2e-6, H[:, i], rtol=1e-6, atol=1e-7)
        np.testing.assert_array_equal(H[:2, :2], np.eye(2))


@pytest.mark.parametrize("h", [-2.0, -2.5, -4.0])
def test_copenhagen_critical_points(h):
    split = lambda x: sum(w[0] for w in rg.copenhagen_split(np.asarray(x), h))  # noqa: E731
    for x in ([0.0, 0.0], [0.0, np.pi]):
        V, g, H = rg.regularized_potential(np.array(x), 0.5, h)
        assert V == pytest.approx(-0.5, abs=1e-15)
        assert np.linalg.norm(g) < 1e-15
        assert np.all(np.linalg.eigvalsh(H) > 0)
        assert split(x) == pytest.approx(-0.5, abs=1e-15)
    V, g, _ = rg.regularized_potential(np.array([0.0, np.pi / 2]), 0.5, h)
    assert V == pytest.approx(-h / 4 - 0.5, abs=1e-14)
    assert np.linalg.norm(g) < 1e-14


def _V_in_s(s1, s2, h=-2.0):
    x = np.array([np.arccosh(s1), np.arccos(s2)])
    return float(rg.regularized_potential(x, 0.5, h)[0])


def test_potential_values_in_s_coordinates():
    assert _V_in_s(1.9, 1.0) == pytest.approx(19379 / 320000, abs=1e-14)
    assert _V_in_s(1.6, 0.82) == pytest.approx(0.012116305, abs=1e-8)


def test_split_matches_potential(rng):
    x = rng.normal(size=(50, 2))
    (w1, *_), (w2, *_) = rg.copenhagen_split(x, -2.2)
    V = rg.regularized_potential(x, 0.5, -2.2)[0]
    np.testing.assert_allclose(w1 + w2, V, atol=1e-13)


def test_correspondence_factor():
    assert rg.flow_correspondence_factor(np.array([0.0, 0.0])) == 0.0
    assert rg.flow_correspondence_factor(np.array([1.0, np.pi / 2])) == pytest.approx(np.cosh(1.0) ** 2 / 4)


def test_correspondence_factor_positive_on_hill_region():
    x1 = np.linspace(0.0, 1.2, 200)
    x2 = np.linspace(0.0, 2 * np.pi, 400)
    X = np.stack(np.meshgrid(x1, x2, indexing="ij"), -1).reshape(-1, 2)
    V = rg.regularized_potential(X, 0.5, -2.0)[0]
    # collisions sit at x1 = 0, x2 in {0, pi} (mod 2 pi)
    d2 = np.abs((X[:, 1] + np.pi / 2) % np.pi - np.pi / 2)
    away = np.hypot(X[:, 0], d2) > 1e-2
    keep = (V <= 0) & away
    assert np.all(rg.flow_correspondence_factor(X[keep]) > 0)


def test_state_wraps_angle():
    s = rg.RegularizedState(np.zeros(2), np.array([0.3, -0.1]))
    assert 0 <= s.x[1] < 2 * np.pi


def test_trajectory_correspondence():
    z0 = cd.state_from_velocity(np.array([0.2, 0.35]), np.array([0.3, -0.2]))
    chk = rg.trajectory_correspondence(0.4, z0, T=1.0)
    assert abs(chk.hat_energy) < 1e-12
    assert chk.deviation < 1e-6
