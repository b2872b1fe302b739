import numpy as np
import pytest
from hypothesis import given, strategies as st

from cr3bp import core_dynamics as cd

mus = st.floats(min_value=0.02, max_value=0.98)


def _random_state(rng, mu, n=1):
    out = []
    while len(out) < n:
        z = np.concatenate([rng.normal(size=2), rng.uniform(-1.5, 1.5, 2)])
        q = z[2:]
        if min(np.hypot(q[0] + mu, q[1]), np.hypot(q[0] - 1 + mu, q[1])) > 0.05:
            out.append(z)
    return np.array(out)


def test_hamiltonian_at_l1_copenhagen():
    assert cd.hamiltonian(0.5, cd.l1_state(0.5)) == pytest.approx(-2.0, abs=1e-14)


def test_hamiltonian_matches_termwise_evaluation():
    # independent high-precision evaluation of the kinetic and potential terms
    z = np.array([0.1, 0.2, 0.4, 0.1])
    assert cd.hamiltonian(0.3, z) == pytest.approx(-1.8436327917116803338, rel=1e-14)


@given(mu=mus, seed=st.integers(0, 2**31))
def test_mass_swap_symmetry(mu, seed):
    z = _random_state(np.random.default_rng(seed), mu)[0]
    assert cd.hamiltonian(mu, z) == pytest.approx(cd.hamiltonian(1 - mu, -z), abs=1e-14)


def test_collision_is_a_domain_error():
    with pytest.raises(cd.DomainError):
        cd.hamiltonian(0.3, np.array([0.0, 0.0, -0.3, 0.0]))
    with pytest.raises(cd.DomainError):
        cd.effective_potential(0.3, np.array([0.7, 0.0]))


@pytest.mark.parametrize("mu", [0.1, 0.3, 0.5])
def test_l1_is_critical(mu):
    q = cd.l1_state(mu)[2:]
    U, dU, _ = cd.effective_potential(mu, q)
    assert np.linalg.norm(dU) < 1e-10
    assert U == pytest.approx(cd.L1_value(mu), abs=1e-14)


def test_potential_derivatives_against_differences(rng):
    mu, h = 0.37, 1e-5
    for z in _random_state(rng, mu, 10):
        q = z[2:]
        _, dU, d2U = cd.effective_potential(mu, q)
        for i in range(2):
            e = np.zeros(2)
            e[i] = h
            up, dup, _ = cd.effective_potential(mu, q + e)
            um, dum, _ = cd.effective_potential(mu, q - e)
            assert (up - um) / (2 * h) == pytest.approx(dU[i], rel=1e-7, abs=1e-8)
            np.testing.assert_allclose((dup - dum) / (2 * h), d2U[:, i], rtol=1e-6, atol=1e-7)


def test_q1_derivative_positive_on_earth_component():
    # shifted frame: earth at 0; region 0 <= q1 < lhat1 + mu inside the L1 Hill component
    mu = 0.3
    lhat1 = 1 - mu - cd.lagrange_r1(mu)
    R = lhat1 + mu
    r = np.linspace(1e-3, R, 300)[:-1]
    th = np.linspace(-np.pi / 2, np.pi / 2, 301)
    Rg, Tg = np.meshgrid(r, th)
    qs = np.stack([Rg * np.cos(Tg), Rg * np.sin(Tg)], -1).reshape(-1, 2)
    U, dU, _ = cd.shifted_potential(mu, qs)
    inside = U <= cd.L1_value(mu)
    assert inside.sum() > 1000
    assert np.all(dU[inside, 0] > 0)


def test_vector_field_is_symplectic_gradient(rng):
    mu = 0.42
    for z in _random_state(rng, mu, 20):
        np.testing.assert_allclose(cd.vector_field(mu, z), cd.J4 @ cd.hamiltonian_gradient(mu, z), atol=1e-13)


def test_vector_field_against_differences_of_h():
    z = np.array([0.0, 0.0, 0.2, 0.0])
    g = np.zeros(4)
    for i in range(4):
        e = np.zeros(4)
        e[i] = 1e-6
        g[i] = (cd.hamiltonian(0.5, z + e) - cd.hamiltonian(0.5, z - e)) / 2e-6
    np.testing.assert_allclose(cd.vector_field(0.5, z), cd.J4 @ g, atol=1e-7)


@pytest.mark.parametrize("mu", [0.05, 0.3, 0.5, 0.8])
def test_vector_field_vanishes_at_equilibria(mu):
    for z in cd.lagrange_values(mu).positions:
        assert np.linalg.norm(cd.vector_field(mu, z)) < 1e-10


def test_jacobi_integral_conserved_on_short_arc():
    from cr3bp.flow import integrate, rotating_system

    z0 = cd.state_from_velocity(np.array([-0.2, 0.3]), np.array([0.1, -0.4]))
    tr = integrate(rotating_system(0.5), z0, [0.0, 0.5], t_eval=np.linspace(0, 0.5, 50))
    F = cd.jacobi_energy(0.5, tr.states)
    assert np.max(np.abs(F - F[0])) < 1e-10


def test_lagrange_r1_symmetric_case():
    assert cd.lagrange_r1(0.5) == pytest.approx(0.5, abs=1e-15)


def test_lagrange_r1_against_bisection_oracle():
    assert cd.lagrange_r1(0.3) == pytest.approx(0.41387021794931098554, abs=1e-13)


@given(mu=st.floats(min_value=1e-3, max_value=1 - 1e-3))
def test_r1_solves_collinear_equation(mu):
    r1 = cd.lagrange_r1(mu)
    res = (1 - mu) / (1 - r1) ** 2 - mu / r1**2 - (1 - mu - r1)
    assert 0 < r1 < 1
    assert abs(res) < 1e-11 * max(1.0, mu / r1**2)
    assert cd.mu_of_r1(r1) == pytest.approx(mu, rel=1e-12)


def test_r1_round_trip_grid():
    for mu in np.linspace(0.05, 0.95, 19):
        assert abs(cd.mu_of_r1(cd.lagrange_r1(mu)) - mu) < 1e-12


def test_lagrange_values_copenhagen():
    data = cd.lagrange_values(0.5)
    assert abs(data.L1 + 2) < 1e-12
    assert data.values[1] == pytest.approx(data.values[2], abs=1e-14)


@pytest.mark.parametrize("mu", np.linspace(0.05, 0.95, 10))
def test_lagrange_ordering(mu):
    L = cd.lagrange_values(mu).values
    assert L[0] < L[1] <= L[2] < L[3]
    assert L[3] == pytest.approx(L[4], abs=1e-14)
    if abs(mu - 0.5) > 1e-6:
        assert L[1] < L[2]


def test_mass_ratio_validation():
    with pytest.raises(cd.DomainError):
        cd.MassRatio(1.2)
    m = cd.MassRatio.from_r1(0.4)
    assert m.mu == pytest.approx(cd.mu_of_r1(0.4))
    assert cd.lagrange_r1(m.mu) == pytest.approx(0.4, abs=1e-12)


def test_hill_region_boundary_and_wells():
    inside, margin = cd.hill_region_contains(0.5, -2.0, cd.l1_state(0.5)[2:])
    assert inside and abs(margin) < 1e-12
    inside, _ = cd.hill_region_contains(0.5, -10.0, np.array([0.5 + 1e-4, 0.0]))
    assert inside


def test_zero_velocity_curve_from_ray_solve():
    from scipy.optimize import brentq

    mu, h = 0.3, -1.9
    d = np.array([np.cos(0.7), np.sin(0.7)])
    f = lambda s: float(cd.effective_potential(mu, np.array([-mu, 0.0]) + s * d)[0]) - h  # noqa: E731
    s = brentq(f, 1e-3, 0.6, xtol=1e-15)
    _, margin = cd.hill_region_contains(mu, h, np.array([-mu, 0.0]) + s * d)
    assert abs(margin) < 1e-10


def test_frame_converters_round_trip(rng):
    z = _random_state(rng, 0.3, 5)
    np.testing.assert_allclose(cd.from_shifted_frame(0.3, cd.to_shifted_frame(0.3, z)), z, atol=1e-15)
    np.testing.assert_allclose(cd.from_centered_frame(0.3, cd.to_centered_frame(0.3, z)), z, atol=1e-15)
