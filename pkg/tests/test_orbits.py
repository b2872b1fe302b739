import warnings

import numpy as np
import pytest

from cr3bp import core_dynamics as cd
from cr3bp import index as ix
from cr3bp import orbits as ob
from cr3bp.flow import EventSpec, integrate, rotating_system
from cr3bp.saddle_center import saddle_center_data


@pytest.fixture(scope="module")
def retrograde():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return ob.find_retrograde(0.5, -2.2)


@pytest.fixture(scope="module")
def lyap():
    return {eps: ob.lyapunov_orbit(0.5, eps) for eps in (1e-4, 1e-3, 1e-2)}


def test_gamma1_endpoint_limit():
    gaps = [abs(ob.shoot_gamma1(0.5, -2.2, -x).theta + np.pi / 4) for x in (1e-2, 1e-3, 1e-4, 1e-5)]
    assert np.all(np.diff(gaps) < 0)
    assert gaps[-1] < 1e-4


def test_gamma2_endpoint_limit():
    pts = [ob.shoot_gamma2(0.5, -2.2, x) for x in (1e-2, 1e-3, 1e-4, 1e-5)]
    gaps = [abs(p.theta - np.pi / 4) for p in pts]
    assert np.all(np.diff(gaps) < 0)
    assert gaps[-1] < 1e-4 and abs(pts[-1].q2) < 1e-4


def test_charts_agree_on_overlap():
    for x in (-0.04, -0.02):
        a = ob.shoot_gamma1(0.5, -2.2, x, chart="regularized")
        b = ob.shoot_gamma1(0.5, -2.2, x, chart="cartesian")
        assert abs(a.theta - b.theta) < 1e-9 and abs(a.q2 - b.q2) < 1e-9


def test_mid_interval_point_inside_rectangle():
    qbar2 = ob.hill_height(0.5, -2.2)
    left = ob.hill_boundary_left(0.5, -2.2)
    p = ob.shoot_gamma1(0.5, -2.2, 0.5 * left)
    assert -np.pi / 2 < p.theta < np.pi / 2
    assert -qbar2 < p.q2 < 0


def test_shooting_rejects_wrong_side():
    with pytest.raises(ValueError):
        ob.shoot_gamma1(0.5, -2.2, 0.1)
    with pytest.raises(ValueError):
        ob.shoot_gamma2(0.5, -2.2, -0.1)


def test_backward_arc_near_l1():
    # start at lhat1 + mu - delta0 (frame with the earth at 0) on the critical level, moving up
    mu = 0.5
    s = saddle_center_data(mu)
    lhat1 = 1 - mu - s.r1
    delta0 = 1e-3
    q1 = lhat1 - delta0
    z0 = cd.state_from_velocity(np.array([q1, 0.0]),
                                np.array([0.0, np.sqrt(2 * (s.L1 - cd.effective_potential(mu, [q1, 0.0])[0]))]))
    ev = EventSpec(lambda _t, z: z[3], direction=1, terminal=True)
    tr = integrate(rotating_system(mu), z0, [0.0, -5.0], events=[ev], t_eval=np.linspace(0, -5, 20001))
    t0 = -tr.event_times[0][0]
    assert 0 < t0 < np.pi / s.lambda2
    zs = tr.states[tr.t > -t0][1:]
    v = cd.velocity(zs)
    assert np.all(zs[:, 3] < 0) and np.all(v[:, 0] > 0)
    zend = tr.event_states[0][0]
    assert 0 < zend[2] + mu < q1 + mu
    assert cd.velocity(zend)[1] < 0
    # q1dot + 2 q2 decreases in forward time along the arc
    g = v[:, 0] + 2 * zs[:, 3]
    assert np.all(np.diff(g) > 0)  # samples run backwards in time


def test_curves_are_simple_and_inside_rectangle():
    g1, g2 = ob.gamma_curves(0.5, -2.2, n=40)
    qbar2 = ob.hill_height(0.5, -2.2)
    for g in (g1, g2):
        assert g.self_intersections() == 0
        assert np.all(np.abs(g.theta) < np.pi / 2)
        assert np.all((g.q2 < 0) & (g.q2 > -qbar2))
    assert len(ob.curve_crossings(g1, g2)) >= 1


def test_retrograde_orbit(retrograde):
    o = retrograde
    assert o.closure_residual < 1e-8
    assert ob.symmetry_defect(o) < 1e-8
    assert o.energy_drift < 1e-9
    M = o.monodromy
    assert np.linalg.det(M) == pytest.approx(1.0, abs=1e-9)


def test_retrograde_family_is_continuous(retrograde):
    energies = [-2.1, -2.05]
    z = [retrograde.initial_state]
    actions = [retrograde.action]
    guess = (retrograde.meta["q1_left"], retrograde.meta["q1_right"])
    for E in energies:
        o = ob.find_retrograde(0.5, E, guess=guess, with_monodromy=False)
        guess = (o.meta["q1_left"], o.meta["q1_right"])
        z.append(o.initial_state)
        actions.append(o.action)
    d = [np.linalg.norm(z[i + 1] - z[i]) for i in range(2)]
    assert d[1] < d[0]
    assert np.all(np.isfinite(actions)) and max(np.abs(actions)) < 10


def test_retrograde_double_cover_index(retrograde):
    assert ix.orbit_index(retrograde, cover=2) >= 3


def test_lyapunov_period_tends_to_linear(lyap):
    s = saddle_center_data(0.5)
    eps = np.array(sorted(lyap))
    dev = np.array([lyap[e].period - 2 * np.pi / s.lambda2 for e in eps])
    slope, icpt = np.polyfit(eps, dev, 1)
    pred = slope * eps + icpt
    r2 = 1 - np.sum((dev - pred) ** 2) / np.sum((dev - dev.mean()) ** 2)
    assert r2 > 0.99
    assert abs(icpt) < 1e-4


def test_lyapunov_closes_and_is_hyperbolic(lyap):
    for o in lyap.values():
        assert o.correction_residual < 1e-10
        assert o.energy_drift < 1e-10
        mult = ob.transverse_multipliers(o)
        assert np.all(np.abs(mult.imag) < 1e-8)
        lam = np.sort(np.abs(mult.real))
        assert lam[1] > 1 and lam[0] * lam[1] == pytest.approx(1.0, rel=1e-6)


def test_lyapunov_index(lyap):
    o = lyap[1e-3]
    assert ix.orbit_index(o, trivialization="cartesian") == 2
    assert ix.orbit_index(o, cover=2, trivialization="cartesian") == 4


def test_lyapunov_shrinks_like_sqrt_eps(lyap):
    eps = np.array(sorted(lyap))
    diam = np.array([np.ptp(lyap[e].trajectory(400).states[:, 2]) for e in eps])
    slope = np.polyfit(np.log(eps), np.log(diam), 1)[0]
    assert slope == pytest.approx(0.5, abs=0.05)


def test_lyapunov_rejects_nonpositive_eps():
    with pytest.raises(ValueError):
        ob.lyapunov_orbit(0.5, 0.0)
