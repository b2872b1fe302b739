"""Acceptance suite: twelve end-to-end criteria at their stated tolerances and runtimes.

Each test prints one ``PASS``/``FAIL`` line; the same lines are collected in the
"acceptance criteria" section of the pytest terminal summary.
"""

import warnings

import numpy as np
import pytest

from cr3bp import convexity as cv
from cr3bp import core_dynamics as cd
from cr3bp import index as ix
from cr3bp import liouville as lv
from cr3bp import orbits as ob
from cr3bp import positivity_table as pt
from cr3bp import regularization as rg
from cr3bp import saddle_center as sc

pytestmark = pytest.mark.acceptance


def test_criterion_01_lagrange_data(criterion):
    c = criterion(1, "Lagrange data", 1.0)
    c.check("L1(1/2) = -2", abs(cd.L1_value(0.5) + 2.0) < 1e-12, cd.L1_value(0.5))
    mus = np.linspace(0.01, 0.99, 50)
    trip = max(abs(float(cd.mu_of_r1(cd.lagrange_r1(m))) - m) for m in mus)
    c.check("r1 <-> mu round trip", trip < 1e-12, trip)
    ordered = True
    for m in mus:
        L = cd.lagrange_values(m).values
        ordered &= bool(L[0] < L[1] <= L[2] < L[3] and abs(L[3] - L[4]) < 1e-12)
    c.check("L1 < L2 <= L3 < L4 = L5", ordered)
    c.finish()


def test_criterion_02_saddle_center_closed_forms(criterion):
    c = criterion(2, "saddle-center closed forms", 5.0)
    eig_err = sympl_err = 0.0
    for mu in np.linspace(0.02, 0.98, 20):
        s = sc.saddle_center_data(mu)
        ev = np.linalg.eigvals(cd.J4 @ cd.hamiltonian_hessian(mu, s.l1))
        real = np.sort(ev[np.abs(ev.imag) < 1e-6].real)
        imag = np.sort(ev[np.abs(ev.imag) >= 1e-6].imag)
        eig_err = max(eig_err, np.max(np.abs(real - [-s.lambda1, s.lambda1])),
                      np.max(np.abs(imag - [-s.lambda2, s.lambda2])))
        sympl_err = max(sympl_err, np.max(np.abs(s.V.T @ cd.J4 @ s.V - cd.J4)))
    c.check("eigenvalues +-lambda1, +-i lambda2", eig_err < 1e-8, eig_err)
    c.check("V^T J V = J", sympl_err < 1e-10, sympl_err)
    c.check("a(1/2) = 4", abs(sc.a_of_r1(0.5) - 4.0) < 1e-12, sc.a_of_r1(0.5))
    c.finish()


def test_criterion_03_lyapunov_orbit(criterion):
    c = criterion(3, "Lyapunov orbit", 30.0)
    s = sc.saddle_center_data(0.5)
    eps = np.array([1e-4, 1e-3, 1e-2])
    orbits = [ob.lyapunov_orbit(0.5, e) for e in eps]
    res = max(o.correction_residual for o in orbits)
    c.check("correction residual", res < 1e-10, res)
    dev = np.array([o.period - 2 * np.pi / s.lambda2 for o in orbits])
    slope, icpt = np.polyfit(eps, dev, 1)
    r2 = 1 - np.sum((dev - (slope * eps + icpt)) ** 2) / np.sum((dev - dev.mean()) ** 2)
    c.check("O(eps) period deviation, R^2 > 0.99", r2 > 0.99, r2)
    c.check("period -> 2 pi / lambda2", abs(icpt) < 1e-4, icpt)
    idx = [ix.orbit_index(o, trivialization="cartesian") for o in orbits]
    c.check("index = 2", all(i == 2 for i in idx), idx)
    hyper = True
    for o in orbits:
        m = ob.transverse_multipliers(o)
        a = np.sort(np.abs(m.real))
        hyper &= bool(np.all(np.abs(m.imag) < 1e-8) and a[1] > 1 > a[0])
    c.check("transverse block hyperbolic", hyper)
    c.finish()


def test_criterion_04_retrograde_orbit(criterion):
    c = criterion(4, "retrograde orbit", 120.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        g1, g2 = ob.gamma_curves(0.5, -2.2)
        hits = ob.curve_crossings(g1, g2)
        c.check("Gamma1 and Gamma2 cross", len(hits) > 0, len(hits))
        o = ob.find_retrograde(0.5, -2.2)
        c.check("closure residual", o.closure_residual < 1e-8, o.closure_residual)
        c.check("q2-reflection symmetry", ob.symmetry_defect(o) < 1e-8, ob.symmetry_defect(o))
        # continuation in both directions from E = -2.2
        family = {-2.2: o.initial_state}
        for energies in (np.arange(-2.225, -2.3001, -0.025), np.arange(-2.175, -2.0499, 0.025)):
            guess = (o.meta["q1_left"], o.meta["q1_right"])
            for E in energies:
                oe = ob.find_retrograde(0.5, float(E), guess=guess, with_monodromy=False)
                if oe.closure_residual > 1e-8:
                    family[float(E)] = None
                    break
                family[float(E)] = oe.initial_state
                guess = (oe.meta["q1_left"], oe.meta["q1_right"])
        Es = sorted(family)
        ok = all(family[E] is not None for E in Es) and min(Es) <= -2.3 + 1e-9 and max(Es) >= -2.05 - 1e-9
        c.check("continuation over [-2.3, -2.05]", ok, Es)
        if ok:
            steps = [np.linalg.norm(family[b] - family[a]) for a, b in zip(Es[:-1], Es[1:])]
            c.check("initial condition varies continuously", max(steps) < 3 * np.median(steps) and max(steps) < 0.1,
                    [round(x, 4) for x in steps])
        k = ix.orbit_index(o, cover=2)
        c.check("double-cover index >= 3", k >= 3, k)
    c.finish()


def test_criterion_05_copenhagen_convexity(criterion):
    c = criterion(5, "Copenhagen convexity", 300.0)
    s = cv.convexity_scan(cv.copenhagen_model(-2.0), 400, 400, 64, collar=1e-3)
    c.check("h=-2 min det U_W > 0 off the collar", s.minimum > 0, s.minimum)
    c.check("vanishing order in [3.5, 4.5]", 3.5 <= s.vanishing_order <= 4.5, s.vanishing_order)
    for h in (-2.5, -3.0):
        t = cv.convexity_scan(cv.copenhagen_model(h), 400, 400, 64)
        c.check(f"h={h} min over region > 0", t.minimum > 0 and t.boundary_minimum > 0,
                (t.minimum, t.boundary_minimum))
    c.finish()


def test_criterion_06_polynomial_suite(criterion):
    c = criterion(6, "polynomial positivity suite", 120.0)
    r = cv.appendix_b_suite(2000)
    e2 = r["claims"]["E2"]
    c.check("E2 > 0 on 2000x2000 grid", e2["ok"] and e2["points"] == 2000 * 2000, e2["margin"])
    c.check("k5(4/5) = 14698.5 +- 0.1", abs(r["k5_at_4_5"] - 14698.5) <= 0.1, r["k5_at_4_5"])
    cc = np.linspace(0.0, 1.2, 200001)
    c.check("k5 decreasing on [0, 6/5]", np.all(np.diff(pt.k5(cc)) < 0) and r["claims"]["minus_dk5"]["ok"])
    c.check("D1 > 0 on [0, 1]", r["claims"]["D1"]["ok"], r["claims"]["D1"]["margin"])
    err = abs(r["E1_at_origin"] - r["E1_at_origin_exact"])
    c.check("E1(0,0) = (119/16)(5 - sqrt 17)", err < 1e-10, err)
    c.check("transcription self-test", r["identities_ok"], max(r["identities"].values()))
    failed = [k for k, v in r["claims"].items() if not v["ok"]]
    c.check("all grid claims", not failed, failed)
    c.finish()


def test_criterion_07_nonconvexity_certificate(criterion):
    c = criterion(7, "non-convexity certificate", 60.0)
    r1 = np.linspace(0.0, 1.0, 502)[1:-1]
    s = np.linspace(-1.0, 1.0, 200)
    R, S = np.meshgrid(r1, s, indexing="ij")
    g2max = float(np.max(pt.G2(R, S)))
    c.check("G2 < 0 on 500x200 grid", g2max < 0, g2max)
    g1 = pt.G1(np.linspace(1e-6, 1 - 1e-6, 200001))
    flips = np.flatnonzero(np.sign(g1[:-1]) != np.sign(g1[1:]))
    rr = np.linspace(1e-6, 1 - 1e-6, 200001)
    at_half = len(flips) == 1 and abs(rr[flips[0]] - 0.5) < 1e-5
    c.check("G1 changes sign only at 1/2", at_half, [float(rr[i]) for i in flips])
    worst = 0.0
    for r in (0.3, 0.4, 0.6):
        for th in (0.0, 1.0, 2.0, 3.0, 4.5):
            G1, G2 = cv.nonconvexity_certificate(r, np.cos(th))
            worst = max(worst, abs(cv.cubic_coefficient_fd(r, th, 2e-3) / (G1 * G2) - 1))
    c.check("cubic coefficient matches G1 G2 within 2%", worst < 0.02, worst)
    c.finish()


def _fresh(rng, make, tries=20):
    """Draw until the index is defined (no degenerate endpoint crossing)."""
    for _ in range(tries):
        try:
            return make(rng)
        except ix.DegenerateCrossingError:
            continue
    raise RuntimeError("could not draw a nondegenerate sample")


def test_criterion_08_index_engine(criterion):
    c = criterion(8, "index engine", 60.0)
    rng = np.random.default_rng(8)
    rot = [ix.robbin_salamon(ix.rotation_path(k)) for k in range(1, 11)]
    c.check("mu_RS(R(2 pi k t)) = 2k", rot == [2 * k for k in range(1, 11)], rot)

    def split(rng):
        A = rng.normal(size=(4, 4))
        p = ix.constant_path(rng.uniform(1, 3) * (A + A.T) / 2, 0.0, 2.0, ix.random_symplectic(4, rng))
        t = rng.uniform(0.2, 1.8)
        return ix.robbin_salamon(p), ix.robbin_salamon(p.restrict(0.0, t)) + ix.robbin_salamon(p.restrict(t, 2.0))

    cat = [_fresh(rng, split) for _ in range(100)]
    c.check("catenation (100)", all(a == b for a, b in cat), sum(a != b for a, b in cat))

    def block(rng):
        A = rng.normal(size=(2, 2))
        p = ix.constant_path(rng.uniform(1, 4) * (A + A.T) / 2, 0.0, 2.0, ix.random_symplectic(2, rng))
        q = ix.hyperbolic_path(rng.uniform(0.2, 3), ix.random_symplectic(2, rng), 0.0, 2.0)
        return ix.robbin_salamon(ix.direct_sum(p, q)), ix.robbin_salamon(p) + ix.robbin_salamon(q)

    prod = [_fresh(rng, block) for _ in range(100)]
    c.check("product (100)", all(a == b for a, b in prod), sum(a != b for a, b in prod))

    hyp = []
    for _ in range(100):
        a = rng.uniform(-3, 0)
        hyp.append(ix.robbin_salamon(ix.hyperbolic_path(rng.uniform(0.2, 4), ix.random_symplectic(2, rng), a,
                                                       a + rng.uniform(0.1, 5))))
    c.check("|mu_RS| <= 1 on hyperbolic paths (100)", max(map(abs, hyp)) <= 1, max(map(abs, hyp)))

    bad, mins, done = 0, [], 0
    while done < 100:
        dim = int(rng.choice([2, 4]))
        p = ix.nonneg_path(ix.random_symplectic(dim, rng))
        mins.append(ix.min_generator_eigenvalue(p))
        m = ix.robbin_salamon(p)
        bad += not (dim // 2 <= m <= dim)
        done += 1
    c.check("generator min-eigenvalue >= -1e-9", min(mins) >= -1e-9, min(mins))
    c.check("n <= mu_RS <= 2n on non-negative paths (100)", bad == 0, bad)
    c.finish()


def test_criterion_09_saddle_center_index_growth(criterion):
    c = criterion(9, "saddle-center index growth", 180.0)
    rng = np.random.default_rng(9)
    l1, l2, _ = ix.regularized_saddle_eigenvalues(0.5)
    worst = np.inf
    for m in range(1, 11):
        for _ in range(20):
            p = ix.saddle_center_path(l1, l2, 0.0, m * 2 * np.pi / l2, ix.random_symplectic(4, rng))
            worst = min(worst, ix.robbin_salamon(p) - (2 * m - 1))
    c.check("mu_RS >= 2m - 1 (m <= 10, 20 starts each)", worst >= 0, worst)
    low = [ix.robbin_salamon(ix.random_hat_trajectory_path(rng)) for _ in range(200)]
    c.check("mu_RS >= -9 on 200 regularized trajectories", min(low) >= -9, min(low))
    c.finish()


def test_criterion_10_shield_profile(criterion):
    c = criterion(10, "shield profile", 10.0)
    s = sc.saddle_center_data(0.5)
    rate_err = energy_err = r0_err = 0.0
    for c0 in (0.5, 1.0, 2.0):
        for b in (0.3, 0.5, 0.7):
            p = sc.shield_profile(s, c0, b)
            rate_err = max(rate_err, abs(abs(p.rate) / abs(p.rate_expected) - 1))
            energy_err = max(energy_err, abs(p.energy / (2 * np.pi * c0 / s.lambda2) - 1))
            r0_err = max(r0_err, abs(abs(p.r[-1]) - np.sqrt(2 * c0 / s.lambda2)))
    c.check("r(s) -> sqrt(2 c0 / lambda2)", r0_err < 1e-8, r0_err)
    c.check("exponential rate within 5% of |g'(r0)|", rate_err <= 0.05, rate_err)
    c.check("energy = 2 pi c0 / lambda2", energy_err < 1e-6, energy_err)
    c.finish()


def test_criterion_11_liouville_interpolation(criterion):
    c = criterion(11, "Liouville interpolation", 300.0)
    rep = lv.verify_y_eps(0.5, 1e-3, n_grid=340)
    n = rep.n_neck + rep.n_full
    c.check("on-surface samples >= 1e5", n >= 100_000, n)
    c.check("min dH . Y_eps > 0", rep.min_margin > 0, rep.min_margin)
    c.check("beta-condition slack >= 0", rep.beta_slack_min >= 0,
            (rep.beta_slack_min, rep.beta_slack_worst_x3))
    c.check("neck samples within 10 eps^(1/2) of l1", rep.max_neck_distance < 10, rep.max_neck_distance)
    c.finish()


def test_criterion_12_regularization_correspondence(criterion):
    c = criterion(12, "regularization correspondence", 60.0)
    rng = np.random.default_rng(12)
    devs, done = [], 0
    while done < 10:
        mu = rng.uniform(0.2, 0.8)
        q = rng.uniform(-1.2, 1.2, 2)
        if min(np.hypot(q[0] + mu, q[1]), np.hypot(q[0] - 1 + mu, q[1])) < 0.15:
            continue
        v = rng.uniform(0, 1) * np.array([np.cos(a := rng.uniform(0, 2 * np.pi)), np.sin(a)])
        chk = rg.trajectory_correspondence(mu, cd.state_from_velocity(q, v), T=1.0)
        if chk.min_distance < 0.05:
            continue
        devs.append(chk.deviation)
        done += 1
    c.check("sup-norm deviation < 1e-6 (10 starts)", max(devs) < 1e-6, max(devs))
    c.finish()
