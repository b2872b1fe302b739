"""Robbin-Salamon index engine: normalisation, axioms, block bounds and orbit indices."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cr3bp import index as ix


def _random_constant_path(rng, dim, a=0.0, b=3.0, scale=1.0):
    A = rng.normal(size=(dim, dim))
    return ix.constant_path(scale * (A + A.T) / 2, a, b, ix.random_symplectic(dim, rng))


# --- normalisation -------------------------------------------------------------

@pytest.mark.parametrize("k", range(1, 11))
def test_full_rotations_have_index_2k(k):
    assert ix.robbin_salamon(ix.rotation_path(k)) == 2 * k


def test_half_rotation_counts_the_start_with_half_weight():
    # R(pi t): only crossing is at t = 0 with kernel R^2 and form pi I
    total, xs = ix.robbin_salamon(ix.rotation_path(0.5), return_crossings=True)
    assert total == 1
    assert len(xs) == 1 and xs[0].boundary and xs[0].kernel_dim == 2 and xs[0].signature == 2


def test_negative_rotation_flips_the_sign():
    assert ix.robbin_salamon(ix.constant_path(-2 * np.pi * np.eye(2), 0.0, 1.0)) == -2


def test_path_without_crossings_has_index_zero():
    p = ix.hyperbolic_path(1.0, np.diag([2.0, 0.5]), 0.0, 1.0)
    assert ix.find_crossings(p) == []
    assert ix.robbin_salamon(p) == 0


# --- axioms ------------------------------------------------------------------------

def test_catenation_axiom(rng):
    for _ in range(20):
        dim = int(rng.choice([2, 4]))
        p = _random_constant_path(rng, dim, scale=rng.uniform(1, 4))
        c = rng.uniform(0.3, 2.7)
        try:
            total = ix.robbin_salamon(p)
            split = ix.robbin_salamon(p.restrict(0, c)) + ix.robbin_salamon(p.restrict(c, 3))
        except ix.DegenerateCrossingError:
            continue
        assert total == split


def test_catenate_helper_agrees_with_restriction(rng):
    p = ix.constant_path(np.diag([3.0, 1.0]), 0.0, 4.0)
    joined = ix.catenate(p.restrict(0.0, 1.7), p.restrict(1.7, 4.0))
    assert ix.robbin_salamon(joined) == ix.robbin_salamon(p)


def test_product_axiom(rng):
    for _ in range(15):
        p = _random_constant_path(rng, 2, b=2.0, scale=rng.uniform(1, 5))
        q = ix.hyperbolic_path(rng.uniform(0.2, 3), ix.random_symplectic(2, rng), 0.0, 2.0)
        try:
            lhs = ix.robbin_salamon(ix.direct_sum(p, q))
            rhs = ix.robbin_salamon(p) + ix.robbin_salamon(q)
        except ix.DegenerateCrossingError:
            continue
        assert lhs == rhs


@settings(max_examples=8)
@given(seed=st.integers(0, 2 ** 31 - 1))
def test_symplectic_conjugation_invariance(seed):
    rng = np.random.default_rng(seed)
    p = _random_constant_path(rng, 2, scale=3.0)
    P = ix.random_symplectic(2, rng)
    Pinv = np.linalg.inv(P)
    q = ix.SymplecticPath(p.a, p.b, lambda t: P @ p.psi(t) @ Pinv, lambda t: Pinv.T @ p.S(t) @ Pinv, 2)
    try:
        assert ix.robbin_salamon(q) == ix.robbin_salamon(p)
    except ix.DegenerateCrossingError:
        pass


def test_reparametrization_invariance():
    p = ix.constant_path(np.diag([5.0, 2.0]), 0.0, 2.0)
    q = p.reparametrize(lambda s: s ** 2 + s, lambda s: 2 * s + 1, 0.0, 1.0)
    assert ix.robbin_salamon(q) == ix.robbin_salamon(p)


def test_degenerate_endpoint_raises():
    # ker(I - psi(1)) = R^2 with form diag(1, -1): degenerate at the end point
    p = ix.constant_path(np.diag([2 * np.pi, 0.0]), 0.0, 1.0)
    with pytest.raises(ix.DegenerateCrossingError):
        ix.robbin_salamon(p)


def test_crossing_times_match_dense_sign_scan(rng):
    for _ in range(5):
        p = _random_constant_path(rng, 2, scale=4.0)
        xs = [c for c in ix.find_crossings(p) if not c.boundary]
        assert len(xs) == ix.crossing_count_oracle(p)


# --- block bounds ------------------------------------------------------------------

def test_hyperbolic_paths_have_index_at_most_one(rng):
    for _ in range(40):
        psi0 = ix.random_symplectic(2, rng)
        a = rng.uniform(-3, 0)
        p = ix.hyperbolic_path(rng.uniform(0.2, 4), psi0, a, a + rng.uniform(0.1, 5))
        assert abs(ix.robbin_salamon(p)) <= 1


def test_hyperbolic_path_generator():
    p = ix.hyperbolic_path(1.3, np.eye(2), 0.0, 1.0)
    assert p.generator_symmetry_defect() < 1e-12
    assert p.max_symplectic_defect() < 1e-12
    np.testing.assert_allclose(p.S(0.4), np.diag([1.3, -1.3]))


def test_nonnegative_paths_obey_n_to_2n(rng):
    for _ in range(15):
        dim = int(rng.choice([2, 4]))
        M = ix.random_symplectic(dim, rng)
        try:
            p = ix.nonneg_path(M)
        except ValueError:
            continue
        n = dim // 2
        assert ix.min_generator_eigenvalue(p) >= -1e-9
        np.testing.assert_allclose(p.psi(0.0), np.eye(dim), atol=1e-8)
        np.testing.assert_allclose(p.psi(1.0), M, atol=1e-8)
        assert n <= ix.robbin_salamon(p) <= 2 * n


def test_saddle_center_bound_formula():
    assert ix.saddle_center_bound(1.0, 0.0, 2 * np.pi) == 1
    assert ix.saddle_center_bound(1.0, 0.0, 6 * np.pi) == 5
    assert ix.saddle_center_bound(2.0, 0.0, 1.0) == -1
    with pytest.raises(ValueError):
        ix.saddle_center_bound(1.0, 1.0, 1.0)


def test_regularized_saddle_eigenvalues_match_cartesian():
    from cr3bp.saddle_center import saddle_center_data

    l1, l2, _ = ix.regularized_saddle_eigenvalues(0.5)
    s = saddle_center_data(0.5)
    # the time change at l1 rescales both rates by the same positive factor
    assert l1 / l2 == pytest.approx(s.lambda1 / s.lambda2, rel=1e-8)


@pytest.mark.parametrize("m", [1, 4, 10])
def test_saddle_center_flow_index_grows_linearly(m, rng):
    l1, l2, _ = ix.regularized_saddle_eigenvalues(0.5)
    for _ in range(3):
        p = ix.saddle_center_path(l1, l2, 0.0, m * 2 * np.pi / l2, ix.random_symplectic(4, rng))
        assert ix.robbin_salamon(p) >= 2 * m - 1


def test_random_regularized_trajectories_respect_lower_bound(rng):
    for _ in range(4):
        p = ix.random_hat_trajectory_path(rng)
        assert -2.3 <= p.level <= -1.95
        assert p.max_symplectic_defect(20) < 1e-6
        assert ix.robbin_salamon(p) >= -9


# --- Conley-Zehnder and rotation number --------------------------------------------

def test_geometric_cz_agrees_with_robbin_salamon(rng):
    checked = 0
    for _ in range(20):
        A = rng.normal(size=(2, 2))
        p = ix.constant_path((A + A.T) / 2 * rng.uniform(1, 6), 0.0, 1.0)
        try:
            rs = ix.robbin_salamon(p)
        except ix.DegenerateCrossingError:
            continue
        assert ix.conley_zehnder_geometric(p, n=2000) == rs
        checked += 1
    assert checked >= 10


@pytest.mark.parametrize("rho", [0.3, 1.7, 2.5])
def test_rotation_number_of_uniform_rotation(rho):
    assert ix.rotation_number(ix.rotation_path(rho), k_max=10, n=500).rho == pytest.approx(rho, abs=0.02)


# --- files ---------------------------------------------------------------------------

def test_path_csv_round_trip(tmp_path, rng):
    p = ix.constant_path(np.diag([3.0, 1.0, 2.0, 5.0]), 0.0, 2.0, ix.random_symplectic(4, rng))
    f = tmp_path / "path.csv"
    ix.write_path_csv(p, f, n=800)
    q = ix.read_path_csv(f)
    assert ix.robbin_salamon(q) == ix.robbin_salamon(p)
    assert f.read_text().splitlines()[0].startswith("t,psi_00,psi_01")


def test_read_path_csv_rejects_non_symplectic(tmp_path):
    f = tmp_path / "bad.csv"
    f.write_text("t,psi_00,psi_01,psi_10,psi_11\n0,1,0,0,1\n1,2,0,0,2\n")
    with pytest.raises(ValueError):
        ix.read_path_csv(f)
