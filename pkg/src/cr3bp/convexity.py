"""Strict convexity of magnetic energy levels via the ``det U_W`` criterion.

A Hamiltonian ``H(y, x) = |y + F(x)|^2 / 2 + V(x)`` on ``R^2 x R^2`` has a
positive-definite tangent Hessian along ``H = level`` exactly where

    det U_W(theta, x) > 0,
    U_W = r^2 (cos theta Hess f1 + sin theta Hess f2) + r Hess V + r^{-1} grad V (x) grad V,

with ``r = sqrt(2 (level - V))`` and ``theta`` the argument of ``y + F``.  This
module evaluates the criterion in closed form, checks it against the
determinant of the tangent Hessian in an explicit frame, and scans it over
the Hill region of the regularized equal-mass problem.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from . import positivity_table as pt
from .core_dynamics import DomainError, L1_value, mu_of_r1
from .regularization import magnetic_potential, regularized_potential

__all__ = [
    "MagneticModel",
    "ConvexityScan",
    "copenhagen_model",
    "copenhagen_r_squared",
    "u_w_matrix",
    "det_u_w",
    "decoupled_det",
    "tangent_hessian_det",
    "c0_terms",
    "hill_bound",
    "hill_boundary_x1",
    "convexity_scan",
    "vanishing_order",
    "helper_functions",
    "shat2",
    "shat1",
    "appendix_b_suite",
    "nonconvexity_certificate",
    "cubic_coefficient_fd",
]

S_PLUS = np.array([0.0, np.pi / 2])


@dataclass(frozen=True)
class MagneticModel:
    """Magnetic Hamiltonian ``|y + F|^2/2 + V`` restricted to ``H = level``.

    ``field(x)`` returns ``(F, dF, d2F)`` with ``dF[..., k, i] = d_i f_k`` and
    ``d2F[..., k, i, j] = d_i d_j f_k``; ``potential(x)`` returns
    ``(V, grad V, Hess V)``.  ``h`` is the three-body energy the potential was
    built for (informational only).
    """

    field: Callable
    potential: Callable
    level: float = 0.0
    decoupled: bool = False
    h: float | None = None
    mu: float | None = None

    def r_squared(self, x):
        return 2.0 * (self.level - self.potential(x)[0])


def copenhagen_model(h: float = -2.0, mu: float = 0.5) -> MagneticModel:
    """Regularized three-body Hamiltonian at energy ``h`` in elliptic coordinates.

    For ``mu = 1/2`` the potential separates and the model is flagged decoupled.
    """
    h = float(h)
    return MagneticModel(
        field=magnetic_potential,
        potential=lambda x: regularized_potential(x, mu, h),
        level=0.0,
        decoupled=(mu == 0.5),
        h=h,
        mu=mu,
    )


def copenhagen_r_squared(h: float, x):
    """``r^2 = -2 V`` in the closed form used for the equal-mass problem."""
    x = np.asarray(x, float)
    x1, x2 = x[..., 0], x[..., 1]
    return (h / 2 * (np.cosh(x1) ** 2 - np.cos(x2) ** 2) + np.cosh(x1)
            + (np.sinh(2 * x1) ** 2 + np.sin(2 * x2) ** 2) / 64)


# ---------------------------------------------------------------------------
# the criterion

def _data(model: MagneticModel, theta, x, allow_outside=False):
    x = np.asarray(x, float)
    theta = np.asarray(theta, float)
    _, _, d2F = model.field(x)
    V, g, HV = model.potential(x)
    r2 = 2.0 * (model.level - V)
    if not allow_outside and np.any(r2 < -1e-12 * np.maximum(1.0, np.abs(V))):
        raise DomainError("point outside the Hill region (V > level)")
    r = np.sqrt(np.clip(r2, 0.0, None))
    s, t = np.cos(theta), np.sin(theta)
    A = s[..., None, None] * d2F[..., 0, :, :] + t[..., None, None] * d2F[..., 1, :, :]
    return r, A, g, HV


def u_w_matrix(model: MagneticModel, theta, x) -> np.ndarray:
    """The 2x2 matrix ``U_W(theta, x)``; requires ``r > 0``."""
    r, A, g, HV = _data(model, theta, x)
    if np.any(r == 0):
        raise DomainError("U_W is singular on the boundary of the Hill region; use det_u_w")
    r = r[..., None, None]
    return r ** 2 * A + r * HV + g[..., :, None] * g[..., None, :] / r


def det_u_w(model: MagneticModel, theta, x, allow_outside: bool = False):
    """``det U_W`` written as ``r^2 det U1 + g^T adj(U1) g`` with ``U1 = r A + Hess V``.

    The rewrite has no ``1/r`` and reduces to ``(grad V J) Hess V (grad V J)^T``
    on the boundary ``r = 0``.  Broadcasts over ``theta`` and the leading
    axes of ``x``.
    """
    r, A, g, HV = _data(model, theta, x, allow_outside)
    rr = r[..., None, None] if np.ndim(r) else r
    U1 = rr * A + HV
    u11, u12, u22 = U1[..., 0, 0], U1[..., 0, 1], U1[..., 1, 1]
    g1, g2 = g[..., 0], g[..., 1]
    return r ** 2 * (u11 * u22 - u12 ** 2) + g1 ** 2 * u22 + g2 ** 2 * u11 - 2 * g1 * g2 * u12


def decoupled_det(model: MagneticModel, theta, x):
    """``d V1^2 + c V2^2 + r^2 c d`` for a decoupled model."""
    r, A, g, HV = _data(model, theta, x)
    c = r * A[..., 0, 0] + HV[..., 0, 0]
    d = r * A[..., 1, 1] + HV[..., 1, 1]
    return d * g[..., 0] ** 2 + c * g[..., 1] ** 2 + r ** 2 * c * d


def _full_hessian(model: MagneticModel, y, x):
    F, dF, d2F = model.field(x)
    _, _, HV = model.potential(x)
    yF = y + F
    M = np.einsum("ki,kj->ij", dF, dF) + np.einsum("k,kij->ij", yF, d2F) + HV
    H = np.zeros((4, 4))
    H[:2, :2] = np.eye(2)
    H[:2, 2:] = dF
    H[2:, :2] = dF.T
    H[2:, 2:] = M
    return H


def tangent_hessian_det(model: MagneticModel, theta: float, x, boundary_tol: float = 0.0) -> float:
    """Determinant of the tangent Hessian in an explicit tangent frame.

    Interior points use the frame ``(y_F J^T, 0)``, ``(-y_F dF - grad V, y_F)``,
    ``((y_F dF + grad V) J, y_F J)`` and return ``det W / |y_F|^4``.  Points
    with ``r <= boundary_tol`` use the frame ``e1, e2, (0, 0, V2, -V1)``.
    """
    x = np.asarray(x, float)
    F, dF, _ = model.field(x)
    V, g, _ = model.potential(x)
    r2 = 2.0 * (model.level - V)
    if r2 < -1e-12:
        raise DomainError("point outside the Hill region (V > level)")
    r = np.sqrt(max(r2, 0.0))
    J = np.array([[0.0, -1.0], [1.0, 0.0]])
    if r <= boundary_tol:
        X = np.array([[1.0, 0, 0, 0], [0, 1.0, 0, 0], [0, 0, g[1], -g[0]]])
        H = _full_hessian(model, -F, x)
        return float(np.linalg.det(X @ H @ X.T))
    yF = r * np.array([np.cos(theta), np.sin(theta)])
    y = yF - F
    w = yF @ dF + g
    X = np.array([
        np.concatenate([yF @ J.T, np.zeros(2)]),
        np.concatenate([-w, yF]),
        np.concatenate([w @ J, yF @ J]),
    ])
    H = _full_hessian(model, y, x)
    return float(np.linalg.det(X @ H @ X.T) / r ** 4)


def c0_terms(model: MagneticModel, theta, x) -> dict:
    """Split of ``det U_W`` into the ``r``-graded pieces and the ``D1 + D2`` form."""
    x = np.asarray(x, float)
    _, _, d2F = model.field(x)
    V, g, HV = model.potential(x)
    e = model.level - V
    r = np.sqrt(2 * e)
    s, t = np.cos(theta), np.sin(theta)
    f1, f2 = d2F[0], d2F[1]
    V1, V2 = g
    V11, V12, V22 = HV[0, 0], HV[0, 1], HV[1, 1]
    det2 = lambda a: a[0, 0] * a[1, 1] - a[0, 1] ** 2  # noqa: E731
    A2 = (s ** 2 * det2(f1) + t ** 2 * det2(f2)
          + s * t * (f1[0, 0] * f2[1, 1] + f2[0, 0] * f1[1, 1] - 2 * f1[0, 1] * f2[0, 1]))
    A13 = (s * (f1[0, 0] * V22 + f1[1, 1] * V11 - 2 * f1[0, 1] * V12)
           + t * (f2[0, 0] * V22 + f2[1, 1] * V11 - 2 * f2[0, 1] * V12))
    A11 = (s * (f1[1, 1] * V1 ** 2 + f1[0, 0] * V2 ** 2 - 2 * f1[0, 1] * V1 * V2)
           + t * (f2[1, 1] * V1 ** 2 + f2[0, 0] * V2 ** 2 - 2 * f2[0, 1] * V1 * V2))
    A0 = 2 * e * (V11 * V22 - V12 ** 2) + V22 * V1 ** 2 + V11 * V2 ** 2 - 2 * V12 * V1 * V2
    C0 = 4 * e ** 2 * A2 + r * (2 * e * A13 + A11) + A0
    a12 = s * f1[0, 1] + t * f2[0, 1]
    a11 = s * f1[0, 0] + t * f2[0, 0]
    a22 = s * f1[1, 1] + t * f2[1, 1]
    D1 = -(2 * e * a12 + (2 * e * V12 + V1 * V2) / r) ** 2 + V1 ** 2 * V2 ** 2 / (2 * e)
    D2 = ((2 * e * a11 + (2 * e * V11 + V1 ** 2) / r) * (2 * e * a22 + (2 * e * V22 + V2 ** 2) / r)
          - V1 ** 2 * V2 ** 2 / (2 * e))
    return {"A2": A2, "A13": A13, "A11": A11, "A0": A0, "C0": C0, "D1": D1, "D2": D2}


# ---------------------------------------------------------------------------
# Hill region of the equal-mass problem

def hill_bound(h: float) -> float:
    """Largest ``x1`` of the Hill region component, the root of ``V(x1, 0) = level``."""
    model = copenhagen_model(h)
    f = lambda x1: float(model.potential(np.array([x1, 0.0]))[0])  # noqa: E731
    # the saddle of V on x2 = 0 bounds the component
    hi = 0.1
    while f(hi) < 0:
        hi += 0.1
        if hi > 5:
            raise DomainError(f"Hill region unbounded for h={h}")
    return brentq(f, 0.0 if f(0.0) > 0 else hi - 0.1, hi, xtol=1e-15)


def hill_boundary_x1(model: MagneticModel, x2, x1_max: float):
    """``x1`` of the boundary point on each horizontal line, ``nan`` if the line misses the region."""
    out = np.full(np.shape(x2), np.nan)
    for i, b in enumerate(np.atleast_1d(x2)):
        f = lambda a: float(model.potential(np.array([a, b]))[0] - model.level)  # noqa: E731
        lo, hi = f(0.0), f(x1_max * 1.0000001)
        if lo <= 0 < hi:
            out.flat[i] = brentq(f, 0.0, x1_max * 1.0000001, xtol=1e-15) if lo < 0 else 0.0
    return out


@dataclass
class ConvexityScan:
    """Result of a grid scan of ``det U_W`` over the quarter Hill region times ``theta``."""

    h: float
    x1: np.ndarray
    x2: np.ndarray
    theta: np.ndarray
    mask: np.ndarray
    min_over_theta: np.ndarray
    argmin_theta: np.ndarray
    minimum: float
    argmin: tuple
    boundary_x: np.ndarray
    boundary_values: np.ndarray
    boundary_minimum: float
    collar: float | None
    grid_variation: float
    margin_ratio: float
    vanishing_order: float | None = None
    vanishing_fit: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "h": self.h,
            "min": self.minimum,
            "argmin": {"x1": self.argmin[0], "x2": self.argmin[1], "theta": self.argmin[2]},
            "boundary_min": self.boundary_minimum,
            "n_points": int(self.mask.sum()) * len(self.theta),
            "collar": self.collar,
            "margins": {"grid_variation": self.grid_variation, "min_over_variation": self.margin_ratio},
            "vanishing_order": self.vanishing_order,
        }

    def rows(self):
        """``(x1, x2, theta, det U_W)`` at the minimizing ``theta`` of every grid point."""
        X1, X2 = np.meshgrid(self.x1, self.x2, indexing="ij")
        m = self.mask
        return np.column_stack([X1[m], X2[m], self.argmin_theta[m], self.min_over_theta[m]])


def _threads(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("CR3BP_THREADS", "0")) or (os.cpu_count() or 1)
    return max(1, int(threads))


def _on_level(model: MagneticModel, point) -> bool:
    return abs(float(model.potential(np.asarray(point, float))[0]) - model.level) < 1e-12


def convexity_scan(model: MagneticModel, n1: int = 400, n2: int = 400, n_theta: int = 64,
                   collar: float = 1e-3, fit_window=(1e-4, 1e-2), threads: int | None = None) -> ConvexityScan:
    """Scan ``det U_W`` on ``[0, x1bar] x [0, pi/2]`` (Hill-masked) times ``n_theta`` angles.

    When the saddle ``(0, pi/2)`` lies on the level, grid points within
    ``collar`` of it are excluded and the vanishing order of ``det U_W``
    along ``x1 = 0`` is fitted on ``cos x2`` in ``fit_window``.
    """
    if min(n1, n2) < 64:
        raise ValueError("grid resolution must be at least 64 per axis")
    x1max = hill_bound(model.h)
    x1 = np.linspace(0.0, x1max, n1)
    x2 = np.linspace(0.0, np.pi / 2, n2)
    theta = np.linspace(0.0, 2 * np.pi, n_theta, endpoint=False)
    X = np.stack(np.meshgrid(x1, x2, indexing="ij"), axis=-1)
    V = model.potential(X)[0]
    mask = V <= model.level
    singular = _on_level(model, S_PLUS)
    if singular:
        mask &= np.hypot(X[..., 0] - S_PLUS[0], X[..., 1] - S_PLUS[1]) >= collar
    pts = X[mask]

    def work(th):
        return det_u_w(model, th, pts)

    with ThreadPoolExecutor(_threads(threads)) as ex:
        vals = np.stack(list(ex.map(work, theta)), axis=0)
    k = np.argmin(vals, axis=0)
    mins = vals[k, np.arange(len(pts))]
    min_grid = np.full(mask.shape, np.nan)
    min_grid[mask] = mins
    arg_grid = np.full(mask.shape, np.nan)
    arg_grid[mask] = theta[k]
    j = int(np.argmin(mins))
    minimum = float(mins[j])
    argmin = (float(pts[j, 0]), float(pts[j, 1]), float(theta[k[j]]))

    variation = 0.0
    for ax in (0, 1):
        d = np.abs(np.diff(min_grid, axis=ax))
        if np.any(np.isfinite(d)):
            variation = max(variation, float(np.nanmax(d)))

    bx1 = hill_boundary_x1(model, x2, x1max)
    ok = np.isfinite(bx1)
    bx = np.column_stack([bx1[ok], x2[ok]])
    if singular:
        bx = bx[np.hypot(bx[:, 0] - S_PLUS[0], bx[:, 1] - S_PLUS[1]) >= collar]
    bvals = det_u_w(model, 0.0, bx, allow_outside=True) if len(bx) else np.array([])

    scan = ConvexityScan(
        h=model.h, x1=x1, x2=x2, theta=theta, mask=mask, min_over_theta=min_grid, argmin_theta=arg_grid,
        minimum=minimum, argmin=argmin, boundary_x=bx, boundary_values=bvals,
        boundary_minimum=float(bvals.min()) if len(bvals) else float("nan"),
        collar=collar if singular else None, grid_variation=variation,
        margin_ratio=minimum / variation if variation > 0 else float("inf"),
    )
    if singular:
        order, fit = vanishing_order(model, theta, fit_window)
        scan.vanishing_order = order
        scan.vanishing_fit = fit
    return scan


def vanishing_order(model: MagneticModel, theta, window=(1e-4, 1e-2), n: int = 25):
    """Log-log slope of ``min_theta det U_W`` against ``cos x2`` along ``x1 = 0``."""
    s2 = np.geomspace(window[0], window[1], n)
    pts = np.column_stack([np.zeros(n), np.arccos(s2)])
    vals = np.min(np.stack([det_u_w(model, th, pts, allow_outside=True) for th in np.atleast_1d(theta)]), axis=0)
    if np.any(vals <= 0):
        return float("nan"), {"s2": s2, "values": vals}
    slope, intercept = np.polyfit(np.log(s2), np.log(vals), 1)
    return float(slope), {"s2": s2, "values": vals, "intercept": float(intercept)}


# ---------------------------------------------------------------------------
# closed-form helpers of the positivity argument

def _x_of_s(s1, s2):
    return np.stack([np.arccosh(np.asarray(s1, float)), np.arccos(np.asarray(s2, float))], axis=-1)


def _bisect(f, a: float, b: float, tol: float = 1e-15) -> float:
    fa = f(a)
    while b - a > tol * max(1.0, abs(a)):
        m = 0.5 * (a + b)
        fm = f(m)
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def shat2() -> float:
    """Unique zero of ``D`` on ``(0, 1)``, located by bisection."""
    return _bisect(lambda s: float(pt.D(s)), 0.0, 1.0)


def shat1() -> float:
    """Root of ``V(s1, 5/8) = 0`` at ``h = -2``."""
    return _bisect(lambda s: float(pt.V_s(s, 5 / 8)), 1.0, 1.9)


def helper_functions(h: float, s1, s2) -> dict:
    """Closed-form quantities of the positivity argument at ``(cosh x1, cos x2) = (s1, s2)``.

    Returns ``c_m1`` (``-r f2,11 + V11``), ``D`` (``d1(0, x2)`` at ``h = -2``),
    ``hat_D`` (the same at ``h``), ``W0``, ``hat_W0``, ``I0``, ``underline_h``,
    ``bar_h`` and the zero ``shat2`` of ``D``.
    """
    s1 = np.asarray(s1, float)
    s2 = np.asarray(s2, float)
    x = _x_of_s(s1, s2)
    V, g, HV = regularized_potential(x, 0.5, h)
    r = np.sqrt(np.clip(-2 * V, 0.0, None))
    f211 = s1 * np.sqrt(s1 ** 2 - 1)
    c_m1 = -r * f211 + HV[..., 0, 0]
    D = pt.D(s2)
    hat_D = pt.hat_D16(s2, h) / 16
    W0 = g[..., 0] ** 2 / c_m1 + r ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        bh = pt.bar_h(s2)
    return {
        "c_m1": c_m1,
        "D": D,
        "hat_D": hat_D,
        "W0": W0,
        "hat_W0": W0 + hat_D,
        "I0": g[..., 1] ** 2 + hat_D * W0,
        "underline_h": pt.underline_h(s2),
        "bar_h": bh,
        "shat2": shat2(),
    }


# ---------------------------------------------------------------------------
# grid certification of the explicit polynomial facts

@dataclass(frozen=True)
class _Claim:
    name: str
    fn: Callable
    domain: tuple
    sense: str = ">0"  # ">0", "<0", ">=0"
    mask: Callable | None = None


def _grid(domain, n):
    axes = [np.linspace(lo, hi, n) for lo, hi in domain]
    return np.meshgrid(*axes, indexing="ij") if len(axes) > 1 else axes


def _hill_sc(s2, c):
    return pt.V_s_critical(1 + c ** 2 * s2 ** 2, s2) <= 0


def _omega(s2, c):
    return _hill_sc(s2, c) & (s2 <= _SHAT2)


_SHAT2 = shat2()
_SBAR1 = float(np.cosh(hill_bound(-2.0)))


def _claims():
    C = pt.C_MAX
    E, U = (0.0, 1.0), (0.0, 1.2)
    return [
        _Claim("c_m1_edge", pt.c_m1_edge, ((1.0, _SBAR1),)),
        _Claim("c_m1_edge_square_gap", pt.c_m1_edge_square_gap, ((1.0, 2.0),)),
        _Claim("dD_gap", pt.dD_gap, (E,)),
        _Claim("dD", pt.dD, ((0.0, 1.0 - 1e-12),), ">=0"),
        _Claim("g0_on_hill", pt.g0, ((1.0, _SBAR1),)),
        _Claim("j0_on_hill", pt.j0, (E, (0.0, C)), ">0", _hill_sc),
        _Claim("j3_on_hill", pt.j3, (E, (0.0, C)), "<0", _hill_sc),
        _Claim("j1_minus_59_4", lambda s: pt.j1(s) - 59 / 4, (E,)),
        _Claim("g4_second", pt.g4_second, ((1.0, 1.6),), "<0"),
        _Claim("g4", pt.g4, ((1.0, 1.6),)),
        _Claim("j4_on_omega", pt.j4, (E, (0.0, C)), ">0", _omega),
        _Claim("j20_minus_j2", lambda s, c: pt.j20(s, c) - pt.j2(s, c), (E, (0.0, C))),
        _Claim("j2_gap256", pt.j2_gap256, (E, (0.0, 17 / 14))),
        _Claim("j21", pt.j21_v, (E,)),
        _Claim("j22", pt.j22_v, (E,)),
        _Claim("j23", pt.j23_v, (E,)),
        _Claim("j24", pt.j24_v, (E,)),
        _Claim("j25", pt.j25_v, (E,)),
        _Claim("D16_minus_Dminus", lambda s: pt.D16(s) - pt.D_minus(s), (E,), ">=0"),
        _Claim("Dplus_minus_D16", lambda s: pt.D_plus(s) - pt.D16(s), (E,), ">=0"),
        _Claim("d_plus_gap", pt.d_plus_gap, ((0.0, 1.0 - 1e-9),)),
        _Claim("d_minus_gap", pt.d_minus_gap, (E,)),
        _Claim("E1_on_omega", pt.E1, (E, (0.0, C)), ">0", _omega),
        _Claim("16E1_minus_E2_on_omega", lambda s, c: 16 * pt.E1(s, c) - pt.E2(s, c), (E, (0.0, C)), ">=0", _omega),
        _Claim("E2", pt.E2, (E, (0.0, C))),
        _Claim("h1", pt.h1, (E, (0.0, C)), ">=0"),
        _Claim("h2", pt.h2, ((0.0, C),), ">=0"),
        _Claim("h3", pt.h3, (U,)),
        _Claim("h4", pt.h4, (U,)),
        _Claim("h5", pt.h5, (U,)),
        _Claim("h6", pt.h6, (U,)),
        _Claim("k1", pt.k1, (U,)),
        _Claim("k3", pt.k3, (U,)),
        _Claim("E3_edge", pt.E3_edge, (U,)),
        _Claim("minus_dk5", pt.minus_dk5, (U,)),
        _Claim("k5_low", pt.k5, ((0.0, 0.8),)),
        _Claim("E3", pt.E3, (E, U)),
        _Claim("D0_high", pt.D0, ((0.8, 1.2),)),
        _Claim("D1", pt.D1_value, (E,)),
        _Claim("D0_minus_D1", lambda v: pt.D0_in_v(v) - pt.D1_value(v), (E,), ">=0"),
        _Claim("quartic_a", pt.quartic_a, ((1.0, 1.5),), "<0"),
        _Claim("quartic_b", pt.quartic_b, ((1.0, 2.0),)),
        _Claim("J_gap", pt.J_gap, ((1.0, 2.0),)),
        _Claim("E0", lambda v: pt.E0(1 + v), ((0.0, 0.5),), "<0"),
        _Claim("G2", pt.G2, ((1e-6, 1 - 1e-6), (-1.0, 1.0)), "<0"),
        _Claim("G2_gap", pt.G2_gap, (E,)),
    ]


def appendix_b_suite(n: int = 2000, seed: int = 0) -> dict:
    """Grid-check every explicit sign claim and the transcription self-test.

    One-dimensional claims use ``50 n`` points, two-dimensional ones ``n x n``.
    Each entry reports the extreme value in the claimed direction and the
    ratio of that margin to the largest jump between neighbouring grid values.
    """
    claims = {}
    for cl in _claims():
        nn = n * 50 if len(cl.domain) == 1 else n
        grids = _grid(cl.domain, nn)
        with np.errstate(invalid="ignore", divide="ignore"):
            vals = np.asarray(cl.fn(*grids), float)
        if cl.mask is not None:
            vals = np.where(cl.mask(*grids), vals, np.nan)
        signed = -vals if cl.sense == "<0" else vals
        m = float(np.nanmin(signed))
        jump = 0.0
        for ax in range(vals.ndim):
            d = np.abs(np.diff(vals, axis=ax))
            if np.any(np.isfinite(d)):
                jump = max(jump, float(np.nanmax(d)))
        ok = m >= 0 if cl.sense == ">=0" else m > 0
        claims[cl.name] = {"sense": cl.sense, "margin": m, "grid_jump": jump,
                           "margin_over_jump": m / jump if jump > 0 else float("inf"),
                           "points": int(np.isfinite(vals).sum()), "ok": bool(ok)}
    identities = {i.name: pt.identity_error(i, 20, seed) for i in pt.IDENTITIES}
    k5_45 = float(pt.k5(0.8))
    e100 = float(pt.E1(0.0, 0.0))
    return {
        "claims": claims,
        "identities": identities,
        "identities_ok": all(v < 1e-9 for v in identities.values()),
        "k5_at_4_5": k5_45,
        "E1_at_origin": e100,
        "E1_at_origin_exact": 119 / 16 * (5 - np.sqrt(17.0)),
        "ok": all(c["ok"] for c in claims.values()) and all(v < 1e-9 for v in identities.values()),
    }


# ---------------------------------------------------------------------------
# mu != 1/2: sign change across the Lagrange point

def nonconvexity_certificate(r1, s):
    """``(G1(r1), G2(r1, s))``; their product is the cubic coefficient of ``det U_W`` at the saddle."""
    return pt.G1(r1), pt.G2(r1, s)


def cubic_coefficient_fd(r1: float, theta: float, step: float = 1e-3, side: int = -1) -> float:
    """One-sided cubic Taylor coefficient of ``x -> det U_W(theta, 0, x* + x)``.

    ``x* = arccos(1 - 2 r1)`` is the first Lagrange point and the model uses
    ``mu = mu(r1)`` at its critical energy.  Since ``r`` behaves like ``|x|``
    the function is smooth only on each side of ``x*``; five samples
    ``x = side * step * (1..5)`` are fitted exactly by ``a3 x^3 + ... + a7 x^7``
    and ``a3`` is returned.  On ``side = -1`` (towards the primary at
    ``q1 = 1/2``) this is ``G1 G2``; ``side = +1`` gives a different
    coefficient of the same sign.
    """
    mu = float(mu_of_r1(r1))
    model = copenhagen_model(L1_value(mu), mu)
    xs = np.arccos(1 - 2 * r1)
    off = np.sign(side) * step * np.arange(1, 6)
    pts = np.column_stack([np.zeros(5), xs + off])
    f = det_u_w(model, theta, pts, allow_outside=True)
    A = np.column_stack([off ** p for p in range(3, 8)])
    return float(np.linalg.solve(A, f)[0])
