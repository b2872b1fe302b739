"""Elliptic-hyperbolic regularization of both collisions.

Works in the frame with the moon at ``q = +1/2`` and the earth at ``q = -1/2``.
The chart is ``q1 = cosh(x1) cos(x2) / 2``, ``q2 = sinh(x1) sin(x2) / 2`` with
momenta ``y = Dphi(x)^T p``.  The regularized Hamiltonian is
``Hhat = (cosh^2 x1 - cos^2 x2) (Hbar - h) / 4``; on its zero level the flow is
the original flow with time rescaled by ``dt/dsigma = (cosh^2 x1 - cos^2 x2) / 4``.
Regularized phase points are arrays ``(y1, y2, x1, x2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import core_dynamics as cd
from .flow import HamiltonianSystem

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class RegularizedState:
    y: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        x[1] = np.mod(x[1], TWO_PI)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float))

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.y, self.x])


@dataclass(frozen=True)
class RegularizedHamiltonianParams:
    mu: float
    h: float


def flow_correspondence_factor(x) -> np.ndarray:
    """``(cosh^2 x1 - cos^2 x2)/4``: the time change between the two flows; zero exactly at collisions."""
    x = np.asarray(x, float)
    return 0.25 * (np.cosh(x[..., 0]) ** 2 - np.cos(x[..., 1]) ** 2)


def chart(x) -> np.ndarray:
    x = np.asarray(x, float)
    return np.stack([0.5 * np.cosh(x[..., 0]) * np.cos(x[..., 1]), 0.5 * np.sinh(x[..., 0]) * np.sin(x[..., 1])], axis=-1)


def chart_jacobian(x) -> np.ndarray:
    x = np.asarray(x, float)
    c, s = np.cosh(x[..., 0]), np.sinh(x[..., 0])
    co, si = np.cos(x[..., 1]), np.sin(x[..., 1])
    return 0.5 * np.stack([np.stack([s * co, -c * si], -1), np.stack([c * si, s * co], -1)], -2)


def from_regularized(rs) -> np.ndarray:
    """Regularized point -> phase point ``(p, q)`` in the centred frame."""
    w = rs.as_array() if isinstance(rs, RegularizedState) else np.asarray(rs, float)
    y, x = w[..., :2], w[..., 2:]
    if np.any(flow_correspondence_factor(x) < 1e-14):
        raise cd.DomainError("regularized point lies on the collision set")
    D = chart_jacobian(x)
    p = np.linalg.solve(np.swapaxes(D, -1, -2), y[..., None])[..., 0]
    return np.concatenate([p, chart(x)], axis=-1)


def to_regularized(z) -> np.ndarray:
    """Phase point in the centred frame -> regularized point with ``x1 >= 0`` and ``x2`` in ``[0, 2 pi)``."""
    z = np.asarray(z.as_array() if isinstance(z, cd.RotatingState) else z, float)
    q = z[..., 2:]
    dm = np.hypot(q[..., 0] - 0.5, q[..., 1])
    de = np.hypot(q[..., 0] + 0.5, q[..., 1])
    if np.any(dm < cd.COLLISION_RADIUS) or np.any(de < cd.COLLISION_RADIUS):
        raise cd.DomainError("position at a primary")
    x1 = np.arccosh(np.maximum(dm + de, 1.0))
    cos2 = np.clip(de - dm, -1.0, 1.0)
    sin2 = np.sqrt(np.maximum(1.0 - cos2**2, 0.0))
    sin2 = np.where(q[..., 1] < 0, -sin2, sin2)
    # away from the focal segment the sine is better conditioned from q2 directly
    sh = np.sinh(x1)
    safe = sh > 1e-3
    sin2 = np.where(safe, 2.0 * q[..., 1] / np.where(safe, sh, 1.0), sin2)
    ch = np.cosh(x1)
    cos2 = np.where(np.abs(cos2) < 0.9, cos2, 2.0 * q[..., 0] / ch)
    x2 = np.mod(np.arctan2(sin2, cos2), TWO_PI)
    x = np.stack([x1, x2], axis=-1)
    D = chart_jacobian(x)
    y = np.einsum("...ji,...j->...i", D, z[..., :2])
    return np.concatenate([y, x], axis=-1)


def standard_to_regularized(mu, z) -> np.ndarray:
    return to_regularized(cd.to_centered_frame(mu, z))


def regularized_to_standard(mu, w) -> np.ndarray:
    return cd.from_centered_frame(mu, from_regularized(w))


def centered_hamiltonian(mu, z):
    """``Hbar`` in the centred frame (identical to ``H`` after the frame change)."""
    return cd.hamiltonian(mu, cd.from_centered_frame(mu, z))


# ---------------------------------------------------------------------------
# closed form of the regularized Hamiltonian

def copenhagen_split(x, h: float):
    """Separated potential of the equal-mass case.

    Returns ``(W1, dW1, d2W1), (W2, dW2, d2W2)`` with ``W1`` a function of
    ``x1`` and ``W2`` of ``x2``; their sum is the ``mu``-independent potential.
    """
    x = np.asarray(x, float)
    x1, x2 = x[..., 0], x[..., 1]
    c = np.cosh(x1)
    w1 = -h * c**2 / 4 - c / 2 - np.sinh(2 * x1) ** 2 / 128
    dw1 = -h * np.sinh(2 * x1) / 4 - np.sinh(x1) / 2 - np.sinh(4 * x1) / 64
    ddw1 = -h * np.cosh(2 * x1) / 2 - c / 2 - np.cosh(4 * x1) / 16
    co = np.cos(x2)
    w2 = h * co**2 / 4 - np.sin(2 * x2) ** 2 / 128
    dw2 = -h * np.sin(2 * x2) / 4 - np.sin(4 * x2) / 64
    ddw2 = -h * np.cos(2 * x2) / 2 - np.cos(4 * x2) / 16
    return (w1, dw1, ddw1), (w2, dw2, ddw2)


def magnetic_potential(x):
    """``F = (sin(2 x2)/8, sinh(2 x1)/8)`` with first and second derivatives.

    Returns ``(F, dF, d2F)`` where ``dF[..., i, j] = dF_i/dx_j`` and
    ``d2F[..., i, j, k]`` is the corresponding Hessian entry.
    """
    x = np.asarray(x, float)
    x1, x2 = x[..., 0], x[..., 1]
    shape = x.shape[:-1]
    F = np.stack([np.sin(2 * x2) / 8, np.sinh(2 * x1) / 8], axis=-1)
    dF = np.zeros(shape + (2, 2))
    dF[..., 0, 1] = np.cos(2 * x2) / 4
    dF[..., 1, 0] = np.cosh(2 * x1) / 4
    d2F = np.zeros(shape + (2, 2, 2))
    d2F[..., 0, 1, 1] = -np.sin(2 * x2) / 2
    d2F[..., 1, 0, 0] = np.sinh(2 * x1) / 2
    return F, dF, d2F


def mass_asymmetry_potential(x, mu: float):
    """``Vhat = cos(x2)/2 - (1/2 - mu + cosh x1 cos x2)(cosh^2 x1 - cos^2 x2)/16`` with derivatives."""
    x = np.asarray(x, float)
    c, s = np.cosh(x[..., 0]), np.sinh(x[..., 0])
    co, si = np.cos(x[..., 1]), np.sin(x[..., 1])
    k = 0.5 - mu
    P, P1, P2 = k + c * co, s * co, -c * si
    P11, P22, P12 = c * co, -c * co, -s * si
    Q, Q1, Q2 = c**2 - co**2, 2 * c * s, 2 * co * si
    Q11, Q22 = 2 * (c**2 + s**2), 2 * (co**2 - si**2)
    val = co / 2 - P * Q / 16
    g = np.stack([-(P1 * Q + P * Q1) / 16, -si / 2 - (P2 * Q + P * Q2) / 16], axis=-1)
    H = np.empty(x.shape[:-1] + (2, 2))
    H[..., 0, 0] = -(P11 * Q + 2 * P1 * Q1 + P * Q11) / 16
    H[..., 1, 1] = -co / 2 - (P22 * Q + 2 * P2 * Q2 + P * Q22) / 16
    H[..., 0, 1] = H[..., 1, 0] = -(P12 * Q + P1 * Q2 + P2 * Q1) / 16
    return val, g, H


def regularized_potential(x, mu: float, h: float):
    """``V + (1 - 2 mu) Vhat`` with gradient and Hessian."""
    (w1, dw1, ddw1), (w2, dw2, ddw2) = copenhagen_split(x, h)
    val = w1 + w2
    g = np.stack([dw1, dw2], axis=-1)
    H = np.zeros(np.shape(val) + (2, 2))
    H[..., 0, 0] = ddw1
    H[..., 1, 1] = ddw2
    if mu != 0.5:
        vh, gh, Hh = mass_asymmetry_potential(x, mu)
        val = val + (1 - 2 * mu) * vh
        g = g + (1 - 2 * mu) * gh
        H = H + (1 - 2 * mu) * Hh
    return val, g, H


def hat_hamiltonian(params: RegularizedHamiltonianParams, rs, derivatives: bool = False):
    """``Hhat = |y + F(x)|^2/2 + V(x) + (1 - 2 mu) Vhat(x)``; optionally with gradient and Hessian."""
    w = rs.as_array() if isinstance(rs, RegularizedState) else np.asarray(rs, float)
    y, x = w[..., :2], w[..., 2:]
    F, dF, d2F = magnetic_potential(x)
    u = y + F
    v, dv, d2v = regularized_potential(x, params.mu, params.h)
    val = 0.5 * np.sum(u * u, axis=-1) + v
    if not derivatives:
        return val
    grad = np.concatenate([u, np.einsum("...i,...ij->...j", u, dF) + dv], axis=-1)
    hess = np.zeros(w.shape[:-1] + (4, 4))
    hess[..., :2, :2] = np.eye(2)
    hess[..., :2, 2:] = dF
    hess[..., 2:, :2] = np.swapaxes(dF, -1, -2)
    hess[..., 2:, 2:] = (np.einsum("...ki,...kj->...ij", dF, dF) + np.einsum("...k,...kij->...ij", u, d2F) + d2v)
    return val, grad, hess


def hat_hamiltonian_product(params: RegularizedHamiltonianParams, rs):
    """Defining product form ``(cosh^2 x1 - cos^2 x2)(Hbar(p, q) - h)/4`` (singular on collisions)."""
    w = rs.as_array() if isinstance(rs, RegularizedState) else np.asarray(rs, float)
    z = from_regularized(w)
    return flow_correspondence_factor(w[..., 2:]) * (centered_hamiltonian(params.mu, z) - params.h)


def regularized_system(params: RegularizedHamiltonianParams) -> HamiltonianSystem:
    return HamiltonianSystem(
        energy=lambda w: float(hat_hamiltonian(params, w)),
        gradient=lambda w: hat_hamiltonian(params, w, True)[1],
        hessian=lambda w: hat_hamiltonian(params, w, True)[2],
    )


@dataclass
class RegularizedTrajectory:
    sigma: np.ndarray
    w: np.ndarray
    t: np.ndarray
    sol: object


def integrate_with_time(params: RegularizedHamiltonianParams, w0, sigma_span, events=(), rtol=1e-12,
                        atol=1e-13, dense=True) -> RegularizedTrajectory:
    """Integrate the regularized flow in fictitious time together with physical time ``t``."""
    w0 = np.asarray(w0, float)

    def rhs(_s, u):
        _, g, _ = hat_hamiltonian(params, u[:4], True)
        return np.concatenate([cd.J4 @ g, [flow_correspondence_factor(u[2:4])]])

    ev = []
    for e in events:
        def f(s, u, _e=e):
            return _e.func(s, u)

        f.terminal = e.terminal
        f.direction = e.direction
        ev.append(f)
    sol = solve_ivp(rhs, sigma_span, np.concatenate([w0, [0.0]]), method="DOP853", rtol=rtol, atol=atol,
                    dense_output=dense, events=ev or None)
    out = RegularizedTrajectory(sigma=sol.t, w=sol.y[:4].T, t=sol.y[4], sol=sol.sol)
    out.t_events = sol.t_events
    out.y_events = sol.y_events
    return out


def sigma_for_time(params: RegularizedHamiltonianParams, w0, T: float, rtol=1e-12, atol=1e-13):
    """Regularized trajectory run until physical time ``T`` is reached."""

    class _Stop:
        direction = 1 if T > 0 else -1
        terminal = True

        @staticmethod
        def func(_s, u):
            return u[4] - T

    span = [0.0, 1e3 * np.sign(T)]
    return integrate_with_time(params, w0, span, events=[_Stop], rtol=rtol, atol=atol)


@dataclass
class CorrespondenceCheck:
    deviation: float
    times: np.ndarray
    regularized: np.ndarray
    direct: np.ndarray
    hat_energy: float
    min_distance: float  # closest approach of the direct path to a primary


def trajectory_correspondence(mu: float, z0, T: float = 1.0, n: int = 101) -> CorrespondenceCheck:
    """Compare the regularized flow, mapped back and time-rescaled, with the direct flow.

    ``z0`` is a standard-frame phase point; the level is ``h = H(z0)`` so the
    regularized start lies on ``Hhat = 0``.  Both flows are sampled at ``n``
    physical times in ``[0, T]`` and the sup-norm phase-space deviation is returned.
    """
    from .flow import integrate, rotating_system

    z0 = np.asarray(z0, float)
    h = float(cd.hamiltonian(mu, z0))
    params = RegularizedHamiltonianParams(mu, h)
    w0 = standard_to_regularized(mu, z0)
    reg = sigma_for_time(params, w0, T)
    s_end = reg.t_events[0][0] if len(reg.t_events[0]) else reg.sigma[-1]
    # invert t(sigma) on a fine grid, then polish with the dense output
    ss = np.linspace(0.0, s_end, 20 * n)
    tt = reg.sol(ss)[4]
    ts = np.linspace(0.0, T, n)
    s_at = np.interp(ts, tt, ss)
    for _ in range(3):
        u = reg.sol(s_at)
        s_at = s_at - (u[4] - ts) / flow_correspondence_factor(u[2:4].T)
    w = reg.sol(s_at)[:4].T
    mapped = regularized_to_standard(mu, w)
    direct = integrate(rotating_system(mu), z0, [0.0, T], t_eval=ts).states
    return CorrespondenceCheck(
        deviation=float(np.max(np.abs(mapped - direct))), times=ts, regularized=mapped, direct=direct,
        hat_energy=float(hat_hamiltonian(params, w0)),
        min_distance=float(min(np.hypot(direct[:, 2] + mu, direct[:, 3]).min(),
                               np.hypot(direct[:, 2] - 1 + mu, direct[:, 3]).min())),
    )
