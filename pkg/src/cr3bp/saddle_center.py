"""Closed-form linear package of the first Lagrange point.

Everything here is rational or radical in ``r1``, the distance from the moon to
the equilibrium, so ``r1`` is the primary parameter.  Linear coordinates
``x = (x1, x2, x3, x4)`` are related to the phase point by
``z = l1 + eps**0.5 * V @ x``; ``x1, x2`` play the role of momenta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .core_dynamics import J4, L1_value, MassRatio, hamiltonian, l1_state, mu_of_r1


def a_of_r1(r1):
    """Curvature parameter ``a``; the Hessian of ``U`` at the equilibrium is ``diag(-1-4a, -1+2a)``."""
    r1 = np.asarray(r1, dtype=float)
    return (2.0 - r1 + r1**2) / (1.0 - 2.0 * r1 + r1**2 + 2.0 * r1**3 - r1**4)


@dataclass(frozen=True)
class SaddleCenterData:
    r1: float
    mu: float
    a: float
    lambda1: float
    lambda2: float
    C0: float
    C1: float
    C2: float
    V: np.ndarray

    @property
    def Vinv(self) -> np.ndarray:
        # V is symplectic, so its inverse is -J V^T J.
        return -J4 @ self.V.T @ J4

    @property
    def L1(self) -> float:
        return L1_value(MassRatio(self.mu, self.r1))

    @property
    def l1(self) -> np.ndarray:
        return l1_state(MassRatio(self.mu, self.r1))


def saddle_center_data(mu=None, *, r1: float | None = None) -> SaddleCenterData:
    """Assemble ``a``, the eigenvalues, the normalising constants and the symplectic basis ``V``."""
    if r1 is None:
        mr = mu if isinstance(mu, MassRatio) else MassRatio(float(mu))
        r1 = mr.r1
        m = mr.mu
    else:
        m = float(mu_of_r1(r1))
    a = float(a_of_r1(r1))
    root = np.sqrt(a * (9.0 * a - 4.0))
    lam1 = np.sqrt(a - 1.0 + root)
    lam2 = np.sqrt(1.0 - a + root)
    C0 = np.sqrt(2.0 * root)
    C1 = np.sqrt(2.0 + 3.0 * a - root)
    C2 = np.sqrt(2.0 + 3.0 * a + root)
    s1, s2 = np.sqrt(lam1), np.sqrt(lam2)
    V = np.array(
        [
            [(C2**2 + 2 * a - 2) / (s1 * C1 * C0), 0.0, 0.0, (C1**2 + 2 * a - 2) / (s2 * C2 * C0)],
            [0.0, s2 * (C2**2 - 2) / (C2 * C0), s1 * (C1**2 - 2) / (C1 * C0), 0.0],
            [0.0, 2 * s2 / (C2 * C0), 2 * s1 / (C1 * C0), 0.0],
            [C1 / (s1 * C0), 0.0, 0.0, C2 / (s2 * C0)],
        ]
    )
    return SaddleCenterData(r1=float(r1), mu=m, a=a, lambda1=lam1, lambda2=lam2, C0=C0, C1=C1, C2=C2, V=V)


def linear_generator(scd: SaddleCenterData) -> np.ndarray:
    """``J * Hess(H2)`` in ``x`` coordinates."""
    return J4 @ np.diag([scd.lambda1, scd.lambda2, -scd.lambda1, scd.lambda2])


def h2(scd: SaddleCenterData, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return 0.5 * scd.lambda1 * (x[..., 0] ** 2 - x[..., 2] ** 2) + 0.5 * scd.lambda2 * (x[..., 1] ** 2 + x[..., 3] ** 2)


def to_phase(scd: SaddleCenterData, x, eps: float) -> np.ndarray:
    return scd.l1 + np.sqrt(eps) * np.asarray(x, float) @ scd.V.T


def from_phase(scd: SaddleCenterData, z, eps: float) -> np.ndarray:
    return (np.asarray(z, float) - scd.l1) @ scd.Vinv.T / np.sqrt(eps)


def rescaled_hamiltonian(scd: SaddleCenterData, x, eps: float) -> np.ndarray:
    """``(H(l1 + eps^(1/2) V x) - L1) / eps``, which tends to ``H2`` as ``eps -> 0``."""
    return (hamiltonian(scd.mu, to_phase(scd, x, eps)) - scd.L1) / eps


def linear_flow(scd: SaddleCenterData, x0, t) -> np.ndarray:
    """Exact solution of the decoupled linear equations starting at ``x0``."""
    x0 = np.asarray(x0, float)
    t = np.asarray(t, float)
    l1, l2 = scd.lambda1, scd.lambda2
    ch, sh = np.cosh(l1 * t), np.sinh(l1 * t)
    c, s = np.cos(l2 * t), np.sin(l2 * t)
    return np.stack(
        [
            x0[0] * ch + x0[2] * sh,
            x0[1] * c - x0[3] * s,
            x0[2] * ch + x0[0] * sh,
            x0[3] * c + x0[1] * s,
        ],
        axis=-1,
    )


def linear_lyapunov(scd: SaddleCenterData, c0: float, t) -> np.ndarray:
    if c0 <= 0:
        raise ValueError("energy of the linear level must be positive")
    amp = np.sqrt(2.0 * c0 / scd.lambda2)
    t = np.asarray(t, float)
    zero = np.zeros_like(t)
    return np.stack([zero, amp * np.cos(scd.lambda2 * t), zero, amp * np.sin(scd.lambda2 * t)], axis=-1)


def y2_field(b: float, x) -> np.ndarray:
    """Liouville field ``((1-b) x1, x2/2, b x3, x4/2)`` of the linear model."""
    x = np.asarray(x, float)
    return x * np.array([1.0 - b, 0.5, b, 0.5])


def dH2_dot_Y2(scd: SaddleCenterData, b: float, x) -> np.ndarray:
    x = np.asarray(x, float)
    l1, l2 = scd.lambda1, scd.lambda2
    return l1 * (1 - b) * x[..., 0] ** 2 - l1 * b * x[..., 2] ** 2 + 0.5 * l2 * (x[..., 1] ** 2 + x[..., 3] ** 2)


# ---------------------------------------------------------------------------
# shield profile

@dataclass
class ShieldProfile:
    c0: float
    b: float
    r0: float
    s: np.ndarray
    r: np.ndarray
    a: np.ndarray
    rate: float
    rate_expected: float
    energy: float
    energy_expected: float
    x1_backward: float
    x1_squared: np.ndarray


def shield_ode_rhs(scd: SaddleCenterData, c0: float, b: float, r):
    r = np.asarray(r, float)
    l1, l2 = scd.lambda1, scd.lambda2
    num = -2.0 * np.pi * r * (l2 * r**2 - 2 * c0) * (l1 * r**2 + 4 * (b - 1) ** 2 * (2 * c0 - l2 * r**2))
    den = (2 * c0 + (1 - 2 * b) * (2 * c0 - l2 * r**2)) ** 2
    return num / den


def shield_rate(scd: SaddleCenterData) -> float:
    """``g'(r0)``; it equals ``-4 pi lambda1 / lambda2`` for every level and exponent."""
    return -4.0 * np.pi * scd.lambda1 / scd.lambda2


def shield_profile(scd: SaddleCenterData, c0: float, b: float = 0.5, r_init: float | None = None,
                   tol: float = 1e-10) -> ShieldProfile:
    """Integrate ``r' = g(r)`` forward to ``r0`` and backward to ``0``.

    Alongside ``r`` the symplectic area ``a' = pi r^2`` and the energy density
    ``e' = d(pi r^2)/ds = 2 pi r g(r)`` are integrated; the total energy is the
    difference of ``e`` between the two ends.
    """
    r0 = np.sqrt(2.0 * c0 / scd.lambda2)
    if r_init is None:
        r_init = 0.5 * r0
    if not 0.0 < abs(r_init) < r0:
        raise ValueError("initial radius must lie in (-r0, r0) minus the origin")
    sign = np.sign(r_init)

    def rhs(_s, y):
        g = shield_ode_rhs(scd, c0, b, y[0])
        return [g, np.pi * y[0] ** 2, 2.0 * np.pi * y[0] * g]

    def near_end(_s, y):
        return abs(abs(y[0]) - r0) - tol

    near_end.terminal = True

    def near_zero(_s, y):
        return abs(y[0]) - tol

    near_zero.terminal = True
    y0 = [r_init, 0.0, np.pi * r_init**2]
    kw = dict(method="DOP853", rtol=1e-13, atol=1e-15, dense_output=True)
    fwd = solve_ivp(rhs, [0.0, 1e3], y0, events=near_end, **kw)
    bwd = solve_ivp(rhs, [0.0, -1e3], y0, events=near_zero, **kw)
    s = np.concatenate([bwd.t[::-1], fwd.t[1:]])
    y = np.concatenate([bwd.y[:, ::-1], fwd.y[:, 1:]], axis=1)

    # exponential approach: fit log|r - r0| on the tail, away from the roundoff floor
    dist = np.abs(np.abs(y[0]) - r0)
    tail = (s > 0) & (dist < 1e-3 * r0) & (dist > 1e3 * tol)
    ss = np.linspace(s[tail].min(), s[tail].max(), 200)
    rr = fwd.sol(ss)[0]
    slope = np.polyfit(ss, np.log(np.abs(np.abs(rr) - r0)), 1)[0]
    energy = fwd.y[2, -1] - bwd.y[2, -1]
    r_back = bwd.y[0, -1]
    return ShieldProfile(
        c0=c0, b=b, r0=r0, s=s, r=y[0], a=y[1], rate=slope,
        rate_expected=shield_rate(scd), energy=float(energy), energy_expected=2 * np.pi * c0 / scd.lambda2,
        x1_backward=float(np.sqrt((2 * c0 - scd.lambda2 * r_back**2) / scd.lambda1)),
        x1_squared=(2 * c0 - scd.lambda2 * y[0] ** 2) / scd.lambda1,
    )
