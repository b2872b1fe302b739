"""Rotating-frame Hamiltonian of the planar circular restricted three-body problem.

Phase points are stored as arrays ``z = (p1, p2, q1, q2)``.  With this ordering
the symplectic matrix is ``J = [[0, -I], [I, 0]]`` and Hamilton's equations
read ``dz/dt = J grad H(z)``.  The earth (mass ``1 - mu``) sits at ``q = -mu``
and the moon (mass ``mu``) at ``q = 1 - mu``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

COLLISION_RADIUS = 1e-9

J4 = np.block([[np.zeros((2, 2)), -np.eye(2)], [np.eye(2), np.zeros((2, 2))]])
J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


class DomainError(ValueError):
    """Raised when an unregularized formula is evaluated at (or too near) a collision."""


def mu_of_r1(r1):
    """Closed-form mass ratio whose first Lagrange point sits at distance ``r1`` from the moon."""
    r1 = np.asarray(r1, dtype=float)
    den = 1.0 - 2.0 * r1 + r1**2 + 2.0 * r1**3 - r1**4
    return r1**3 * (3.0 - 3.0 * r1 + r1**2) / den


def _r1_residual(r1: float, mu: float) -> float:
    return (1.0 - mu) / (1.0 - r1) ** 2 - mu / r1**2 - (1.0 - mu - r1)


def lagrange_r1(mu: float) -> float:
    """Distance from the moon to the first Lagrange point.

    Solves ``(1-mu)/(1-r1)^2 - mu/r1^2 = 1 - mu - r1`` on ``(0, 1)`` by a
    bracketed root search followed by two Newton steps on the defining equation.
    """
    mu = float(mu)
    if not 0.0 < mu < 1.0:
        raise DomainError(f"mass ratio must lie in (0, 1), got {mu}")
    r1 = brentq(lambda r: float(mu_of_r1(r)) - mu, 1e-9, 1.0 - 1e-9, xtol=1e-16, rtol=1e-15, maxiter=500)
    for _ in range(2):
        f = _r1_residual(r1, mu)
        df = 2.0 * (1.0 - mu) / (1.0 - r1) ** 3 + 2.0 * mu / r1**3 + 1.0
        step = f / df
        if abs(step) > 1e-10:
            break
        r1 -= step
    return r1


@dataclass(frozen=True)
class MassRatio:
    """Mass ratio ``mu`` with the cached Lagrange distance ``r1``."""

    mu: float
    r1: float = field(default=float("nan"))

    def __post_init__(self):
        if not 0.0 < self.mu < 1.0:
            raise DomainError(f"mass ratio must lie in (0, 1), got {self.mu}")
        if np.isnan(self.r1):
            object.__setattr__(self, "r1", lagrange_r1(self.mu))

    @classmethod
    def from_r1(cls, r1: float) -> "MassRatio":
        return cls(mu=float(mu_of_r1(r1)), r1=float(r1))


@dataclass(frozen=True)
class RotatingState:
    p: np.ndarray
    q: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.concatenate([np.asarray(self.p, float), np.asarray(self.q, float)])

    @classmethod
    def from_array(cls, z) -> "RotatingState":
        z = np.asarray(z, float)
        return cls(p=z[:2].copy(), q=z[2:].copy())


@dataclass(frozen=True)
class EnergyLevel:
    h: float


@dataclass
class LagrangeData:
    mu: float
    r1: float
    lhat1: float
    values: np.ndarray  # L1..L5
    positions: np.ndarray  # 5 x 4 phase points

    @property
    def L1(self) -> float:
        return float(self.values[0])


def _mu(mu) -> float:
    return mu.mu if isinstance(mu, MassRatio) else float(mu)


def _phase(s) -> np.ndarray:
    return s.as_array() if isinstance(s, RotatingState) else np.asarray(s, dtype=float)


def effective_potential(mu, q, check: bool = True):
    """Value, gradient and Hessian of ``U(q) = -mu/|q-(1-mu)| - (1-mu)/|q+mu| - |q|^2/2``.

    ``q`` may carry leading batch dimensions; the last axis has length 2.
    Returns ``(U, dU, d2U)`` with shapes ``(...)``, ``(..., 2)``, ``(..., 2, 2)``.
    """
    m = _mu(mu)
    q = np.asarray(q, dtype=float)
    dm = q - np.array([1.0 - m, 0.0])
    de = q - np.array([-m, 0.0])
    rm = np.linalg.norm(dm, axis=-1)
    re = np.linalg.norm(de, axis=-1)
    if check and (np.any(rm < COLLISION_RADIUS) or np.any(re < COLLISION_RADIUS)):
        raise DomainError("position at a primary")
    u = -m / rm - (1.0 - m) / re - 0.5 * np.sum(q * q, axis=-1)
    grad = (m / rm**3)[..., None] * dm + ((1.0 - m) / re**3)[..., None] * de - q
    eye = np.eye(2)
    hess = (
        (m / rm**3)[..., None, None] * (eye - 3.0 * dm[..., :, None] * dm[..., None, :] / (rm**2)[..., None, None])
        + ((1.0 - m) / re**3)[..., None, None]
        * (eye - 3.0 * de[..., :, None] * de[..., None, :] / (re**2)[..., None, None])
        - eye
    )
    return u, grad, hess


def hamiltonian(mu, s, check: bool = True):
    """``H = ((p1 - q2)^2 + (p2 + q1)^2)/2 + U(q)``; accepts batched phase arrays."""
    z = _phase(s)
    p1, p2, q1, q2 = z[..., 0], z[..., 1], z[..., 2], z[..., 3]
    u, _, _ = effective_potential(mu, z[..., 2:], check=check)
    return 0.5 * ((p1 - q2) ** 2 + (p2 + q1) ** 2) + u


def hamiltonian_gradient(mu, s, check: bool = True) -> np.ndarray:
    z = _phase(s)
    p1, p2, q1, q2 = z[..., 0], z[..., 1], z[..., 2], z[..., 3]
    _, du, _ = effective_potential(mu, z[..., 2:], check=check)
    a = p1 - q2
    b = p2 + q1
    return np.stack([a, b, b + du[..., 0], -a + du[..., 1]], axis=-1)


def hamiltonian_hessian(mu, s, check: bool = True) -> np.ndarray:
    z = _phase(s)
    _, _, d2u = effective_potential(mu, z[..., 2:], check=check)
    out = np.zeros(z.shape[:-1] + (4, 4))
    out[..., :2, :2] = np.eye(2)
    out[..., :2, 2:] = J2
    out[..., 2:, :2] = J2.T
    out[..., 2:, 2:] = np.eye(2) + d2u
    return out


def vector_field(mu, s, check: bool = True) -> np.ndarray:
    """Time derivative of the phase point, in the state ordering ``(p1, p2, q1, q2)``.

    Component-wise: ``dq1 = p1 - q2``, ``dq2 = p2 + q1``,
    ``dp1 = -U_1 - p2 - q1``, ``dp2 = -U_2 + p1 - q2``.
    """
    z = _phase(s)
    p1, p2, q1, q2 = z[..., 0], z[..., 1], z[..., 2], z[..., 3]
    _, du, _ = effective_potential(mu, z[..., 2:], check=check)
    return np.stack([-du[..., 0] - p2 - q1, -du[..., 1] + p1 - q2, p1 - q2, p2 + q1], axis=-1)


def velocity(z) -> np.ndarray:
    """Rotating-frame velocity ``dq/dt = p + i q``."""
    z = np.asarray(z, float)
    return np.stack([z[..., 0] - z[..., 3], z[..., 1] + z[..., 2]], axis=-1)


def state_from_velocity(q, qdot) -> np.ndarray:
    q = np.asarray(q, float)
    qdot = np.asarray(qdot, float)
    return np.concatenate([np.stack([qdot[..., 0] + q[..., 1], qdot[..., 1] - q[..., 0]], axis=-1), q], axis=-1)


def jacobi_energy(mu, z) -> np.ndarray:
    """``|dq/dt|^2/2 + U(q)``, which equals ``H`` and is conserved."""
    v = velocity(z)
    u, _, _ = effective_potential(mu, np.asarray(z)[..., 2:])
    return 0.5 * np.sum(v * v, axis=-1) + u


def _collinear_dU(q1: float, m: float) -> float:
    return m * (q1 - 1.0 + m) / abs(q1 - 1.0 + m) ** 3 + (1.0 - m) * (q1 + m) / abs(q1 + m) ** 3 - q1


def _rest_state(q) -> np.ndarray:
    return state_from_velocity(np.asarray(q, float), np.zeros(2))


def lagrange_values(mu) -> LagrangeData:
    """All five equilibria and their critical values, ordered so that ``L1 < L2 <= L3 < L4 = L5``."""
    m = _mu(mu)
    r1 = mu.r1 if isinstance(mu, MassRatio) else lagrange_r1(m)
    lhat1 = 1.0 - m - r1
    gap = 1e-12
    right = brentq(_collinear_dU, 1.0 - m + gap, 3.0, args=(m,), xtol=1e-15, rtol=1e-15)
    left = brentq(_collinear_dU, -3.0, -m - gap, args=(m,), xtol=1e-15, rtol=1e-15)
    outer = [np.array([right, 0.0]), np.array([left, 0.0])]
    outer_vals = [float(effective_potential(m, q)[0]) for q in outer]
    order = np.argsort(outer_vals, kind="stable")
    tri = [np.array([0.5 - m, np.sqrt(3.0) / 2.0]), np.array([0.5 - m, -np.sqrt(3.0) / 2.0])]
    qs = [np.array([lhat1, 0.0]), outer[order[0]], outer[order[1]], *tri]
    vals = np.array([float(effective_potential(m, q)[0]) for q in qs])
    pos = np.array([_rest_state(q) for q in qs])
    return LagrangeData(mu=m, r1=r1, lhat1=lhat1, values=vals, positions=pos)


def l1_state(mu) -> np.ndarray:
    m = _mu(mu)
    r1 = mu.r1 if isinstance(mu, MassRatio) else lagrange_r1(m)
    return _rest_state([1.0 - m - r1, 0.0])


def L1_value(mu) -> float:
    m = _mu(mu)
    r1 = mu.r1 if isinstance(mu, MassRatio) else lagrange_r1(m)
    return float(-m / r1 - (1.0 - m) / (1.0 - r1) - 0.5 * (1.0 - m - r1) ** 2)


def hill_region_contains(mu, h: float, q):
    """``(U(q) <= h, h - U(q))`` for (batched) positions ``q``."""
    u, _, _ = effective_potential(mu, q)
    margin = h - u
    return margin >= 0.0, margin


# Frame conversions.  Each is an exact symplectic translation that leaves H invariant.

def to_shifted_frame(mu, z) -> np.ndarray:
    """Standard frame -> frame with the earth at 0 and the moon at 1."""
    m = _mu(mu)
    z = np.array(z, dtype=float)
    z[..., 2] += m
    z[..., 1] -= m
    return z


def from_shifted_frame(mu, z) -> np.ndarray:
    m = _mu(mu)
    z = np.array(z, dtype=float)
    z[..., 2] -= m
    z[..., 1] += m
    return z


def to_centered_frame(mu, z) -> np.ndarray:
    """Standard frame -> frame with the earth at -1/2 and the moon at +1/2."""
    m = _mu(mu)
    z = np.array(z, dtype=float)
    z[..., 2] += m - 0.5
    z[..., 1] += 0.5 - m
    return z


def from_centered_frame(mu, z) -> np.ndarray:
    m = _mu(mu)
    z = np.array(z, dtype=float)
    z[..., 2] -= m - 0.5
    z[..., 1] -= 0.5 - m
    return z


def shifted_hamiltonian(mu, z) -> np.ndarray:
    """``H`` written in the frame with primaries at 0 and 1."""
    return hamiltonian(mu, from_shifted_frame(mu, z))


def shifted_potential(mu, q):
    """Potential ``U`` in the frame with primaries at 0 and 1 (``U(q - mu)`` in the standard frame)."""
    m = _mu(mu)
    q = np.array(q, dtype=float)
    q[..., 0] -= m
    return effective_potential(m, q)
