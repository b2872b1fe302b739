"""Adaptive integration of Hamiltonian flows with variational equations and events."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from . import core_dynamics as cd


class IntegrationError(RuntimeError):
    """Integration stopped early; ``partial`` holds what was computed."""

    def __init__(self, msg: str, partial: "Trajectory | None" = None):
        super().__init__(msg)
        self.partial = partial


@dataclass(frozen=True)
class HamiltonianSystem:
    """Hamiltonian ``H`` on ``R^4`` (ordering ``(p1, p2, q1, q2)``) with its derivatives."""

    energy: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    hessian: Callable[[np.ndarray], np.ndarray]

    def field(self, z: np.ndarray) -> np.ndarray:
        return cd.J4 @ self.gradient(z)

    def jacobian(self, z: np.ndarray) -> np.ndarray:
        return cd.J4 @ self.hessian(z)


def rotating_system(mu) -> HamiltonianSystem:
    m = mu.mu if isinstance(mu, cd.MassRatio) else float(mu)
    return HamiltonianSystem(
        energy=lambda z: float(cd.hamiltonian(m, z)),
        gradient=lambda z: cd.hamiltonian_gradient(m, z),
        hessian=lambda z: cd.hamiltonian_hessian(m, z),
    )


def quadratic_system(S: np.ndarray) -> HamiltonianSystem:
    """Linear system with Hamiltonian ``z.S.z/2``."""
    S = np.asarray(S, float)
    return HamiltonianSystem(
        energy=lambda z: 0.5 * float(z @ S @ z),
        gradient=lambda z: S @ z,
        hessian=lambda z: S,
    )


@dataclass
class EventSpec:
    func: Callable[[float, np.ndarray], float]
    direction: int = 0
    terminal: bool = False


@dataclass
class Trajectory:
    t: np.ndarray
    states: np.ndarray
    psi: np.ndarray | None = None
    energy_drift: float = 0.0
    event_times: list = field(default_factory=list)
    event_states: list = field(default_factory=list)
    sol: object = None

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def symplectic_defect(self) -> float:
        if self.psi is None:
            return 0.0
        J = cd.J4 if self.psi.shape[-1] == 4 else cd.J2
        return float(np.max(np.abs(np.einsum("kji,jl,klm->kim", self.psi, J, self.psi) - J)))


def integrate(system, s0, t_span, events: Sequence[EventSpec] = (), variational: bool = False,
              rtol: float = 1e-12, atol: float = 1e-13, t_eval=None, dense: bool = False,
              max_step: float = np.inf) -> Trajectory:
    """Integrate ``system`` from ``s0`` over ``t_span`` with an order-8 embedded Runge-Kutta pair.

    With ``variational=True`` the linearised flow ``dpsi/dt = J Hess(H) psi``,
    ``psi(0) = I``, is integrated jointly with the state.
    """
    z0 = np.asarray(s0.as_array() if isinstance(s0, cd.RotatingState) else s0, dtype=float)
    n = z0.size

    if variational:
        def rhs(_t, y):
            z = y[:n]
            psi = y[n:].reshape(n, n)
            return np.concatenate([system.field(z), (system.jacobian(z) @ psi).ravel()])

        y0 = np.concatenate([z0, np.eye(n).ravel()])
    else:
        def rhs(_t, y):
            return system.field(y)

        y0 = z0

    ev = []
    for e in events:
        def f(t, y, _e=e):
            return _e.func(t, y[:n])

        f.terminal = e.terminal
        f.direction = e.direction
        ev.append(f)

    def guarded(t, y):
        try:
            return rhs(t, y)
        except cd.DomainError as err:
            raise IntegrationError(f"collision reached at t={t}") from err

    sol = solve_ivp(guarded, t_span, y0, method="DOP853", rtol=rtol, atol=atol, events=ev or None,
                    t_eval=t_eval, dense_output=dense, max_step=max_step)
    states = sol.y[:n].T
    psi = sol.y[n:].T.reshape(-1, n, n) if variational else None
    e0 = system.energy(z0)
    drift = max(abs(system.energy(z) - e0) for z in states[:: max(1, len(states) // 200)]) if len(states) else 0.0
    traj = Trajectory(t=sol.t, states=states, psi=psi, energy_drift=float(drift), sol=sol.sol if dense else None)
    if ev:
        traj.event_times = [np.asarray(te) for te in sol.t_events]
        traj.event_states = [np.asarray(ye)[:, :n] if len(ye) else np.zeros((0, n)) for ye in sol.y_events]
    if sol.status == -1:
        raise IntegrationError(sol.message, traj)
    return traj


def flow_map(system, z0, T: float, variational: bool = False, **kw):
    """State (and linearised flow) after time ``T``."""
    traj = integrate(system, z0, [0.0, T], variational=variational, **kw)
    if variational:
        return traj.states[-1], traj.psi[-1]
    return traj.states[-1]


def monodromy(system, z0, period: float, closure_tol: float = 1e-8, **kw) -> np.ndarray:
    """Linearised return map over one period of a closed orbit."""
    zT, psi = flow_map(system, z0, period, variational=True, **kw)
    if np.linalg.norm(zT - np.asarray(z0)) > closure_tol:
        raise IntegrationError("orbit is not closed to the requested tolerance")
    return psi


def constant_monodromy(S: np.ndarray, period: float) -> np.ndarray:
    """``exp(T J S)`` for an equilibrium of the quadratic Hamiltonian ``z.S.z/2``."""
    J = cd.J4 if S.shape[0] == 4 else cd.J2
    return expm(period * J @ S)
