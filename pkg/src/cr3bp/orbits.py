"""Periodic orbits: Birkhoff shooting for retrograde orbits and the Lyapunov orbit near L1.

Shooting works in the frame with the earth at ``0`` and the moon at ``1``.
Trajectories leave the ``q1``-axis perpendicularly; an orbit through
``(q1_0 < 0, 0)`` heading down meets the ``q2 < 0`` half of the ``q2``-axis at
``(arg dq/dt, q2)``, and so does the backward orbit through ``(q1_0 > 0, 0)``
heading up.  A common image point glues the two arcs into a half orbit
whose mirror image in the ``q1``-axis closes it up.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq

from . import core_dynamics as cd
from . import regularization as rg
from .flow import EventSpec, IntegrationError, integrate, monodromy, rotating_system
from .saddle_center import linear_lyapunov, saddle_center_data

REGULARIZED_RADIUS = 0.05


class ShootingError(RuntimeError):
    """A shooting trajectory violated one of the monotonicity conditions.

    ``case`` is one of ``"collision"`` (the arc ends at the primary),
    ``"axis_return"`` (it comes back to the ``q1``-axis first),
    ``"turning"`` (``dq1/dt`` vanishes before the crossing),
    ``"tangent"`` (``dq1/dt = 0`` at the crossing) or ``"no_crossing"``.
    """

    def __init__(self, case: str, msg: str = ""):
        super().__init__(f"{case}: {msg}" if msg else case)
        self.case = case


@dataclass
class ShootingPoint:
    q1_0: float
    theta: float
    q2: float
    time: float
    state: np.ndarray  # standard-frame phase point at the q2-axis crossing


@dataclass
class ShootingCurve:
    branch: str
    q1_0: np.ndarray
    theta: np.ndarray
    q2: np.ndarray
    failures: dict = field(default_factory=dict)

    def points(self) -> np.ndarray:
        return np.column_stack([self.theta, self.q2])

    def self_intersections(self) -> int:
        pts = self.points()
        n = len(pts) - 1
        count = 0
        for i in range(n):
            for j in range(i + 2, n):
                if _segment_cross(pts[i], pts[i + 1], pts[j], pts[j + 1]) is not None:
                    count += 1
        return count


@dataclass
class PeriodicOrbit:
    initial_state: np.ndarray
    period: float
    energy: float
    mu: float
    orbit_class: str = "generic"
    monodromy: np.ndarray | None = None
    index: int | None = None
    closure_residual: float = np.nan
    correction_residual: float = np.nan
    action: float = np.nan
    energy_drift: float = np.nan
    meta: dict = field(default_factory=dict)

    def trajectory(self, n: int = 2001, cover: int = 1):
        t = np.linspace(0.0, cover * self.period, n)
        return integrate(rotating_system(self.mu), self.initial_state, [0.0, cover * self.period], t_eval=t)


# ---------------------------------------------------------------------------
# helpers

def _segment_cross(a, b, c, d):
    """Parameters ``(s, u)`` of a proper crossing of segments ``ab`` and ``cd``, else ``None``."""
    r, s = b - a, d - c
    den = r[0] * s[1] - r[1] * s[0]
    if den == 0.0:
        return None
    w = c - a
    t = (w[0] * s[1] - w[1] * s[0]) / den
    u = (w[0] * r[1] - w[1] * r[0]) / den
    if 0.0 <= t <= 1.0 and 0.0 <= u <= 1.0:
        return t, u
    return None


def _shifted_state_from_axis(mu: float, E: float, q1_0: float, up: bool) -> np.ndarray:
    """Standard-frame state on the ``q1``-axis (shifted coordinate ``q1_0``) moving vertically."""
    q = np.array([q1_0 - mu, 0.0])
    u, _, _ = cd.effective_potential(mu, q)
    k = 2.0 * (E - float(u))
    if k <= 0:
        raise ShootingError("forbidden", f"q1_0={q1_0} is outside the Hill region")
    v = np.sqrt(k)
    return cd.state_from_velocity(q, np.array([0.0, v if up else -v]))


def hill_boundary_left(mu: float, E: float) -> float:
    """Leftmost point ``qbar1 < 0`` of the earth's Hill component on the axis (shifted frame)."""
    f = lambda x: float(cd.shifted_potential(mu, [x, 0.0])[0]) - E  # noqa: E731
    lo = -1e-12
    step = 1e-3
    while f(lo - step) < 0:
        lo -= step
        step *= 1.5
        if lo < -3:
            raise ShootingError("forbidden", "energy too high: Hill region unbounded")
    return brentq(f, lo - step, lo, xtol=1e-15)


def hill_height(mu: float, E: float) -> float:
    """``qbar2``: largest ``q2`` on the ``q2``-axis through the earth with ``U = E``."""
    f = lambda y: float(cd.shifted_potential(mu, [0.0, y])[0]) - E  # noqa: E731
    hi = 1e-6
    while f(hi) < 0:
        hi *= 1.5
        if hi > 3:
            raise ShootingError("forbidden", "energy too high")
    return brentq(f, 1e-9, hi, xtol=1e-15)


def _arc_events(mu: float, to_std, backward: bool):
    """Event functions on the raw integration variable; ``to_std`` maps it to a standard-frame state."""
    sgn = -1 if backward else 1

    def q1(_t, u):
        return to_std(u)[2] + mu

    def q2(_t, u):
        return to_std(u)[3]

    def q1dot(_t, u):
        return float(cd.velocity(to_std(u))[0])

    # directions refer to the order in which the integrator visits the arc
    return [
        EventSpec(q1, direction=sgn, terminal=True),
        EventSpec(q2, direction=1, terminal=True),
        EventSpec(q1dot, direction=-1, terminal=True),
    ]


def _shoot(mu: float, E: float, q1_0: float, backward: bool, chart: str, t_max: float):
    z0 = _shifted_state_from_axis(mu, E, q1_0, up=backward)
    use_reg = chart == "regularized" or (chart == "auto" and abs(q1_0) < REGULARIZED_RADIUS)
    sgn = -1.0 if backward else 1.0
    if use_reg:
        params = rg.RegularizedHamiltonianParams(mu, E)
        w0 = rg.standard_to_regularized(mu, z0)
        to_std = lambda u: rg.regularized_to_standard(mu, u[:4])  # noqa: E731
        evs = _arc_events(mu, to_std, backward)
        evs.append(EventSpec(lambda _s, u: abs(u[4]) - t_max, direction=1, terminal=True))
        # physical time is monotone in sigma, so the sign of sigma fixes the time direction
        tr = rg.integrate_with_time(params, w0, [0.0, sgn * 1e4], events=evs, dense=False)
        times, states = tr.t_events, tr.y_events
        t_of = lambda y: y[4]  # noqa: E731
        std = lambda y: to_std(y)  # noqa: E731
    else:
        evs = _arc_events(mu, lambda u: u, backward)
        try:
            tr = integrate(rotating_system(mu), z0, [0.0, sgn * t_max], events=evs)
        except IntegrationError as err:
            raise ShootingError("collision", str(err)) from err
        times, states = tr.event_times, tr.event_states
        t_of = None
        std = lambda y: y  # noqa: E731

    hits = []
    for k in range(3):
        for j in range(len(times[k])):
            y = states[k][j]
            t = t_of(y) if t_of else times[k][j]
            if abs(t) < 1e-9:
                continue
            hits.append((abs(t), k, std(y)))
    if not hits:
        raise ShootingError("no_crossing", f"no q2-axis crossing within |t| < {t_max}")
    hits.sort(key=lambda h: h[0])
    t, kind, z = hits[0]
    if kind == 1:
        raise ShootingError("axis_return", f"returned to the q1-axis at t={sgn * t}")
    if kind == 2:
        raise ShootingError("turning", f"dq1/dt vanished at t={sgn * t}")
    v = cd.velocity(z)
    if z[3] >= 0:
        raise ShootingError("collision", "crossing not below the primary")
    if v[0] <= 1e-12:
        raise ShootingError("tangent", "crossing with vanishing dq1/dt")
    return ShootingPoint(q1_0=q1_0, theta=float(np.arctan2(v[1], v[0])), q2=float(z[3]), time=sgn * t, state=z)


def shoot_gamma1(mu: float, E: float, q1_0: float, chart: str = "auto", t_max: float = 20.0) -> ShootingPoint:
    """Forward arc from ``(q1_0, 0)``, ``q1_0 < 0``, leaving downwards; image on the ``q2``-axis."""
    if not q1_0 < 0:
        raise ValueError("Gamma_1 starts on the negative q1-axis")
    return _shoot(mu, E, q1_0, backward=False, chart=chart, t_max=t_max)


def shoot_gamma2(mu: float, E: float, q1_0: float, chart: str = "auto", t_max: float = 20.0) -> ShootingPoint:
    """Backward arc from ``(q1_0, 0)``, ``q1_0 > 0``, whose forward velocity points up."""
    if not q1_0 > 0:
        raise ValueError("Gamma_2 starts on the positive q1-axis")
    return _shoot(mu, E, q1_0, backward=True, chart=chart, t_max=t_max)


def _sample(shooter, grid, branch):
    ok, bad = [], {}
    for x in grid:
        try:
            ok.append(shooter(x))
        except ShootingError as err:
            bad[float(x)] = err.case
    return ShootingCurve(
        branch=branch,
        q1_0=np.array([p.q1_0 for p in ok]),
        theta=np.array([p.theta for p in ok]),
        q2=np.array([p.q2 for p in ok]),
        failures=bad,
    )


def _endpoint_grid(a: float, b: float, n: int) -> np.ndarray:
    """Points of ``(a, b)`` clustered geometrically towards both ends."""
    s = 0.5 - 0.5 * np.cos(np.linspace(0.0, np.pi, n + 2)[1:-1])
    return a + (b - a) * s


def gamma_curves(mu: float, E: float, n: int = 60, chart: str = "auto"):
    """Sampled ``Gamma_1`` on ``(qbar1, 0)`` and ``Gamma_2`` on ``(0, 1 - r1)``."""
    left = hill_boundary_left(mu, E)
    right = 1.0 - cd.lagrange_r1(mu)
    g1 = _sample(lambda x: shoot_gamma1(mu, E, x, chart), _endpoint_grid(left, 0.0, n), "gamma1")
    g2 = _sample(lambda x: shoot_gamma2(mu, E, x, chart), _endpoint_grid(0.0, right, n), "gamma2")
    return g1, g2


def curve_crossings(g1: ShootingCurve, g2: ShootingCurve):
    """All proper crossings of the two polylines with interpolated source parameters."""
    out = []
    P, Q = g1.points(), g2.points()
    for i in range(len(P) - 1):
        for j in range(len(Q) - 1):
            hit = _segment_cross(P[i], P[i + 1], Q[j], Q[j + 1])
            if hit is None:
                continue
            s, u = hit
            out.append((g1.q1_0[i] + s * (g1.q1_0[i + 1] - g1.q1_0[i]),
                        g2.q1_0[j] + u * (g2.q1_0[j + 1] - g2.q1_0[j]), (i, j)))
    return out


def _mismatch(mu, E, ab, chart):
    p1 = shoot_gamma1(mu, E, ab[0], chart)
    p2 = shoot_gamma2(mu, E, ab[1], chart)
    return np.array([p1.theta - p2.theta, p1.q2 - p2.q2]), p1, p2


def refine_crossing(mu: float, E: float, a: float, b: float, bracket: float, chart: str = "auto",
                    tol: float = 1e-13, max_iter: int = 40):
    """Damped Newton on the shooting mismatch with a finite-difference Jacobian."""
    x = np.array([a, b], float)
    clamp = 0.2 * bracket
    for _ in range(max_iter):
        F, p1, p2 = _mismatch(mu, E, x, chart)
        if np.max(np.abs(F)) < tol:
            return x, F, p1, p2
        Jm = np.empty((2, 2))
        for k in range(2):
            h = 1e-7 * max(1.0, abs(x[k]))
            xp, xm = x.copy(), x.copy()
            xp[k] += h
            xm[k] -= h
            Jm[:, k] = (_mismatch(mu, E, xp, chart)[0] - _mismatch(mu, E, xm, chart)[0]) / (2 * h)
        step = -np.linalg.solve(Jm, F)
        nrm = np.max(np.abs(step))
        if nrm > clamp:
            step *= clamp / nrm
        x = x + step
    F, p1, p2 = _mismatch(mu, E, x, chart)
    if np.max(np.abs(F)) > 1e-10:
        raise ShootingError("no_crossing", f"Newton refinement stalled with mismatch {F}")
    return x, F, p1, p2


def orbit_action(mu: float, z0, period: float, n: int = 4001) -> float:
    """``int p dq`` over one period, by Simpson's rule on a dense sample."""
    t = np.linspace(0.0, period, n)
    tr = integrate(rotating_system(mu), z0, [0.0, period], t_eval=t)
    qd = cd.velocity(tr.states)
    return float(simpson(np.sum(tr.states[:, :2] * qd, axis=1), x=t))


def find_retrograde(mu: float, E: float, n: int = 60, chart: str = "auto", with_monodromy: bool = True,
                    guess=None) -> PeriodicOrbit:
    """Retrograde orbit around the earth from a crossing of ``Gamma_1`` and ``Gamma_2``.

    ``guess = (a, b)`` skips the curve sampling and starts Newton there.
    """
    if guess is None:
        g1, g2 = gamma_curves(mu, E, n, chart)
        hits = curve_crossings(g1, g2)
        if not hits:
            err = ShootingError("no_crossing", "sampled curves do not cross")
            err.curves = (g1, g2)
            raise err
        a, b, _ = hits[0]
        bracket = min(abs(a), abs(b))
    else:
        a, b = guess
        bracket = min(abs(a), abs(b))
    (a, b), F, p1, p2 = refine_crossing(mu, E, a, b, bracket, chart)
    z0 = _shifted_state_from_axis(mu, E, a, up=False)
    period = 2.0 * (p1.time - p2.time)
    sys_ = rotating_system(mu)
    tr = integrate(sys_, z0, [0.0, period], variational=with_monodromy)
    closure = float(np.linalg.norm(tr.final - z0))
    orbit = PeriodicOrbit(
        initial_state=z0, period=period, energy=E, mu=mu, orbit_class="retrograde",
        monodromy=tr.psi[-1] if with_monodromy else None, closure_residual=closure,
        correction_residual=float(np.max(np.abs(F))), energy_drift=tr.energy_drift,
        meta={"q1_left": a, "q1_right": b, "t_left": p1.time, "t_right": p2.time},
    )
    orbit.action = orbit_action(mu, z0, period)
    return orbit


def symmetry_defect(orbit: PeriodicOrbit, n: int = 101) -> float:
    """Max deviation from ``q(-t) = conj q(t)`` with the time origin on the ``q1``-axis."""
    t = np.linspace(0.0, 0.5 * orbit.period, n)
    sys_ = rotating_system(orbit.mu)
    fw = integrate(sys_, orbit.initial_state, [0.0, t[-1]], t_eval=t).states
    bw = integrate(sys_, orbit.initial_state, [0.0, -t[-1]], t_eval=-t).states
    q_f, q_b = fw[:, 2:], bw[:, 2:]
    return float(np.max(np.abs(q_b - q_f * np.array([1.0, -1.0]))))


# ---------------------------------------------------------------------------
# Lyapunov orbit

def _lyapunov_state(mu: float, E: float, q1: float, sign: float) -> np.ndarray:
    q = np.array([q1, 0.0])
    u, _, _ = cd.effective_potential(mu, q)
    k = 2.0 * (E - float(u))
    if k < 0:
        raise IntegrationError("start point outside the Hill region")
    return cd.state_from_velocity(q, np.array([0.0, sign * np.sqrt(k)]))


def _half_period(mu, E, q1, sign, t_guess, variational=False):
    z0 = _lyapunov_state(mu, E, q1, sign)
    ev = EventSpec(lambda _t, z: z[3], direction=-sign, terminal=True)
    tr = integrate(rotating_system(mu), z0, [0.0, 2.0 * t_guess], events=[ev])
    if not len(tr.event_times[0]):
        raise IntegrationError("no return to the q1-axis")
    t_half = float(tr.event_times[0][0])
    return z0, t_half, tr.event_states[0][0]


def lyapunov_orbit(mu: float, eps: float, tol: float = 1e-10, max_iter: int = 30,
                   with_monodromy: bool = True) -> PeriodicOrbit:
    """Planar Lyapunov orbit at energy ``L1 + eps``.

    The seed is the linear orbit of the level ``H2 = 1`` pushed through
    ``z = l1 + eps^(1/2) V x``.  The orbit is symmetric under reflection in
    the ``q1``-axis, so it suffices to start perpendicular to the axis and
    drive ``dq1/dt`` to zero at the next axis crossing (half period).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    scd = saddle_center_data(mu)
    E = scd.L1 + eps
    # seed: the point of the linear orbit on the q1-axis with dq2/dt > 0
    ts = np.linspace(0.0, 2 * np.pi / scd.lambda2, 2001)
    zs = scd.l1 + np.sqrt(eps) * linear_lyapunov(scd, 1.0, ts) @ scd.V.T
    qd2 = cd.velocity(zs)[:, 1]
    k = int(np.argmin(np.abs(zs[:, 3]) + 1e3 * (qd2 < 0)))
    q1 = float(zs[k, 2])
    sign = 1.0
    t_guess = np.pi / scd.lambda2

    def residual(x):
        _, th, zh = _half_period(mu, E, x, sign, t_guess)
        return float(cd.velocity(zh)[0]), th

    r, th = residual(q1)
    it = 0
    h = 1e-7 * np.sqrt(eps)
    while abs(r) > tol and it < max_iter:
        rp, _ = residual(q1 + h)
        rm, _ = residual(q1 - h)
        d = (rp - rm) / (2 * h)
        step = -r / d
        step = float(np.clip(step, -0.5 * np.sqrt(eps), 0.5 * np.sqrt(eps)))
        q1 += step
        r, th = residual(q1)
        it += 1
    if abs(r) > tol:
        raise IntegrationError(f"differential correction did not converge (residual {r:.3e}, q1 {q1})")
    z0 = _lyapunov_state(mu, E, q1, sign)
    period = 2.0 * th
    tr = integrate(rotating_system(mu), z0, [0.0, period], variational=with_monodromy)
    return PeriodicOrbit(
        initial_state=z0, period=period, energy=E, mu=mu, orbit_class="lyapunov",
        monodromy=tr.psi[-1] if with_monodromy else None,
        closure_residual=float(np.linalg.norm(tr.final - z0)), correction_residual=abs(r),
        energy_drift=tr.energy_drift, meta={"eps": eps, "iterations": it},
    )


def transverse_multipliers(orbit: PeriodicOrbit) -> np.ndarray:
    """Monodromy eigenvalues with the trivial pair ``{1, 1}`` removed."""
    ev = np.linalg.eigvals(orbit.monodromy)
    order = np.argsort(np.abs(ev - 1.0))
    return ev[order[2:]]


__all__ = [
    "PeriodicOrbit", "ShootingCurve", "ShootingError", "ShootingPoint", "curve_crossings", "find_retrograde",
    "gamma_curves", "hill_boundary_left", "hill_height", "lyapunov_orbit", "monodromy", "orbit_action",
    "refine_crossing", "shoot_gamma1", "shoot_gamma2", "symmetry_defect", "transverse_multipliers",
]
