"""Liouville vector fields near the first Lagrange point and their interpolation.

Three radial fields matter.  ``Y_e`` and ``Y_m`` are radial in ``q`` about
the earth and the moon; ``Y_2 = x/2`` is radial in the linear coordinates
``x`` of the saddle-center (``z = l1 + eps^(1/2) V x``).  Near the neck they
differ by Hamiltonian fields, ``Y_2 - Y_e = X_G``, and the interpolated field

    Y_eps = Y_2 - X_{beta(x3) G}

switches from ``Y_e`` (``x3 <= -check_c``) to ``Y_2`` (``|x3| <= hat_c``) and
on to ``Y_m``.  Transversality ``dH . Y > 0`` is checked on points sampled
exactly on the energy surface.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .core_dynamics import J4, DomainError, L1_value, effective_potential, hamiltonian_gradient, vector_field
from .saddle_center import SaddleCenterData, saddle_center_data, y2_field

__all__ = [
    "InterpolationData",
    "Cutoff",
    "y_e_transversality",
    "earth_field",
    "moon_field",
    "angular_maximum",
    "f1_margin",
    "f1_leading_coefficient",
    "interpolation_data",
    "x_field_side",
    "beta_condition_slack",
    "YEpsReport",
    "y_eps_field",
    "liouville_defect",
    "surface_samples",
    "neck_mask",
    "verify_y_eps",
]


# ---------------------------------------------------------------------------
# the radial fields in phase space

def earth_field(mu: float, z) -> np.ndarray:
    """``Y_e = (q1 + mu) d/dq1 + q2 d/dq2`` in the ordering ``(p1, p2, q1, q2)``."""
    z = np.asarray(z, float)
    out = np.zeros_like(z)
    out[..., 2] = z[..., 2] + mu
    out[..., 3] = z[..., 3]
    return out


def moon_field(mu: float, z) -> np.ndarray:
    """``Y_m = (q1 - 1 + mu) d/dq1 + q2 d/dq2``."""
    z = np.asarray(z, float)
    out = np.zeros_like(z)
    out[..., 2] = z[..., 2] - 1.0 + mu
    out[..., 3] = z[..., 3]
    return out


def _polar_state(mu, rho, theta, E, phi):
    """Phase point at earth-polar position ``(rho, theta)`` with velocity angle ``phi`` on ``H = E``."""
    q = np.stack([-mu + rho * np.cos(theta), rho * np.sin(theta)], axis=-1)
    U, dU, _ = effective_potential(mu, q)
    w = 2.0 * (E - U)
    if np.any(w < -1e-12):
        raise DomainError("sample outside the Hill region")
    rq = np.sqrt(np.clip(w, 0.0, None))
    qd = np.stack([rq * np.cos(phi), rq * np.sin(phi)], axis=-1)
    p = np.stack([qd[..., 0] + q[..., 1], qd[..., 1] - q[..., 0]], axis=-1)
    return np.concatenate([p, q], axis=-1), U, dU, rq


def y_e_transversality(mu: float, E: float, n: int = 10000, seed: int = 0, rho_min: float = 1e-3) -> dict:
    """``dH . Y_e`` at random points of the earth component of ``H = E``.

    Positions are drawn in earth-polar coordinates inside the disk of radius
    ``1 - r1`` and kept when ``U <= E``; velocity directions are uniform.
    Returns the margins from the gradient contraction and from the polar
    closed form ``rho (dU/drho - |qdot| sin(theta - theta_qdot))``.
    """
    from .core_dynamics import lagrange_r1

    rng = np.random.default_rng(seed)
    R = 1.0 - lagrange_r1(mu)
    rho_l, th_l, phi_l = [], [], []
    while sum(map(len, rho_l)) < n:
        rho = R * np.sqrt(rng.uniform((rho_min / R) ** 2, 1.0, 4 * n))
        th = rng.uniform(-np.pi, np.pi, 4 * n)
        q = np.stack([-mu + rho * np.cos(th), rho * np.sin(th)], axis=-1)
        keep = effective_potential(mu, q)[0] <= E
        rho_l.append(rho[keep])
        th_l.append(th[keep])
        phi_l.append(rng.uniform(-np.pi, np.pi, keep.sum()))
    rho = np.concatenate(rho_l)[:n]
    th = np.concatenate(th_l)[:n]
    phi = np.concatenate(phi_l)[:n]
    z, U, dU, rq = _polar_state(mu, rho, th, E, phi)
    direct = np.sum(hamiltonian_gradient(mu, z) * earth_field(mu, z), axis=-1)
    drho = dU[..., 0] * np.cos(th) + dU[..., 1] * np.sin(th)
    polar = rho * (drho - rq * np.sin(th - phi))
    return {"min_margin": float(direct.min()), "margin": direct, "polar": polar,
            "worst": z[int(np.argmin(direct))], "n": int(len(rho))}


def angular_maximum(mu: float, rho: float, n: int = 20001) -> tuple[float, float]:
    """``(theta_max, arccos(rho/2))``: sampled argmax of ``U`` on the earth circle of radius ``rho``."""
    th = np.linspace(0.0, np.pi, n)
    q = np.stack([-mu + rho * np.cos(th), rho * np.sin(th)], axis=-1)
    U = effective_potential(mu, q, check=False)[0]
    return float(th[int(np.argmax(U))]), float(np.arccos(rho / 2.0))


def f1_margin(mu: float, eps: float, rho):
    """``F1 = (dU/drho)^2 - 2 (L1 + eps - U)`` on the segment from the earth towards ``l1``."""
    rho = np.asarray(rho, float)
    q = np.stack([-mu + rho, np.zeros_like(rho)], axis=-1)
    U, dU, _ = effective_potential(mu, q)
    return dU[..., 0] ** 2 - 2.0 * (L1_value(mu) + eps - U)


def f1_leading_coefficient(r1: float) -> float:
    """Coefficient ``c`` in ``F1(1 - r1 - eps^(1/2)) = c eps + O(eps^(3/2))``."""
    f = (5 * (7 - 8 * r1 + 6 * r1 ** 2) + r1 * (2 + 5 * r1 ** 3 + 3 * r1 ** 6)
         + r1 ** 2 * (14 + 6 * r1 ** 2 + 4 * r1 ** 3 + r1 ** 5) * (1 - r1))
    return 2 * f / ((1 - r1) ** 2 + r1 ** 3 * (2 - r1)) ** 2


# ---------------------------------------------------------------------------
# interpolation data

def _smoothstep(u):
    u = np.clip(u, 0.0, 1.0)
    return u ** 3 * (10 - 15 * u + 6 * u ** 2)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(40)


@dataclass(frozen=True)
class Cutoff:
    """Even cutoff ``beta(x3)``: 1 for ``|x3| >= outer``, 0 for ``|x3| <= hat_c``.

    ``branch`` is the closed-form decreasing piece on ``[-check_c, -hat_c]``
    (it extends analytically past both ends).  The smoothed cutoff has
    derivative ``sigma(x3) * branch'(x3)`` where ``sigma`` is a quintic
    smoothstep rising on ``[-check_c - w_out, -check_c]``, equal to 1 on
    ``[-check_c, -hat_c - w]`` and falling to 0 on ``[-hat_c - w, -hat_c]``.
    ``w_out`` is chosen so the total drop is exactly 1.
    """

    P_base: float
    exponent: float
    lam1: float
    hat_c: float
    check_c: float
    w: float
    w_out: float

    def _P(self, x3):
        return (self.P_base * (4.0 + self.lam1 * np.asarray(x3, float) ** 2)) ** self.exponent

    def branch(self, x3):
        return self._P(x3) - self._P(self.hat_c)

    def branch_derivative(self, x3):
        x3 = np.asarray(x3, float)
        return self.exponent * self._P(x3) * 2 * self.lam1 * x3 / (4.0 + self.lam1 * x3 ** 2)

    def _sigma(self, x3):
        x3 = np.asarray(x3, float)
        up = _smoothstep((x3 + self.check_c + self.w_out) / self.w_out)
        down = _smoothstep((-self.hat_c - x3) / self.w)
        return up * down

    @property
    def outer(self) -> float:
        return self.check_c + self.w_out

    def _integral(self, lo, hi):
        """``int_lo^hi sigma * |branch'|`` split at the smoothing breakpoints."""
        lo = np.asarray(lo, float)
        hi = np.asarray(hi, float)
        lo, hi = np.broadcast_arrays(lo, hi)
        total = np.zeros(lo.shape)
        cuts = [-self.outer, -self.check_c, -self.hat_c - self.w, -self.hat_c]
        for a, b in zip(cuts[:-1], cuts[1:]):
            aa = np.clip(lo, a, b)
            bb = np.clip(hi, a, b)
            t = 0.5 * (bb - aa)[..., None] * (_GL_X + 1) + aa[..., None]
            g = self._sigma(t) * np.abs(self.branch_derivative(t))
            total += 0.5 * (bb - aa) * (g @ _GL_W)
        return total

    def __call__(self, x3):
        y = -np.abs(np.asarray(x3, float))
        return np.clip(1.0 - self._integral(np.full_like(y, -self.outer), y), 0.0, 1.0)

    def derivative(self, x3):
        x3 = np.asarray(x3, float)
        y = -np.abs(x3)
        d = self._sigma(y) * self.branch_derivative(y)
        return np.where(x3 < 0, d, -d)


@dataclass
class InterpolationData:
    """Constants of the neck interpolation at one ``(mu, eps)`` (``b = 1/2``)."""

    scd: SaddleCenterData
    eps: float
    d: tuple
    Q0: np.ndarray
    QG: np.ndarray
    vhat1: float
    vhat2: float
    hat_c: float
    check_c: float
    check_c_closed_form: float
    alpha1: float
    N: float
    delta: float
    beta: Cutoff
    moon_scale: float
    b: float = 0.5
    extras: dict = field(default_factory=dict)

    @property
    def d1(self):
        return self.d[0]

    @property
    def d5(self):
        return self.d[4]

    @property
    def d6(self):
        return self.d[5]

    def linear_term(self, side: int) -> np.ndarray:
        """``eps^(1/2) (0, d5, d6, 0)`` scaled for the earth (``side=-1``) or the moon (``side=+1``)."""
        base = np.array([0.0, self.d[4], self.d[5], 0.0]) / np.sqrt(self.eps)
        return base if side < 0 else base * self.moon_scale


def interpolation_data(mu: float = 0.5, eps: float = 1e-3, smoothing: float = 0.05) -> InterpolationData:
    """Assemble ``d1..d6``, ``Q0``, ``Q_G``, ``vhat1``, ``vhat2``, ``hat_c``, ``check_c``, ``N`` and ``beta``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    s = saddle_center_data(mu)
    a, C0, C1, C2, l1, l2, r1 = s.a, s.C0, s.C1, s.C2, s.lambda1, s.lambda2, s.r1
    d1 = 1 + (C1 ** 2 - 2) / C0 ** 2
    d2 = (C2 ** 2 - 2) / C0 ** 2
    d3 = (C2 ** 2 - 2) * C1 * np.sqrt(l2) / (C0 ** 2 * C2 * np.sqrt(l1))
    d4 = (2 - C1 ** 2) * C2 * np.sqrt(l1) / (C0 ** 2 * C1 * np.sqrt(l2))
    d5 = -(2 * (a - 1) + C1 ** 2) * (1 - r1) / (C0 * C2 * np.sqrt(l2))
    d6 = (2 * (a - 1) + C2 ** 2) * (1 - r1) / (C0 * C1 * np.sqrt(l1))
    Q0 = np.array([[1 - d1, 0, 0, d3], [0, 1 - d2, d3, 0], [0, d4, d1, 0], [d4, 0, 0, d2]])
    b = 0.5
    QG = np.array([[0, -d3, b - d1, 0], [-d3, 0, 0, 0.5 - d2], [b - d1, 0, 0, d4], [0, 0.5 - d2, d4, 0]])
    vhat1 = (1 - r1) * np.sqrt(l1) * (C1 + C2) * C0 / (2 * C1 * C2)
    vhat2 = d6 + abs(d5) * (1 + l1 / l2)
    hat_c = np.sqrt(3 / l1) * C1 / (C2 - C1)
    k = vhat1 / (2 * vhat2 * l1)
    P = lambda x: (vhat2 * (4 + l1 * x ** 2)) ** k  # noqa: E731
    check_c = brentq(lambda x: P(x) - P(hat_c) - 1.0, hat_c, 1e6, xtol=1e-14)
    closed = np.sqrt(((P(hat_c) + 1) ** (1 / k)) / (vhat2 * l1) - 4 / l1)
    alpha1 = float(np.max(np.abs(np.linalg.eigvals(s.Vinv))))
    w = smoothing * (check_c - hat_c)

    def drop(w_out):
        cut = Cutoff(vhat2, k, l1, hat_c, check_c, w, w_out)
        return float(cut._integral(-cut.outer, -hat_c)) - 1.0

    w_out = brentq(drop, 1e-9, 10 * (check_c - hat_c) + 10, xtol=1e-14)
    beta = Cutoff(vhat2, k, l1, hat_c, check_c, w, w_out)
    N = max(10 * alpha1, beta.outer + 1.0)
    return InterpolationData(
        scd=s, eps=eps, d=(d1, d2, d3, d4, d5, d6), Q0=Q0, QG=QG, vhat1=vhat1, vhat2=vhat2,
        hat_c=hat_c, check_c=check_c, check_c_closed_form=closed, alpha1=alpha1, N=N, delta=hat_c,
        beta=beta, moon_scale=-r1 / (1 - r1), b=b,
        extras={"exponent": k, "smoothing_window": w, "outer_window": w_out},
    )


# ---------------------------------------------------------------------------
# fields in the linear coordinates x

def _G(data: InterpolationData, x, side):
    x = np.asarray(x, float)
    c = data.linear_term(side)
    ell = J4 @ c
    quad = 0.5 * np.einsum("...i,ij,...j->...", x, data.QG, x)
    grad = x @ data.QG + ell
    return quad + x @ ell, grad


def x_field_side(data: InterpolationData, x, side: int) -> np.ndarray:
    """``Y_e`` (``side=-1``) or ``Y_m`` (``side=+1``) written in ``x``: ``Q0^T x + const``."""
    return np.asarray(x, float) @ data.Q0 + data.linear_term(side)


def y_eps_field(data: InterpolationData, x, terms: bool = False):
    """``Y_eps = Y_2 - X_{beta G}``, with ``G`` the earth or moon potential by the sign of ``x3``."""
    x = np.asarray(x, float)
    side = np.where(x[..., 2] < 0, -1, 1)
    G_e, gG_e = _G(data, x, -1)
    G_m, gG_m = _G(data, x, 1)
    G = np.where(side < 0, G_e, G_m)
    gG = np.where((side < 0)[..., None], gG_e, gG_m)
    beta = data.beta(x[..., 2])
    dbeta = data.beta.derivative(x[..., 2])
    grad = beta[..., None] * gG
    grad[..., 2] += G * dbeta
    Y = y2_field(data.b, x) - grad @ J4.T
    if terms:
        return Y, {"beta": beta, "dbeta": dbeta, "G": G, "side": side}
    return Y


def liouville_defect(field_fn, x, h: float = 1e-5) -> float:
    """Max deviation of ``d(iota_Y omega)`` from ``omega`` by central differences.

    ``omega(u, v) = u . J v``, so ``iota_Y omega`` has coefficients
    ``a = -J Y`` and the field is Liouville iff ``da_j/dx_i - da_i/dx_j = J_ij``.
    """
    x = np.asarray(x, float)
    n = x.size
    Dj = np.zeros((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        Dj[:, i] = (-(J4 @ field_fn(x + e)) + J4 @ field_fn(x - e)) / (2 * h)
    curl = Dj.T - Dj
    return float(np.max(np.abs(curl - J4)))


# ---------------------------------------------------------------------------
# sampling and verification

def surface_samples(mu: float, E: float, q_points, n_angles: int = 32) -> np.ndarray:
    """All phase points over ``q_points`` on ``H = E`` with ``n_angles`` velocity directions."""
    q = np.asarray(q_points, float)
    U = effective_potential(mu, q)[0]
    ok = U <= E
    q = q[ok]
    rq = np.sqrt(2.0 * (E - U[ok]))
    phi = 2 * np.pi * np.arange(n_angles) / n_angles
    qd = rq[:, None, None] * np.stack([np.cos(phi), np.sin(phi)], axis=-1)[None]
    qq = np.broadcast_to(q[:, None, :], qd.shape)
    p = np.stack([qd[..., 0] + qq[..., 1], qd[..., 1] - qq[..., 0]], axis=-1)
    return np.concatenate([p, qq], axis=-1).reshape(-1, 4)


def neck_mask(mu: float, eps: float, z, lhat1: float) -> np.ndarray:
    """Points with ``|q + mu| >= mu + lhat1 - eps^(1/2)`` and ``|q - 1 + mu| >= 1 - mu - lhat1 - eps^(1/2)``."""
    q = np.asarray(z, float)[..., 2:]
    se = np.sqrt(eps)
    de = np.hypot(q[..., 0] + mu, q[..., 1])
    dm = np.hypot(q[..., 0] - 1 + mu, q[..., 1])
    return (de >= mu + lhat1 - se) & (dm >= 1 - mu - lhat1 - se)


@dataclass
class YEpsReport:
    eps: float
    N: float
    min_margin: float
    worst_point: np.ndarray
    termwise: dict
    neck_min: float
    full_min: float
    n_neck: int
    n_full: int
    max_neck_distance: float
    max_neck_x3: float
    beta_slack_min: float
    beta_slack_worst_x3: float
    identity_residual: float

    def to_dict(self) -> dict:
        return {
            "eps": self.eps, "N": self.N, "min_margin": self.min_margin,
            "worst_point": [float(v) for v in self.worst_point],
            "termwise": {k: float(v) for k, v in self.termwise.items()},
            "neck_min": self.neck_min, "full_min": self.full_min,
            "n_neck": self.n_neck, "n_full": self.n_full,
            "neck_max_distance_over_sqrt_eps": self.max_neck_distance,
            "neck_max_abs_x3": self.max_neck_x3,
            "beta_slack_min": self.beta_slack_min, "beta_slack_worst_x3": self.beta_slack_worst_x3,
            "decomposition_residual": self.identity_residual,
        }


def beta_condition_slack(data: InterpolationData, x3):
    """Right side minus left side of the sufficient condition on ``|beta'|`` over ``[-N, -hat_c]``."""
    x3 = np.asarray(x3, float)
    b = data.beta(x3)
    den = data.vhat2 * (4 + data.scd.lambda1 * x3 ** 2)
    rhs = -data.vhat1 * x3 * b / den + (1 - b) * np.sqrt(data.eps) / (2 * den)
    return rhs - np.abs(data.beta.derivative(x3))


def verify_y_eps(mu: float = 0.5, eps: float = 1e-3, n_grid: int = 340, n_angles: int = 32,
                 n_full: int = 200, data: InterpolationData | None = None) -> YEpsReport:
    """Sample ``H = L1 + eps`` and evaluate ``dH . Y_eps`` in the neck and on the whole component.

    The neck grid covers a ``12 eps^(1/2)`` square around ``l1`` with
    ``n_grid^2`` positions; the full grid covers the Hill region of both
    primaries with ``n_full^2`` positions.  Near ``l1`` (``|x3| < N``) the
    field is ``Y_eps``; elsewhere it is ``Y_e`` left of ``l1`` and ``Y_m`` right
    of it, which is what ``Y_eps`` reduces to once ``beta = 1``.
    """
    data = data or interpolation_data(mu, eps)
    s = data.scd
    E = s.L1 + eps
    lhat1 = float(s.l1[2])
    se = np.sqrt(eps)

    g = np.linspace(-6 * se, 6 * se, n_grid)
    Q = np.stack(np.meshgrid(lhat1 + g, g, indexing="ij"), axis=-1).reshape(-1, 2)
    zn = surface_samples(mu, E, Q, n_angles)
    zn = zn[neck_mask(mu, eps, zn, lhat1)]

    X = np.linspace(-1.0 - mu + 1e-3, 1.0 - mu + 0.5, n_full)
    Yq = np.linspace(-1.0, 1.0, n_full)
    Qf = np.stack(np.meshgrid(X, Yq, indexing="ij"), axis=-1).reshape(-1, 2)
    far = (np.hypot(Qf[:, 0] + mu, Qf[:, 1]) > 1e-3) & (np.hypot(Qf[:, 0] - 1 + mu, Qf[:, 1]) > 1e-3)
    Qf = Qf[far]
    inside = (np.hypot(Qf[:, 0] + mu, Qf[:, 1]) < 1 - s.r1 + 3 * se) | (np.hypot(Qf[:, 0] - 1 + mu, Qf[:, 1]) < s.r1 + 3 * se)
    zf = surface_samples(mu, E, Qf[inside], n_angles // 4 or 1)

    def margins(z):
        x = (z - s.l1) @ s.Vinv.T / se
        dH = hamiltonian_gradient(mu, z)
        local = (np.abs(x[:, 2]) < data.N) & (np.linalg.norm(z - s.l1, axis=1) < 20 * se)
        Yx, t = y_eps_field(data, x, terms=True)
        Yz = se * Yx @ s.V.T
        out = np.sum(dH * Yz, axis=1)
        glob = np.where(z[:, 2] < lhat1, np.sum(dH * earth_field(mu, z), axis=1), np.sum(dH * moon_field(mu, z), axis=1))
        out = np.where(local, out, glob)
        return out, x, dH, t, local

    mn, xn, dHn, tn, _ = margins(zn)
    mf, _, _, _, _ = margins(zf)

    # termwise split in the neck
    side = tn["side"]
    Ye = np.where((side < 0)[:, None], x_field_side(data, xn, -1), x_field_side(data, xn, 1))
    dHY_e = np.sum(dHn * (se * Ye @ s.V.T), axis=1)
    dHY_2 = np.sum(dHn * (se * y2_field(data.b, xn) @ s.V.T), axis=1)
    x3dot = (vector_field(mu, zn) @ s.Vinv.T)[:, 2] / se
    t_e = tn["beta"] * dHY_e
    t_2 = (1 - tn["beta"]) * dHY_2
    # the x-chart is symplectic up to the factor eps, hence the eps here
    t_g = eps * tn["G"] * tn["dbeta"] * x3dot
    resid = float(np.max(np.abs(t_e + t_2 + t_g - mn)) / max(1e-300, np.max(np.abs(mn))))
    j = int(np.argmin(mn))

    x3s = np.linspace(-data.N, -data.hat_c, 20001)
    slack = beta_condition_slack(data, x3s)
    k = int(np.argmin(slack))
    dist = np.linalg.norm(zn - s.l1, axis=1) / se
    allm = np.concatenate([mn, mf])
    return YEpsReport(
        eps=eps, N=data.N, min_margin=float(allm.min()),
        worst_point=(zn[j] if mn[j] <= mf.min() else zf[int(np.argmin(mf))]),
        termwise={"beta_dH_Ye": t_e[j], "one_minus_beta_dH_Y2": t_2[j], "G_dbeta_XH": t_g[j], "total": mn[j]},
        neck_min=float(mn.min()), full_min=float(mf.min()), n_neck=len(zn), n_full=len(zf),
        max_neck_distance=float(dist.max()), max_neck_x3=float(np.max(np.abs(xn[:, 2]))),
        beta_slack_min=float(slack[k]), beta_slack_worst_x3=float(x3s[k]), identity_residual=resid,
    )
