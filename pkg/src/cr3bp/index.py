"""Robbin-Salamon and Conley-Zehnder indices of symplectic paths and periodic orbits.

Conventions: ``J = [[0, -I], [I, 0]]``, ``R(theta) = exp(theta J)`` rotates
counter-clockwise, and a path ``psi`` has generator ``S = -J psi' psi^{-1}``,
so ``psi' = J S psi``.  A crossing is a time where ``det(I - psi) = 0`` and its
crossing form is ``S`` restricted to ``ker(I - psi)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
import warnings
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm
from scipy.linalg import logm as _scipy_logm
from scipy.optimize import brentq, minimize_scalar

from . import core_dynamics as cd

CROSSING_TOL = 1e-7
DEGENERATE_TOL = 1e-9


class DegenerateCrossingError(RuntimeError):
    """A crossing form is degenerate; the path must be perturbed with fixed ends."""


class NonContractibleError(RuntimeError):
    """The orbit does not close in the chart used for the global frame."""


def logm(M):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return _scipy_logm(M)


@lru_cache(maxsize=None)
def _J_cached(dim: int) -> np.ndarray:
    n = dim // 2
    J = np.block([[np.zeros((n, n)), -np.eye(n)], [np.eye(n), np.zeros((n, n))]])
    J.flags.writeable = False
    return J


def J_of(dim: int) -> np.ndarray:
    return _J_cached(int(dim))


def rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def symplectic_defect(M: np.ndarray) -> float:
    J = J_of(M.shape[0])
    return float(np.max(np.abs(M.T @ J @ M - J)))


def diamond(*blocks: np.ndarray) -> np.ndarray:
    """Symplectic direct sum keeping the ``(x_1..x_n, y_1..y_n)`` ordering."""
    ns = [b.shape[0] // 2 for b in blocks]
    n = sum(ns)
    out = np.zeros((2 * n, 2 * n))
    off = 0
    for b, k in zip(blocks, ns):
        out[off:off + k, off:off + k] = b[:k, :k]
        out[off:off + k, n + off:n + off + k] = b[:k, k:]
        out[n + off:n + off + k, off:off + k] = b[k:, :k]
        out[n + off:n + off + k, n + off:n + off + k] = b[k:, k:]
        off += k
    return out


def random_symplectic(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """``exp(J S1) exp(J S2)`` for random symmetric ``S1``, ``S2``; a spread of elliptic and hyperbolic types."""
    J = J_of(dim)
    out = np.eye(dim)
    for _ in range(2):
        A = rng.normal(scale=scale, size=(dim, dim))
        out = out @ expm(J @ (A + A.T) / 2)
    return out


# ---------------------------------------------------------------------------
# paths

@dataclass
class SymplecticPath:
    """Path ``psi: [a, b] -> Sp(2n)`` given by callables for ``psi`` and its generator ``S``."""

    a: float
    b: float
    psi_fn: Callable[[float], np.ndarray]
    S_fn: Callable[[float], np.ndarray]
    dim: int
    samples: int = 0
    breakpoints: tuple = ()
    graph_fn: Callable | None = None

    def psi(self, t):
        return self.psi_fn(float(t))

    def graph(self, t):
        """``(X, Y)`` whose columns ``[X; Y]`` span the graph of ``psi(t)``.

        The frame is orthonormal, so ``ker(I - psi) = X ker(X - Y)`` stays well
        conditioned under hyperbolic growth; long paths supply ``graph_fn`` to
        re-orthonormalise in chunks instead of multiplying out ``psi``.
        """
        if self.graph_fn is not None:
            return self.graph_fn(float(t))
        return _orth_graph(np.eye(self.dim), self.psi(t))

    def kernel_matrices(self, ts) -> np.ndarray:
        """Stacked ``X - Y`` over ``ts``; one batched QR when no ``graph_fn`` is given."""
        if self.graph_fn is not None:
            return np.array([np.subtract(*self.graph_fn(float(t))) for t in ts])
        Y = np.array([self.psi(t) for t in ts])
        X = np.broadcast_to(np.eye(self.dim), Y.shape)
        Q, R = np.linalg.qr(np.concatenate([X, Y], axis=1))
        flip = np.prod(np.sign(np.diagonal(R, axis1=1, axis2=2)), axis=1) < 0
        Q[flip, :, 0] *= -1
        return Q[:, :self.dim] - Q[:, self.dim:]

    def S(self, t):
        return self.S_fn(float(t))

    def grid(self) -> np.ndarray:
        n = self.samples or self._auto_samples()
        pts = np.linspace(self.a, self.b, n)
        extra = [p for p in self.breakpoints if self.a < p < self.b]
        return np.unique(np.concatenate([pts, extra])) if extra else pts

    def _auto_samples(self) -> int:
        coarse = np.linspace(self.a, self.b, 41)
        rate = max(np.linalg.norm(self.S(t), 2) for t in coarse)
        return int(np.clip(40 * rate * (self.b - self.a) / np.pi, 400, 400000))

    def restrict(self, a: float, b: float) -> "SymplecticPath":
        if not self.a - 1e-15 <= a < b <= self.b + 1e-15:
            raise ValueError("sub-interval outside the path domain")
        frac = (b - a) / (self.b - self.a)
        n = max(400, int((self.samples or self._auto_samples()) * frac))
        return SymplecticPath(a, b, self.psi_fn, self.S_fn, self.dim, n, self.breakpoints, self.graph_fn)

    def reparametrize(self, phi: Callable, dphi: Callable, phi_inv_a: float, phi_inv_b: float):
        """Path ``psi(phi(s))`` for increasing ``phi`` mapping ``[phi_inv_a, phi_inv_b]`` onto ``[a, b]``."""
        g = None if self.graph_fn is None else (lambda s: self.graph_fn(phi(s)))
        return SymplecticPath(
            phi_inv_a, phi_inv_b, lambda s: self.psi_fn(phi(s)), lambda s: dphi(s) * self.S_fn(phi(s)),
            self.dim, self.samples, (), g,
        )

    def generator_symmetry_defect(self, n: int = 50) -> float:
        ts = np.linspace(self.a, self.b, n)
        return float(max(np.max(np.abs(self.S(t) - self.S(t).T)) for t in ts))

    def max_symplectic_defect(self, n: int = 50) -> float:
        ts = np.linspace(self.a, self.b, n)
        return max(symplectic_defect(self.psi(t)) for t in ts)

    def sampled(self, n: int | None = None):
        ts = np.linspace(self.a, self.b, n or (self.samples or self._auto_samples()))
        return ts, np.array([self.psi(t) for t in ts])


def _orth_graph(X, Y):
    # keep the change of basis orientation-preserving so det(X - Y) keeps its sign
    Q, R = np.linalg.qr(np.vstack([X, Y]))
    n = X.shape[0]
    if np.prod(np.sign(np.diag(R))) < 0:
        Q[:, 0] *= -1
    return Q[:n], Q[n:]


def _chunk_nodes(a, b, chunk):
    m = max(1, int(np.ceil((b - a) / chunk)))
    return np.linspace(a, b, m + 1)


def _chunked_graph(nodes, psi0, step):
    """Graph frames re-orthonormalised at ``nodes``; ``step(k, t)`` is the transition from ``nodes[k]`` to ``t``."""
    frames = [_orth_graph(np.eye(psi0.shape[0]), psi0)]
    for k in range(len(nodes) - 2):
        X, Y = frames[-1]
        frames.append(_orth_graph(X, step(k, nodes[k + 1]) @ Y))

    def graph(t):
        k = int(np.clip(np.searchsorted(nodes, t, side="right") - 1, 0, len(frames) - 1))
        X, Y = frames[k]
        return X, step(k, t) @ Y

    return graph


def constant_path(S: np.ndarray, a: float, b: float, psi0: np.ndarray | None = None, samples: int = 0):
    """``psi(t) = exp((t - a) J S) psi0``."""
    S = np.asarray(S, float)
    dim = S.shape[0]
    X = J_of(dim) @ S
    psi0 = np.eye(dim) if psi0 is None else np.asarray(psi0, float)
    nodes = _chunk_nodes(a, b, 2.0 / max(1e-12, np.max(np.abs(np.linalg.eigvals(X).real))))
    graph = _chunked_graph(nodes, psi0, lambda k, t: expm((t - nodes[k]) * X))
    return SymplecticPath(a, b, lambda t: expm((t - a) * X) @ psi0, lambda t: S, dim, samples, (), graph)


def rotation_path(k: float, a: float = 0.0, b: float = 1.0) -> SymplecticPath:
    """``R(2 pi k t)`` on ``[a, b]``."""
    return constant_path(2 * np.pi * k * np.eye(2), a, b)


def hyperbolic_path(lam: float, psi0: np.ndarray, a: float, b: float) -> SymplecticPath:
    """``[[cosh, sinh], [sinh, cosh]](lam t) psi0``; generator ``diag(lam, -lam)``."""
    S = np.diag([lam, -lam])
    psi0 = np.asarray(psi0, float)

    def psi(t):
        c, s = np.cosh(lam * t), np.sinh(lam * t)
        return np.array([[c, s], [s, c]]) @ psi0

    return SymplecticPath(a, b, psi, lambda t: S, 2)


def ode_path(S_fn: Callable, a: float, b: float, psi0=None, rtol=1e-11, atol=1e-12, samples: int = 0):
    """Integrate ``psi' = J S(t) psi`` and wrap the dense solution."""
    S0 = np.asarray(S_fn(a))
    dim = S0.shape[0]
    J = J_of(dim)
    psi0 = np.eye(dim) if psi0 is None else np.asarray(psi0, float)
    sol = solve_ivp(lambda t, y: (J @ S_fn(t) @ y.reshape(dim, dim)).ravel(), [a, b], psi0.ravel(),
                    method="DOP853", rtol=rtol, atol=atol, dense_output=True)
    return SymplecticPath(a, b, lambda t: sol.sol(t).reshape(dim, dim), lambda t: np.asarray(S_fn(t)), dim, samples)


def trajectory_path(system, z0, T: float, psi0=None, rtol=1e-11, atol=1e-12, samples: int = 0,
                    chunk: float = 1.0):
    """Linearised flow ``D phi_t psi0`` along a trajectory of ``system`` with ``S = Hess H``.

    The transition matrix restarts from the identity every ``chunk`` time units
    so that the graph frame stays well conditioned under hyperbolic growth.
    """
    z0 = np.asarray(z0, float)
    dim = z0.size
    J = J_of(dim)
    psi0 = np.eye(dim) if psi0 is None else np.asarray(psi0, float)

    def rhs(_t, y):
        z = y[:dim]
        return np.concatenate([system.field(z), (J @ system.hessian(z) @ y[dim:].reshape(dim, dim)).ravel()])

    nodes = _chunk_nodes(0.0, T, chunk)
    sols, bases = [], [psi0]
    z = z0
    for k in range(len(nodes) - 1):
        sol = solve_ivp(rhs, [nodes[k], nodes[k + 1]], np.concatenate([z, np.eye(dim).ravel()]),
                        method="DOP853", rtol=rtol, atol=atol, dense_output=True)
        if sol.status != 0:
            raise RuntimeError(sol.message)
        sols.append(sol.sol)
        z = sol.y[:dim, -1]
        bases.append(sol.y[dim:, -1].reshape(dim, dim) @ bases[-1])

    def locate(t):
        return int(np.clip(np.searchsorted(nodes, t, side="right") - 1, 0, len(sols) - 1))

    def step(k, t):
        return sols[k](t)[dim:].reshape(dim, dim)

    def psi(t):
        k = locate(t)
        return step(k, t) @ bases[k]

    def state(t):
        return sols[locate(t)](t)[:dim]

    path = SymplecticPath(0.0, T, psi, lambda t: system.hessian(state(t)), dim, samples, (),
                          _chunked_graph(nodes, psi0, step))
    path.state = state
    return path


def sampled_path(ts, psis) -> SymplecticPath:
    """Piecewise path ``psi_i exp(s L_i)`` through the samples, ``L_i = log(psi_i^{-1} psi_{i+1})``."""
    ts = np.asarray(ts, float)
    psis = np.asarray(psis, float)
    dim = psis.shape[1]
    J = J_of(dim)
    logs = []
    for i in range(len(ts) - 1):
        L = logm(np.linalg.solve(psis[i], psis[i + 1]))
        if np.max(np.abs(np.imag(L))) > 1e-8:
            raise ValueError("samples too coarse: consecutive matrices not joined by a short path")
        logs.append(np.real(L))

    def locate(t):
        i = int(np.clip(np.searchsorted(ts, t, side="right") - 1, 0, len(ts) - 2))
        return i, (t - ts[i]) / (ts[i + 1] - ts[i])

    def psi(t):
        i, s = locate(t)
        return psis[i] @ expm(s * logs[i])

    def S(t):
        i, s = locate(t)
        P = psi(t)
        X = P @ logs[i] @ np.linalg.inv(P) / (ts[i + 1] - ts[i])
        Sm = -J @ X
        return 0.5 * (Sm + Sm.T)

    return SymplecticPath(ts[0], ts[-1], psi, S, dim, max(400, 8 * len(ts)), tuple(ts[1:-1]))


def direct_sum(p: SymplecticPath, q: SymplecticPath) -> SymplecticPath:
    """``psi (+) psi'`` on the common interval (the interval of ``p`` is used for both)."""
    if abs(p.a - q.a) > 1e-14 or abs(p.b - q.b) > 1e-14:
        raise ValueError("direct sum requires paths on the same interval")

    def graph(t):
        (X1, Y1), (X2, Y2) = p.graph(t), q.graph(t)
        return diamond(X1, X2), diamond(Y1, Y2)

    return SymplecticPath(p.a, p.b, lambda t: diamond(p.psi(t), q.psi(t)), lambda t: diamond(p.S(t), q.S(t)),
                          p.dim + q.dim, max(p.samples, q.samples),
                          tuple(sorted(set(p.breakpoints) | set(q.breakpoints))), graph)


def catenate(p: SymplecticPath, q: SymplecticPath) -> SymplecticPath:
    """Path ``p`` followed by ``q`` (requires ``p(b) = q(a)``)."""
    if np.max(np.abs(p.psi(p.b) - q.psi(q.a))) > 1e-8:
        raise ValueError("paths do not match at the junction")
    shift = p.b - q.a

    def psi(t):
        return p.psi(t) if t <= p.b else q.psi(t - shift)

    def S(t):
        return p.S(t) if t <= p.b else q.S(t - shift)

    return SymplecticPath(p.a, q.b + shift, psi, S, p.dim, (p.samples or 0) + (q.samples or 0), (p.b,))


# ---------------------------------------------------------------------------
# crossings

@dataclass
class Crossing:
    t0: float
    kernel_dim: int
    signature: int
    boundary: bool
    form_eigenvalues: np.ndarray = field(default_factory=lambda: np.zeros(0))
    degenerate: bool = False


def _kernel_matrix(path, t):
    X, Y = path.graph(t)
    return X - Y


def _sigma_min(path, t):
    return float(np.linalg.svd(_kernel_matrix(path, t), compute_uv=False)[-1])


def _det(path, t):
    return float(np.linalg.det(_kernel_matrix(path, t)))


def _golden_min(f, lo, hi, xtol=1e-14):
    """Golden-section search; unlike Brent it keeps converging on the V-shaped ``sigma_min``."""
    g = (np.sqrt(5.0) - 1) / 2
    c, d = hi - g * (hi - lo), lo + g * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > xtol * max(1.0, abs(lo)):
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - g * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + g * (hi - lo)
            fd = f(d)
    t = 0.5 * (lo + hi)
    return t, f(t)


def find_crossing_times(path: SymplecticPath, tol: float = CROSSING_TOL) -> list:
    """Times in ``[a, b]`` with ``det(I - psi) = 0``.

    Simple crossings are bracketed by sign changes of the determinant; crossings
    where the determinant only touches zero (kernel of even dimension) are
    found as small local minima of the smallest singular value of ``I - psi``.
    """
    ts = path.grid()
    mats = path.kernel_matrices(ts)
    dets = np.linalg.det(mats)
    sig = np.linalg.svd(mats, compute_uv=False)[:, -1]
    scale = lambda t: tol * max(1.0, np.linalg.norm(_kernel_matrix(path, t), 2))  # noqa: E731
    found = []
    for i in range(len(ts) - 1):
        if dets[i] == 0.0:
            continue
        if dets[i] * dets[i + 1] < 0:
            found.append(brentq(lambda t: _det(path, t), ts[i], ts[i + 1], xtol=1e-14, rtol=1e-15))
    for i in range(len(ts)):
        lo, hi = max(i - 1, 0), min(i + 1, len(ts) - 1)
        if sig[i] > sig[lo] or sig[i] > sig[hi]:
            continue
        if i in (0, len(ts) - 1):
            if sig[i] < scale(ts[i]):
                found.append(ts[i])
            continue
        tm, fm = _golden_min(lambda t: _sigma_min(path, t), ts[lo], ts[hi])
        if fm < scale(tm):
            found.append(tm)
    found.sort()
    merged = []
    for t in found:
        if merged and abs(t - merged[-1]) < 1e-7 * max(1.0, path.b - path.a):
            continue
        merged.append(t)
    # snap crossings at the ends
    out = []
    for t in merged:
        if abs(t - path.a) < 1e-9 * max(1.0, path.b - path.a) and _sigma_min(path, path.a) < scale(path.a):
            t = path.a
        if abs(t - path.b) < 1e-9 * max(1.0, path.b - path.a) and _sigma_min(path, path.b) < scale(path.b):
            t = path.b
        if not out or t != out[-1]:
            out.append(t)
    return out


def crossing_signature(path: SymplecticPath, t0: float, tol: float = CROSSING_TOL, raise_degenerate=True) -> Crossing:
    """Signature of ``S(t0)`` restricted to ``ker(I - psi(t0))``."""
    X, Y = path.graph(t0)
    _, s, Vt = np.linalg.svd(X - Y)
    thr = 1e-8 * max(1.0, s[0])
    k = int(np.sum(s < thr))
    if k == 0:
        raise ValueError(f"t0={t0} is not a crossing (smallest singular value {s[-1]:.3e})")
    B, _ = np.linalg.qr(X @ Vt[-k:].T)
    form = B.T @ path.S(t0) @ B
    ev = np.linalg.eigvalsh(0.5 * (form + form.T))
    scale = max(1.0, np.linalg.norm(path.S(t0), 2))
    deg = bool(np.any(np.abs(ev) < DEGENERATE_TOL * scale))
    if deg and raise_degenerate:
        raise DegenerateCrossingError(f"degenerate crossing form at t={t0}: eigenvalues {ev}")
    boundary = t0 == path.a or t0 == path.b
    return Crossing(float(t0), k, int(np.sum(ev > 0) - np.sum(ev < 0)), boundary, ev, deg)


def find_crossings(path: SymplecticPath, tol: float = CROSSING_TOL) -> list:
    return [crossing_signature(path, t, tol, raise_degenerate=False) for t in find_crossing_times(path, tol)]


def _perturbed(path: SymplecticPath, delta: float, rng: np.random.Generator) -> SymplecticPath:
    """Homotopy with fixed ends: ``exp(delta phi(t) J K) psi(t)`` with ``phi`` vanishing at both ends."""
    dim = path.dim
    J = J_of(dim)
    A = rng.normal(size=(dim, dim))
    K = (A + A.T) / 2
    L = path.b - path.a
    phi = lambda t: np.sin(np.pi * (t - path.a) / L)  # noqa: E731
    dphi = lambda t: np.pi / L * np.cos(np.pi * (t - path.a) / L)  # noqa: E731

    def psi(t):
        return expm(delta * phi(t) * J @ K) @ path.psi(t)

    def S(t):
        E = expm(delta * phi(t) * J @ K)
        Einv = np.linalg.inv(E)
        Sm = delta * dphi(t) * K + Einv.T @ path.S(t) @ Einv
        return 0.5 * (Sm + Sm.T)

    return SymplecticPath(path.a, path.b, psi, S, dim, path.samples, path.breakpoints)


def robbin_salamon(path: SymplecticPath, delta: float = 1e-6, retries: int = 3, seed: int = 0,
                   return_crossings: bool = False):
    """Half-integer index ``Sign(a)/2 + sum_interior Sign + Sign(b)/2``.

    Degenerate interior crossings are removed by a small homotopy with fixed ends;
    degenerate endpoint crossings cannot be and raise ``DegenerateCrossingError``.
    """
    rng = np.random.default_rng(seed)
    current = path
    for attempt in range(retries + 1):
        xs = find_crossings(current)
        bad = [c for c in xs if c.degenerate]
        if not bad:
            total = sum(0.5 * c.signature if c.boundary else c.signature for c in xs)
            return (total, xs) if return_crossings else total
        if any(c.boundary for c in bad) or attempt == retries:
            raise DegenerateCrossingError(f"degenerate crossings at t={[c.t0 for c in bad]}")
        current = _perturbed(path, delta, rng)
    raise DegenerateCrossingError("unreachable")


# ---------------------------------------------------------------------------
# Conley-Zehnder index and rotation number in dimension two

def _windings(ts_psis, n_dirs: int) -> np.ndarray:
    psis = ts_psis
    ang = np.linspace(0.0, np.pi, n_dirs, endpoint=False)
    v0 = np.stack([np.cos(ang), np.sin(ang)])  # 2 x n_dirs
    w = np.einsum("kij,jm->kim", psis, v0)
    th = np.unwrap(np.arctan2(w[:, 1, :], w[:, 0, :]), axis=0)
    jumps = np.max(np.abs(np.diff(th, axis=0))) if len(th) > 1 else 0.0
    if jumps > np.pi / 2:
        raise ValueError("path sampled too coarsely to follow the winding")
    return (th[-1] - th[0]) / (2 * np.pi)


def rotation_interval(psis: np.ndarray, n_dirs: int = 181):
    """``I_P = [min, max]`` of the normalised windings ``Delta(v0)``."""
    d = _windings(psis, n_dirs)
    return float(d.min()), float(d.max())


def conley_zehnder_geometric(path, n: int | None = None, n_dirs: int = 181, eps: float = 1e-9) -> int:
    """Index of a path in ``Sp(2)`` from ``I`` with nondegenerate end, via the rotation interval.

    ``2k`` if the slightly lowered interval contains the integer ``k``, else ``2k + 1``
    with ``I_P`` inside ``(k, k + 1)``.
    """
    if isinstance(path, SymplecticPath):
        _, psis = path.sampled(n)
    else:
        psis = np.asarray(path)
    if np.max(np.abs(psis[0] - np.eye(2))) > 1e-8:
        raise ValueError("path must start at the identity")
    end = psis[-1]
    if abs(2.0 - np.trace(end)) < 1e-10:
        raise DegenerateCrossingError("endpoint has eigenvalue 1")
    lo, hi = rotation_interval(psis, n_dirs)
    if hi - lo >= 0.5:
        raise ValueError(f"rotation interval of length {hi - lo:.3f} >= 1/2")
    lo, hi = lo - eps, hi - eps
    k_hi = np.floor(hi)
    if k_hi >= lo:
        return int(2 * k_hi)
    return int(2 * np.floor(lo) + 1)


def iterate_samples(psis: np.ndarray, k: int) -> np.ndarray:
    """Samples of the ``k``-th iterate ``psi(t - jT) psi(T)^j`` from samples over one period."""
    end = psis[-1]
    out = [psis]
    power = np.eye(2)
    for _ in range(1, k):
        power = end @ power
        out.append(np.einsum("kij,jl->kil", psis[1:], power))
    return np.concatenate(out)


@dataclass
class RotationEstimate:
    rho: float
    indices: list
    estimates: list


def rotation_number(path, k_max: int = 32, n: int | None = None) -> RotationEstimate:
    """``rho = lim mu(P^k) / 2k`` from the iterates of a one-period path in ``Sp(2)``.

    The estimate is the centre of the rotation interval of the last iterate
    divided by ``k``; the index sequence ``mu(P^k)/2k`` is returned for
    inspection and must agree to within ``1/k``.
    """
    psis = path.sampled(n)[1] if isinstance(path, SymplecticPath) else np.asarray(path)
    indices, estimates = [], []
    for k in range(1, k_max + 1):
        seq = iterate_samples(psis, k)
        lo, hi = rotation_interval(seq)
        estimates.append(0.5 * (lo + hi) / k)
        try:
            indices.append(conley_zehnder_geometric(seq))
        except DegenerateCrossingError:
            indices.append(None)
    rho = estimates[-1]
    good = [(k + 1, m) for k, m in enumerate(indices) if m is not None]
    if good:
        k, m = good[-1]
        if abs(m / (2 * k) - rho) > 1.0 / k + 1e-9:
            raise ValueError("rotation-number estimate not converged")
    return RotationEstimate(rho=float(rho), indices=indices, estimates=estimates)


# ---------------------------------------------------------------------------
# periodic orbits

QJ = J_of(4)
QI = np.block([[J_of(2), np.zeros((2, 2))], [np.zeros((2, 2)), -J_of(2)]])
QK = QJ @ QI


def quaternion_frame(grad: np.ndarray) -> np.ndarray:
    """Columns ``(j n, k n)`` with ``n`` the unit gradient: a global symplectic frame of the contact planes."""
    n = grad / np.linalg.norm(grad)
    return np.column_stack([QI @ n, QK @ n])


def reduced_path(states: np.ndarray, psis: np.ndarray, gradient: Callable) -> np.ndarray:
    """``Phi(t)_{ab} = <psi(t) e_b(0), e_a(t)>`` in the quaternion frame."""
    E0 = quaternion_frame(gradient(states[0]))
    out = np.empty((len(states), 2, 2))
    prev = E0
    for i, (z, P) in enumerate(zip(states, psis)):
        E = quaternion_frame(gradient(z))
        if np.min(np.abs(np.sum(E * prev, axis=0))) < np.cos(np.pi / 2) + 1e-3 and i > 0:
            raise ValueError("frame changes too fast between samples; refine sampling")
        out[i] = E.T @ P @ E0
        prev = E
    return out


def _orbit_samples(orbit, cover: int, trivialization: str, n: int):
    from . import regularization as rg
    from .flow import integrate, rotating_system

    if trivialization == "cartesian":
        sys_ = rotating_system(orbit.mu)
        z0 = np.asarray(orbit.initial_state, float)
        T = cover * orbit.period
        tr = integrate(sys_, z0, [0.0, T], variational=True, t_eval=np.linspace(0.0, T, n))
        if np.linalg.norm(tr.final - z0) > 1e-6:
            raise NonContractibleError("orbit does not close")
        return tr.states, tr.psi, sys_.gradient
    if trivialization == "regularized":
        params = rg.RegularizedHamiltonianParams(orbit.mu, orbit.energy)
        w0 = rg.standard_to_regularized(orbit.mu, orbit.initial_state)
        hit = rg.sigma_for_time(params, w0, cover * orbit.period)
        s_end = float(hit.sigma[-1])
        sys_ = rg.regularized_system(params)
        tr = integrate(sys_, w0, [0.0, s_end], variational=True, t_eval=np.linspace(0.0, s_end, n))
        end = tr.final
        d_same = np.linalg.norm(_wrap(end - w0))
        d_anti = np.linalg.norm(_wrap(end + w0))
        if d_same > 1e-6:
            if d_anti < 1e-6:
                raise NonContractibleError(
                    "orbit closes only under the antipodal identification; use an even cover")
            raise NonContractibleError(f"orbit does not close in the regularized chart ({d_same:.2e})")
        return tr.states, tr.psi, sys_.gradient
    raise ValueError(f"unknown trivialization {trivialization!r}")


def _wrap(d):
    d = np.array(d, float)
    d[3] = (d[3] + np.pi) % (2 * np.pi) - np.pi
    return d


def orbit_reduced_path(orbit, cover: int = 1, trivialization: str = "regularized", n: int = 4001):
    states, psis, grad = _orbit_samples(orbit, cover, trivialization, n)
    return reduced_path(states, psis, grad)


def orbit_index(orbit, cover: int = 1, trivialization: str = "regularized", n: int = 4001) -> int:
    """Conley-Zehnder index of the ``cover``-fold orbit in the quaternion frame.

    ``"regularized"`` uses the elliptic chart, in which a double cover around a
    primary closes up as a contractible loop; ``"cartesian"`` uses the
    rotating-frame coordinates and is only meaningful for orbits away from the
    primaries.
    """
    for attempt in range(4):
        try:
            Phi = orbit_reduced_path(orbit, cover, trivialization, n)
            return conley_zehnder_geometric(Phi)
        except ValueError as err:
            if "sampled" in str(err) or "frame" in str(err):
                n = 2 * n - 1
                continue
            raise
    raise ValueError("could not resolve the frame winding")


def orbit_rotation_number(orbit, trivialization: str = "regularized", n: int = 4001, k_max: int = 16):
    Phi = orbit_reduced_path(orbit, 1, trivialization, n)
    return rotation_number(Phi, k_max)


# ---------------------------------------------------------------------------
# non-negative paths to a semi-simple matrix

@dataclass
class _Segment:
    t0: float
    t1: float
    left: np.ndarray
    X: np.ndarray
    right: np.ndarray
    s0: float
    s1: float

    def __post_init__(self):
        # generators that are multiples of J exponentiate in closed form
        J = J_of(self.X.shape[0])
        w = float(np.sum(self.X * J) / self.X.shape[0])
        self._w = w if np.allclose(self.X, w * J, rtol=0, atol=1e-15) else None

    def value(self, t):
        s = self.s0 + (t - self.t0) * (self.s1 - self.s0) / (self.t1 - self.t0)
        if self._w is not None:
            n = self.X.shape[0]
            E = np.cos(s * self._w) * np.eye(n) + np.sin(s * self._w) * J_of(n)
        else:
            E = expm(s * self.X)
        return self.left @ E @ self.right

    def rate(self):
        return (self.s1 - self.s0) / (self.t1 - self.t0)


def _conj_to_J(N: np.ndarray, sign: int) -> np.ndarray:
    """``Q`` in ``Sp(2)`` with ``N = Q (sign J) Q^{-1}`` for ``N`` of trace 0."""
    M = sign * N
    a, c = M[0, 0], M[1, 0]
    if c <= 0:
        raise ValueError("matrix is not conjugate to the requested rotation")
    s = 1.0 / np.sqrt(c)
    return np.array([[s, a * s], [0.0, 1.0 / s]])


def _block_path_2(kind: str, par) -> list:
    J2 = J_of(2)
    I2 = np.eye(2)
    if kind == "R":
        th = par if par > 1e-14 else 2 * np.pi
        return [_Segment(0.0, 1.0, I2, th * J2, I2, 0.0, 1.0)]
    lam = par
    if lam > 0:
        D = np.diag([lam, 1 / lam])
        Q = _conj_to_J(D @ rotation(1.5 * np.pi), -1)
        return [_Segment(0.0, 0.5, Q, 3 * np.pi * J2, np.linalg.inv(Q), 0.0, 0.5),
                _Segment(0.5, 1.0, D, np.pi * J2, rotation(np.pi), 0.5, 1.0)]
    D = np.diag([-lam, -1 / lam])
    Q = _conj_to_J(D @ rotation(0.5 * np.pi), 1)
    return [_Segment(0.0, 0.5, Q, np.pi * J2, np.linalg.inv(Q), 0.0, 0.5),
            _Segment(0.5, 1.0, D, np.pi * J2, I2, 0.5, 1.0)]


def _block_path_4(rho: float, theta: float) -> list:
    """Two positive exponentials ``exp(s c J)`` then ``exp(s L) exp(c J)`` ending at ``D(rho, theta)``.

    ``c`` is chosen so that ``L = log(D(rho, theta) exp(-c J))`` is real with
    ``-J L`` positive definite, maximising its smallest eigenvalue.
    """
    J = J_of(4)
    target = _normal_block("DQ", (rho, theta))

    def margin(c):
        L = logm(target @ expm(-c * J))
        if np.max(np.abs(np.imag(L))) > 1e-9:
            return -np.inf, None
        S = -J @ np.real(L)
        return np.linalg.eigvalsh(0.5 * (S + S.T))[0], np.real(L)

    cs = np.linspace(0.0, 2 * np.pi, 181)[1:-1]
    vals = [margin(c)[0] for c in cs]
    i = int(np.argmax(vals))
    if not vals[i] > 0:
        raise ValueError("no positive two-step path found for this complex quadruple")
    lo, hi = cs[max(i - 1, 0)], cs[min(i + 1, len(cs) - 1)]
    res = minimize_scalar(lambda c: -margin(c)[0], bounds=(lo, hi), method="bounded")
    c = float(res.x) if -res.fun >= vals[i] else float(cs[i])
    L = margin(c)[1]
    I4 = np.eye(4)
    return [_Segment(0.0, 0.5, I4, c * J, I4, 0.0, 1.0),
            _Segment(0.5, 1.0, I4, L, expm(c * J), 0.0, 1.0)]


def normal_form(M: np.ndarray, tol: float = 1e-7):
    """``(P, blocks)`` with ``M = P (N_1 <> ... <> N_k) P^{-1}`` and ``P`` symplectic.

    ``blocks`` lists ``("R", theta)``, ``("D", lam)`` or ``("DQ", (rho, theta))``.
    """
    M = np.asarray(M, float)
    dim = M.shape[0]
    n = dim // 2
    J = J_of(dim)
    ev, W = np.linalg.eig(M)
    if np.linalg.cond(W) > 1e10:
        raise ValueError("matrix is not semi-simple")
    if np.any(np.abs(ev - 1) < tol) or np.any(np.abs(ev + 1) < tol):
        raise ValueError("eigenvalues +-1 are outside the generic scope")
    used = np.zeros(len(ev), bool)
    Es, Fs, blocks = [], [], []

    def find(val):
        d = np.abs(ev - val)
        d[used] = np.inf
        i = int(np.argmin(d))
        if d[i] > 1e-6 * max(1, abs(val)):
            raise ValueError("eigenvalue structure not recognised")
        return i

    for i in range(len(ev)):
        if used[i]:
            continue
        lam = ev[i]
        if abs(lam.imag) < tol:  # real pair lam, 1/lam
            lam = lam.real
            if abs(lam) < 1:
                lam = 1 / lam
                i = find(lam)
            used[i] = True
            j = find(1 / lam)
            used[j] = True
            e, f = W[:, i].real, W[:, j].real
            f = -f / (e @ J @ f)
            Es.append(e[:, None]); Fs.append(f[:, None]); blocks.append(("D", lam))
        elif abs(abs(lam) - 1) < tol:  # elliptic pair
            used[i] = True
            used[find(np.conj(lam))] = True
            w = W[:, i]
            e, f = w.real, -w.imag
            g = e @ J @ f
            th = np.angle(lam) % (2 * np.pi)
            if g > 0:
                e, f, th = w.real, w.imag, (-np.angle(lam)) % (2 * np.pi)
                g = e @ J @ f
            s = 1 / np.sqrt(-g)
            Es.append((s * e)[:, None]); Fs.append((s * f)[:, None]); blocks.append(("R", th))
        else:  # complex quadruple
            if abs(lam) < 1:
                lam = 1 / np.conj(lam)
                i = find(lam)
            rho, th = abs(lam), np.angle(lam) % (2 * np.pi)
            ids = [i, find(np.conj(lam))]
            for k in ids:
                used[k] = True
            i2 = find(1 / np.conj(lam))
            used[i2] = True
            used[find(1 / lam)] = True
            w, wp = W[:, i], W[:, i2]
            E = np.column_stack([w.real, -w.imag])
            F = np.column_stack([wp.real, -wp.imag])
            G = E.T @ J @ F
            F = -F @ np.linalg.inv(G)
            Es.append(E); Fs.append(F); blocks.append(("DQ", (rho, th)))
    P = np.column_stack(Es + Fs)
    if symplectic_defect(P) > 1e-6 * max(1.0, np.linalg.norm(P) ** 2):
        raise ValueError("failed to build a symplectic normal-form basis")
    N = diamond(*[_normal_block(k, p) for k, p in blocks])
    if np.max(np.abs(P @ N @ np.linalg.inv(P) - M)) > 1e-6 * max(1.0, np.linalg.norm(M)):
        raise ValueError("normal form does not reproduce the matrix")
    return P, blocks


def _normal_block(kind, par):
    if kind == "R":
        return rotation(par)
    if kind == "D":
        return np.diag([par, 1 / par])
    rho, th = par
    return np.block([[rho * rotation(th), np.zeros((2, 2))], [np.zeros((2, 2)), rotation(th) / rho]])


def nonneg_path(M: np.ndarray) -> SymplecticPath:
    """Piecewise path ``beta`` from ``I`` to ``M`` with ``-J beta' beta^{-1} >= 0``."""
    M = np.asarray(M, float)
    P, blocks = normal_form(M)
    Pinv = np.linalg.inv(P)
    dim = M.shape[0]
    J = J_of(dim)
    paths = [_block_path_2(k, p) if k != "DQ" else _block_path_4(*p) for k, p in blocks]
    breaks = sorted({s.t0 for segs in paths for s in segs} | {1.0})

    def seg_at(segs, t):
        for s in segs:
            if s.t0 <= t <= s.t1 and not (t == s.t1 and s.t1 < 1.0):
                return s
        return segs[-1]

    def psi(t):
        return P @ diamond(*[seg_at(segs, t).value(t) for segs in paths]) @ Pinv

    def S(t):
        vals, gens = [], []
        for segs in paths:
            s = seg_at(segs, t)
            v = s.value(t)
            vals.append(v)
            gens.append(s.left @ s.X @ np.linalg.inv(s.left) * s.rate())
        X = P @ diamond(*gens) @ Pinv
        Sm = -J @ X
        return 0.5 * (Sm + Sm.T)

    path = SymplecticPath(0.0, 1.0, psi, S, dim, 1500, tuple(b for b in breaks if 0 < b < 1))
    path.normal_form = (P, blocks)
    return path


def min_generator_eigenvalue(path: SymplecticPath, n: int = 400) -> float:
    ts = np.linspace(path.a, path.b, n)
    return float(min(np.linalg.eigvalsh(path.S(t))[0] for t in ts))


# ---------------------------------------------------------------------------
# linearised flow at the saddle-centre

def saddle_center_bound(lam2: float, a: float, b: float) -> int:
    """``2 floor(lam2 (b - a) / 2 pi) - 1``."""
    if not b > a:
        raise ValueError("need b > a")
    q = lam2 * (b - a) / (2 * np.pi)
    return int(2 * np.floor(q + 1e-9) - 1)


def saddle_center_path(lam1: float, lam2: float, a: float, b: float, psi0=None) -> SymplecticPath:
    """Linear flow of ``diag(lam1, lam2, -lam1, lam2)`` from ``psi0`` at time ``a``."""
    return constant_path(np.diag([lam1, lam2, -lam1, lam2]), a, b, psi0)


def regularized_saddle_eigenvalues(mu: float = 0.5):
    """``(lambda1_hat, lambda2_hat)`` of the regularized Hamiltonian at the image of ``l1``."""
    from . import regularization as rg

    E = cd.L1_value(mu)
    w = rg.standard_to_regularized(mu, cd.l1_state(mu))
    _, _, H = rg.hat_hamiltonian(rg.RegularizedHamiltonianParams(mu, E), w, True)
    ev = np.linalg.eigvals(cd.J4 @ H)
    return float(np.max(ev.real)), float(np.max(ev.imag)), w


def random_hat_trajectory_path(rng: np.random.Generator, mu: float = 0.5, h_range=(-2.3, -1.95),
                               T_range=(1.0, 20.0)) -> SymplecticPath:
    """Linearised regularized flow from a random start on a random bounded level ``h``.

    The base point is uniform in ``x`` among points with ``V_tilde < 0`` and the
    momentum has a uniform direction; ``psi0`` is a random symplectic matrix.
    """
    from . import regularization as rg

    h = rng.uniform(*h_range)
    params = rg.RegularizedHamiltonianParams(mu, h)
    while True:
        x = np.array([rng.uniform(-1.5, 1.5), rng.uniform(0.0, 2 * np.pi)])
        F = rg.magnetic_potential(x)[0]
        Vt = rg.hat_hamiltonian(params, np.concatenate([-F, x]))
        if Vt < 0:
            break
    r = np.sqrt(-2 * Vt)
    ph = rng.uniform(0.0, 2 * np.pi)
    w0 = np.concatenate([-F + r * np.array([np.cos(ph), np.sin(ph)]), x])
    path = trajectory_path(rg.regularized_system(params), w0, rng.uniform(*T_range), random_symplectic(4, rng))
    path.level = h
    return path


def crossing_count_oracle(path: SymplecticPath, factor: int = 10) -> int:
    """Number of crossings seen by a dense scan of ``det(I - psi)`` sign changes and near-zeros."""
    n = factor * (path.samples or path._auto_samples())
    ts = np.linspace(path.a, path.b, n)
    d = np.array([_det(path, t) for t in ts])
    return int(np.sum(d[:-1] * d[1:] < 0))


# ---------------------------------------------------------------------------
# path files

def write_path_csv(path: SymplecticPath, filename, n: int | None = None) -> None:
    """CSV with header ``t, psi_00, psi_01, ...`` (row-major entries)."""
    ts, psis = path.sampled(n)
    dim = path.dim
    header = "t," + ",".join(f"psi_{i}{j}" for i in range(dim) for j in range(dim))
    data = np.column_stack([ts, psis.reshape(len(ts), -1)])
    np.savetxt(filename, data, delimiter=",", header=header, comments="", fmt="%.17g")


def read_path_csv(filename) -> SymplecticPath:
    """Load a sampled path (``t`` plus 4 or 16 entries per row) as a piecewise-exponential path."""
    data = np.loadtxt(filename, delimiter=",", skiprows=1, ndmin=2)
    m = data.shape[1] - 1
    dim = int(round(np.sqrt(m)))
    if dim * dim != m or dim not in (2, 4):
        raise ValueError(f"expected 4 or 16 matrix entries per row, got {m}")
    ts, psis = data[:, 0], data[:, 1:].reshape(-1, dim, dim)
    bad = max(symplectic_defect(P) for P in psis)
    if bad > 1e-8:
        raise ValueError(f"samples are not symplectic (defect {bad:.2e})")
    return sampled_path(ts, psis)
