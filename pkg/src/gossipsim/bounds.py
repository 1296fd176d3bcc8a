"""General-graph machinery: the linearized dominating process, its moment
ODEs and variance bound, and the graph-dependent threshold computations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rng import derive_generator
from .graph import Graph, GraphMetrics
from .meanfield import beta_star, equilibria
from .persuasion import PersuasionFunction
from .trajectory import Trajectory

__all__ = ["LinearProcessParams", "GeneralThresholds", "MomentTrajectory",
           "CovarianceTrajectory", "simulate_linear", "integrate_first_moment",
           "integrate_covariance", "variance_bound", "general_thresholds",
           "expansive_thresholds", "InapplicableBoundError"]

_COVARIANCE_NODE_CAP = 200
_EVENT_CAP = 10_000_000
_GRID_POINTS = 1000


class InapplicableBoundError(ValueError):
    """The closed-form variance bound requires mu * rho_A < 1."""


@dataclass(frozen=True)
class LinearProcessParams:
    """Rate multiplier mu for the linear dominating process Y(t) on N^V:
    birth of v at rate mu * sum_{w in N_v} y_w, death at rate y_v."""

    mu: float
    graph: Graph
    rho: float  # spectral radius of the adjacency matrix

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError(f"mu must be >= 0, got {self.mu}")

    @property
    def rho_mu(self) -> float:
        return self.mu * self.rho


@dataclass(frozen=True)
class MomentTrajectory:
    times: np.ndarray
    values: np.ndarray  # shape (steps + 1, N)

    def at(self, t) -> np.ndarray:
        cols = [np.interp(t, self.times, self.values[:, j])
                for j in range(self.values.shape[1])]
        return np.array(cols)

    def z_mean(self, t):
        """N^-1 * 1^T M(t): the ODE prediction for E[Z_Y(t)]."""
        totals = self.values.sum(axis=1) / self.values.shape[1]
        return np.interp(t, self.times, totals)


@dataclass(frozen=True)
class CovarianceTrajectory:
    times: np.ndarray
    omega: np.ndarray   # shape (steps + 1, N, N)
    var_z: np.ndarray   # 1^T Omega 1 / N^2

    def var_at(self, t):
        return np.interp(t, self.times, self.var_z)


def simulate_linear(params: LinearProcessParams, init_counts, T: float,
                    seed: int, event_cap: int = _EVENT_CAP) -> Trajectory:
    """Exact event-driven simulation of Y(t); returns Z_Y(t) = total / N.

    Supercritical runs (mu * rho_A >= 1) blow up; the event cap truncates
    them and the trajectory is flagged accordingly.
    """
    g = params.graph
    a = g.to_dense()
    y = np.asarray(init_counts, dtype=np.int64).copy()
    if y.shape != (g.node_count,) or (y < 0).any():
        raise ValueError("init counts must be a nonnegative vector sized to the graph")
    rng = derive_generator(seed, 0x11)
    n = g.node_count
    s = a @ y  # birth propensity per node, up to the factor mu
    total = int(y.sum())
    t = 0.0
    times = [0.0]
    zs = [total / n]
    grid = np.linspace(0.0, T, _GRID_POINTS)
    gi = int(np.searchsorted(grid, 0.0, side="right"))
    events = 0
    absorbed = None
    truncated = False
    while True:
        birth_tot = params.mu * float(s.sum())
        death_tot = float(total)
        rate = birth_tot + death_tot
        if rate <= 0.0:
            absorbed = t
            break
        dt = rng.exponential(1.0 / rate)
        tnew = t + dt
        while gi < len(grid) and grid[gi] < tnew:
            if grid[gi] > times[-1] and grid[gi] <= T:
                times.append(float(grid[gi]))
                zs.append(total / n)
            gi += 1
        if tnew > T:
            break
        t = tnew
        if rng.random() * rate < birth_tot:
            v = int(rng.choice(n, p=s / s.sum()))
            y[v] += 1
            total += 1
            s += a[:, v]
        else:
            v = int(rng.choice(n, p=y / total))
            y[v] -= 1
            total -= 1
            s -= a[:, v]
        events += 1
        if times[-1] < t and len(times) < 250_000:
            times.append(t)
            zs.append(total / n)
        if events >= event_cap:
            truncated = True
            break
    zfinal = total / n
    while gi < len(grid) and not truncated:
        if grid[gi] > times[-1] and grid[gi] <= T:
            times.append(float(grid[gi]))
            zs.append(zfinal)
        gi += 1
    if not truncated and absorbed is None and times[-1] < T:
        times.append(float(T))
        zs.append(zfinal)
    return Trajectory(times=np.array(times), z=np.array(zs), xi=None,
                      horizon=float(T), absorbed_at=absorbed,
                      event_count=events, seed=int(seed), truncated=truncated)


def _rk4_linear(f, y0, T, step):
    n_steps = max(1, int(np.ceil(T / step)))
    h = T / n_steps
    times = np.linspace(0.0, T, n_steps + 1)
    out = [np.array(y0, dtype=np.float64)]
    y = out[0]
    for _ in range(n_steps):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        out.append(y)
    return times, np.stack(out)


def integrate_first_moment(params: LinearProcessParams, m0, T: float,
                           step: float = 1e-3, check_norm: bool = True) -> MomentTrajectory:
    """RK4 for M' = (mu A - I) M; optionally asserts the spectral norm decay
    ||M(t)|| <= exp((mu rho - 1) t) ||M(0)||."""
    if step <= 0:
        raise ValueError("step must be positive")
    a = params.graph.to_dense()
    gen = params.mu * a - np.eye(params.graph.node_count)
    times, values = _rk4_linear(lambda m: gen @ m, np.asarray(m0, float), T, step)
    if check_norm:
        norms = np.linalg.norm(values, axis=1)
        bound = np.exp((params.rho_mu - 1.0) * times) * norms[0]
        if (norms > bound * (1.0 + 1e-9) + 1e-12).any():
            raise RuntimeError("first-moment norm violates the spectral decay bound")
    return MomentTrajectory(times=times, values=values)


def integrate_covariance(params: LinearProcessParams, m0, T: float,
                         step: float = 1e-3) -> CovarianceTrajectory:
    """Joint RK4 for the first moment and the centered second moment
    Omega' = mu (A Omega + Omega A) - 2 Omega + mu diag(A M) + diag(M),
    Omega(0) = 0. Dense verification path, capped at N = 200."""
    n = params.graph.node_count
    if n > _COVARIANCE_NODE_CAP:
        raise ValueError(f"covariance integration capped at N = {_COVARIANCE_NODE_CAP}")
    if step <= 0:
        raise ValueError("step must be positive")
    a = params.graph.to_dense()
    mu = params.mu
    eye = np.eye(n)
    gen = mu * a - eye

    def f(state):
        m = state[:n]
        om = state[n:].reshape(n, n)
        dm = gen @ m
        dom = mu * (a @ om + om @ a) - 2.0 * om + np.diag(mu * (a @ m) + m)
        return np.concatenate([dm, dom.ravel()])

    y0 = np.concatenate([np.asarray(m0, float), np.zeros(n * n)])
    times, flat = _rk4_linear(f, y0, T, step)
    omega = flat[:, n:].reshape(-1, n, n)
    omega = 0.5 * (omega + omega.transpose(0, 2, 1))  # kill round-off asymmetry
    ones = np.ones(n)
    var_z = np.einsum("i,kij,j->k", ones, omega, ones) / n ** 2
    return CovarianceTrajectory(times=times, omega=omega, var_z=var_z)


def variance_bound(params: LinearProcessParams, z0: float, t: float) -> float:
    """Closed-form bound on Var(Z_Y(t)):
    N^(-1/2) (mu rho + 1)/(1 - mu rho) exp((mu rho - 1) t) sqrt(Z0)."""
    if params.rho_mu >= 1.0:
        raise InapplicableBoundError(
            f"bound needs mu * rho_A < 1, got {params.rho_mu}")
    if not 0.0 <= z0 <= 1.0:
        raise ValueError(f"Z0 must be in [0, 1], got {z0}")
    n = params.graph.node_count
    mr = params.rho_mu
    return n ** -0.5 * (mr + 1.0) / (1.0 - mr) * np.exp((mr - 1.0) * t) * np.sqrt(z0)


@dataclass(frozen=True)
class GeneralThresholds:
    """Thresholds of the general-graph theorem; absent quantities are None.

    z_s_general uses the degree upper-bound parameter (Delta/dbar * beta),
    z_s_gamma the bottleneck lower-bound parameter (beta * gamma / dbar); the
    two are labeled rather than merged.
    """

    beta: float
    z_u_prime: float | None
    z_u_dprime: float | None
    z_s_general: float | None
    z_s_gamma: float | None
    regime: str  # "1", "1bis", "2", "3", "indeterminate"
    gamma_available: bool
    gamma_source: str  # "exact", "analytic", "missing"


def _solve_z_u_prime(phi: PersuasionFunction, target: float) -> float | None:
    """Monotone bisection for phi(sqrt(s)) = target on s in [0, 1]."""
    lo, hi = 0.0, 1.0
    f = lambda s: float(phi(np.sqrt(s))) - target
    flo, fhi = f(lo), f(hi)
    if flo > 1e-15 or fhi < -1e-15:
        return None
    if abs(flo) <= 1e-15 and abs(fhi) <= 1e-15:
        return None  # phi constant at the target: no unique solution
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= 1e-12:
            break
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def general_thresholds(g: Graph, metrics: GraphMetrics, beta: float,
                       phi: PersuasionFunction) -> GeneralThresholds:
    """Threshold points and regime of the general-graph theorem.

    gamma comes from the exact bottleneck ratio when available, else from
    the analytic family parameters (gamma >= dbar / e2); without either,
    gamma-dependent quantities are reported absent.
    """
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    dbar = g.avg_degree
    delta = g.max_degree if g.materialized else (
        g.node_count if g.has_self_loops else g.node_count - 1)
    rho = metrics.spectral_radius
    if metrics.cheeger is not None:
        gamma, gamma_source = float(metrics.cheeger), "exact"
    elif g.is_complete:
        # cutting s <= N/2 nodes severs s(N-s) arcs, ratio N-s, min at s=N//2
        gamma, gamma_source = float(g.node_count - g.node_count // 2), "analytic"
    elif metrics.family_analytic_params is not None:
        _, _, e2 = metrics.family_analytic_params
        gamma, gamma_source = dbar / e2, "analytic"
    else:
        gamma, gamma_source = None, "missing"

    z_u_prime = _solve_z_u_prime(phi, dbar / (beta * rho))
    z_u_dprime, z_s_general = equilibria(delta / dbar * beta, phi)
    z_s_gamma = None
    if gamma is not None and gamma > 0:
        _, z_s_gamma = equilibria(beta * gamma / dbar, phi)

    phi0 = phi.at_zero()
    phi1 = float(phi(1.0))
    bstar = beta_star(phi)
    phi0_inv = np.inf if phi0 <= 0 else 1.0 / phi0
    phi1_inv = np.inf if phi1 <= 0 else 1.0 / phi1
    regime = "indeterminate"
    if beta < dbar / delta * phi1_inv:
        regime = "1"
    elif beta < dbar / rho * phi1_inv:
        regime = "1bis"
    elif gamma is not None and gamma > 0:
        if dbar / gamma * phi0_inv < beta:
            regime = "3"
        elif dbar / gamma * bstar < beta < dbar / rho * phi0_inv:
            regime = "2"
    return GeneralThresholds(beta=beta, z_u_prime=z_u_prime,
                             z_u_dprime=z_u_dprime, z_s_general=z_s_general,
                             z_s_gamma=z_s_gamma, regime=regime,
                             gamma_available=gamma is not None,
                             gamma_source=gamma_source)


def expansive_thresholds(e1: float, e2: float, a: float, beta: float) -> GeneralThresholds:
    """Family form for (a, e1, e2)-regularly expansive sequences with linear
    phi: z_u' = e1^2 / beta^2, z_u'' and z_s from the closed-form roots.

    A beta between a and 4 e2 yields an explicit "indeterminate" regime,
    not an error.
    """
    if not 0 <= a <= e1 <= e2:
        raise ValueError(f"need 0 <= a <= e1 <= e2, got a={a}, e1={e1}, e2={e2}")
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    z_u_prime = (e1 / beta) ** 2
    z_u_dprime = None
    z_s = None
    if beta >= 4 * e2:
        z_u_dprime = 0.5 - 0.5 * np.sqrt(1.0 - 4.0 * e2 / beta)
    if beta >= 4 * e1 and e1 > 0:
        z_s = 0.5 + 0.5 * np.sqrt(1.0 - 4.0 * e1 / beta)
    if beta < a:
        regime = "1"
    elif beta > 4 * e2:
        regime = "2"
    else:
        regime = "indeterminate"
    return GeneralThresholds(beta=beta, z_u_prime=z_u_prime,
                             z_u_dprime=z_u_dprime, z_s_general=z_s,
                             z_s_gamma=None, regime=regime,
                             gamma_available=True, gamma_source="analytic")
