"""Deterministic mean-field analysis: drift F, critical rate, equilibria,
regime classification, hydrodynamic ODE and the closeness gap metric."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .persuasion import PersuasionFunction, validate_assumptions

__all__ = ["RegimeReport", "F_eval", "beta_star", "equilibria", "classify_regime",
           "integrate_ode", "kurtz_gap", "OdeTrajectory", "StandardAssumptionError"]

_ROOT_TOL = 1e-12
_GRID = 10_001


class StandardAssumptionError(ValueError):
    """phi fails the standard (monotone + concave) validation."""


@dataclass(frozen=True)
class RegimeReport:
    regime: int                 # 1: global extinction, 2: bistable, 3: global persistence
    beta_star: float
    phi0_inv: float             # +inf when phi(0) = 0
    z_u: float | None
    z_s: float | None
    tangency: bool = False      # beta == beta_star exactly


@dataclass(frozen=True)
class OdeTrajectory:
    times: np.ndarray
    z: np.ndarray

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def value_at(self, t) -> np.ndarray:
        return np.interp(t, self.times, self.z)


def F_eval(z: float, beta: float, phi: PersuasionFunction) -> float:
    """Drift F(z) = beta z (1-z) phi(z) - z."""
    return beta * z * (1.0 - z) * float(phi(z)) - z


def _gain_argmax(phi: PersuasionFunction):
    """Maximize g(z) = (1-z) phi(z) on [0,1]: dense grid then local refine
    (g is concave under the standard assumptions, so this is global)."""
    zs = np.linspace(0.0, 1.0, _GRID)
    gs = (1.0 - zs) * np.asarray(phi(zs))
    j = int(np.argmax(gs))
    lo = zs[max(j - 1, 0)]
    hi = zs[min(j + 1, _GRID - 1)]
    if hi > lo:
        res = minimize_scalar(lambda z: -(1.0 - z) * float(phi(z)),
                              bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-14})
        if -res.fun >= gs[j]:
            return float(res.x), float(-res.fun)
    return float(zs[j]), float(gs[j])


def beta_star(phi: PersuasionFunction) -> float:
    """Critical rate 1 / max_z (1-z) phi(z); +inf when the max is 0."""
    _, gmax = _gain_argmax(phi)
    if gmax <= 0.0:
        return float("inf")
    return 1.0 / gmax


def _bisect(f, lo, hi, tol=_ROOT_TOL):
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def equilibria(beta: float, phi: PersuasionFunction):
    """Positive roots of beta (1-z) phi(z) - 1 = 0 as (z_u, z_s).

    The unit interval is split at the argmax of (1-z) phi(z); concavity
    leaves at most one root per side, found by bisection to 1e-12.
    Missing roots come back as None.
    """
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    zmax, gmax = _gain_argmax(phi)
    f = lambda z: beta * (1.0 - z) * float(phi(z)) - 1.0
    if beta * gmax < 1.0:
        return None, None
    if abs(beta * gmax - 1.0) < 1e-13:
        # tangency: double root at the argmax
        return zmax, zmax
    z_u = _bisect(f, 0.0, zmax) if f(0.0) < 0 else None
    z_s = _bisect(f, zmax, 1.0)
    return z_u, z_s


def classify_regime(beta: float, phi: PersuasionFunction) -> RegimeReport:
    """Regime per the mean-field trichotomy: extinction below beta_star,
    bistable between beta_star and 1/phi(0), persistence above.

    Exact tangency beta == beta_star is reported as regime 1 with a flag.
    """
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    report = validate_assumptions(phi)
    if not report.standard:
        raise StandardAssumptionError(
            f"phi fails standard assumptions: {report.detail}")
    bstar = beta_star(phi)
    phi0 = phi.at_zero()
    phi0_inv = float("inf") if phi0 <= 0.0 else 1.0 / phi0
    z_u, z_s = equilibria(beta, phi)
    if beta < bstar:
        regime = 1
    elif beta == bstar:
        return RegimeReport(1, bstar, phi0_inv, z_u, z_s, tangency=True)
    elif beta < phi0_inv:
        regime = 2
    else:
        regime = 3
    return RegimeReport(regime, bstar, phi0_inv, z_u, z_s)


def integrate_ode(beta: float, phi: PersuasionFunction, z0: float, T: float,
                  step: float = 1e-3, self_check: bool = True) -> OdeTrajectory:
    """Classical RK4 for z' = F(z), clamped to [0,1] against round-off.

    With self_check the run is repeated at half the step and must agree to
    1e-6 everywhere.
    """
    if not 0.0 <= z0 <= 1.0:
        raise ValueError(f"z0 must be within [0, 1], got {z0}")
    if step <= 0:
        raise ValueError("step must be positive")

    def run(h):
        n = max(1, int(np.ceil(T / h)))
        h = T / n
        ts = np.linspace(0.0, T, n + 1)
        zs = np.empty(n + 1)
        z = float(z0)
        zs[0] = z
        for i in range(n):
            k1 = F_eval(z, beta, phi)
            k2 = F_eval(min(max(z + 0.5 * h * k1, 0.0), 1.0), beta, phi)
            k3 = F_eval(min(max(z + 0.5 * h * k2, 0.0), 1.0), beta, phi)
            k4 = F_eval(min(max(z + h * k3, 0.0), 1.0), beta, phi)
            z = z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            z = min(max(z, 0.0), 1.0)
            zs[i + 1] = z
        return ts, zs

    ts, zs = run(step)
    if self_check:
        ts2, zs2 = run(step / 2)
        drift = float(np.max(np.abs(zs - zs2[::2])))
        if drift >= 1e-6:
            raise RuntimeError(
                f"ODE step self-check failed: halving the step moved the "
                f"solution by {drift:.2e} >= 1e-6; reduce the step")
    return OdeTrajectory(times=ts, z=zs)


def kurtz_gap(stochastic, deterministic: OdeTrajectory) -> float:
    """sup_t |Z(t) - z(t)| over the union of the two sample grids, treating
    the stochastic path as piecewise constant."""
    if abs(stochastic.horizon - deterministic.horizon) > 1e-9:
        raise ValueError(
            f"horizon mismatch: {stochastic.horizon} vs {deterministic.horizon}")
    det_on_stoch = deterministic.value_at(stochastic.times)
    gap = float(np.max(np.abs(stochastic.z - det_on_stoch)))
    stoch_on_det = stochastic.value_at(deterministic.times)
    gap2 = float(np.max(np.abs(stoch_on_det - deterministic.z)))
    return max(gap, gap2)
