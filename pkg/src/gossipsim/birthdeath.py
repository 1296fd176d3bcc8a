"""Birth-death chains on the lattice {0, 1/N, ..., 1}: the three explicit
rate families, exact simulation, and exact hitting probabilities.

All chains are stored in the N-scaled convention (events per unit time for
the whole population); the per-individual form of the degree upper bound
differs only by a uniform time change, which leaves hitting probabilities
untouched.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import logsumexp

from . import _kernels
from ._rng import derive_kernel_seed
from .persuasion import PersuasionFunction
from .trajectory import Trajectory

__all__ = ["BirthDeathChain", "rates_meanfield", "rates_lower", "rates_upper",
           "chain_from_rates", "simulate_bd", "hitting_prob", "mc_hitting_prob",
           "UnreachableTargetError"]

_GRID_POINTS = 1000
_MAX_EVENT_SAMPLES = 200_000


class UnreachableTargetError(ValueError):
    """A zero birth rate strictly inside (0, M) blocks the upward passage."""


@dataclass(frozen=True)
class BirthDeathChain:
    """Rate tables over the lattice k/N, k = 0..N, with the no-escape
    boundary conditions lam_plus[N] = 0 and lam_minus[0] = 0."""

    n: int
    lam_plus: np.ndarray
    lam_minus: np.ndarray
    label: str = "custom"

    def __post_init__(self):
        for name, arr in (("lam_plus", self.lam_plus), ("lam_minus", self.lam_minus)):
            if arr.shape != (self.n + 1,):
                raise ValueError(f"{name} must have length N + 1")
            if not np.isfinite(arr).all() or (arr < 0).any():
                raise ValueError(f"{name} must be finite and nonnegative")
        if self.lam_plus[self.n] != 0.0:
            raise ValueError("lam_plus(1) must be 0")
        if self.lam_minus[0] != 0.0:
            raise ValueError("lam_minus(0) must be 0")

    @property
    def lattice(self) -> np.ndarray:
        return np.arange(self.n + 1) / self.n


def chain_from_rates(n: int, birth: Callable[[float], float],
                     death: Callable[[float], float],
                     label: str = "custom") -> BirthDeathChain:
    """Tabulate rate functions on the lattice, clamping the boundary states."""
    zs = np.arange(n + 1) / n
    lp = np.array([float(birth(z)) for z in zs])
    lm = np.array([float(death(z)) for z in zs])
    lp[n] = 0.0
    lm[0] = 0.0
    return BirthDeathChain(n=n, lam_plus=lp, lam_minus=lm, label=label)


def rates_meanfield(n: int, beta: float, phi: PersuasionFunction) -> BirthDeathChain:
    """Complete-graph chain: lam+(z) = N beta z (1-z) phi(z), lam-(z) = N z."""
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    zs = np.arange(n + 1) / n
    lp = n * beta * zs * (1.0 - zs) * np.asarray(phi(zs))
    lm = n * zs
    return BirthDeathChain(n=n, lam_plus=lp, lam_minus=lm, label="meanfield")


def rates_lower(n: int, beta: float, phi: PersuasionFunction,
                gamma: float, dbar: float) -> BirthDeathChain:
    """Bottleneck lower-bound chain: the mean-field chain with beta replaced
    by beta * gamma / dbar. Requires gamma <= dbar."""
    if gamma > dbar:
        raise ValueError(f"gamma = {gamma} exceeds dbar = {dbar}")
    chain = rates_meanfield(n, beta * gamma / dbar, phi)
    return BirthDeathChain(n=n, lam_plus=chain.lam_plus, lam_minus=chain.lam_minus,
                           label="cheeger-lower")


def rates_upper(n: int, beta: float, phi: PersuasionFunction,
                delta: float, dbar: float) -> BirthDeathChain:
    """Degree upper-bound chain, N-scaled: lam+(z) = N (Delta/dbar) beta z phi(z),
    lam-(z) = N z. Requires Delta >= dbar."""
    if delta < dbar:
        raise ValueError(f"Delta = {delta} is below dbar = {dbar}")
    zs = np.arange(n + 1) / n
    lp = n * (delta / dbar) * beta * zs * np.asarray(phi(zs))
    lp[n] = 0.0
    lm = n * zs
    return BirthDeathChain(n=n, lam_plus=lp, lam_minus=lm, label="degree-upper")


def _lattice_index(chain: BirthDeathChain, z0: float) -> int:
    k = int(round(z0 * chain.n))
    if abs(k / chain.n - z0) > 1e-9:
        raise ValueError(f"z0 = {z0} is not on the lattice S_{chain.n}")
    return k


def simulate_bd(chain: BirthDeathChain, z0: float, T: float, seed: int,
                sample_stride: int | None = None) -> Trajectory:
    """Exact event-driven trajectory; absorbing at 0 once both rates vanish."""
    k0 = _lattice_index(chain, z0)
    stride = sample_stride if sample_stride else max(1, chain.n // 10)
    grid = np.linspace(0.0, T, _GRID_POINTS)
    kseed = derive_kernel_seed(seed, 0xBD)
    ts, zs, m, absorbed, events = _kernels.bd_simulate(
        chain.lam_plus, chain.lam_minus, k0, float(T), kseed, grid, stride,
        _MAX_EVENT_SAMPLES)
    return Trajectory(times=ts[:m].copy(), z=zs[:m].copy(), xi=None,
                      horizon=float(T),
                      absorbed_at=None if absorbed < 0 else float(absorbed),
                      event_count=int(events), seed=int(seed))


def hitting_prob(chain: BirthDeathChain, start: int, target: int) -> float:
    """Probability of reaching target/N before 0 starting from start/N.

    Solves the first-jump recursion exactly: with P_j the product of the
    rate ratios lam-/lam+ over 1..j, e_k = sum_{j<k} P_j / sum_{j<M} P_j,
    accumulated in log space for stability.
    """
    if not 0 <= start <= target <= chain.n:
        raise ValueError(f"need 0 <= start <= target <= N, got {start}, {target}")
    if target == 0:
        return 1.0 if start == 0 else 0.0
    if start == 0:
        return 0.0
    if start == target:
        return 1.0
    interior = slice(1, target)
    lp = chain.lam_plus[interior]
    lm = chain.lam_minus[interior]
    if (lp == 0.0).any():
        k = int(np.nonzero(lp == 0.0)[0][0]) + 1
        raise UnreachableTargetError(
            f"birth rate vanishes at k = {k}, target {target} unreachable")
    with np.errstate(divide="ignore"):
        log_ratio = np.log(lm) - np.log(lp)
    log_p = np.concatenate([[0.0], np.cumsum(log_ratio)])  # log P_0 .. log P_{M-1}
    log_num = logsumexp(log_p[:start])
    log_den = logsumexp(log_p)
    return float(np.exp(log_num - log_den))


def mc_hitting_prob(chain: BirthDeathChain, start: int, target: int,
                    replicas: int, seed: int) -> float:
    """Monte Carlo estimate of hitting_prob from the embedded jump chain."""
    kseed = derive_kernel_seed(seed, 0xB7)
    hits = _kernels.bd_hit_mc(chain.lam_plus, chain.lam_minus, start, target,
                              replicas, kseed)
    return hits / replicas
