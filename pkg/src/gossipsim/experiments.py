"""Monte Carlo phase-diagram sweeps: success probability over a beta or z0
grid, with seeded parallel replicas and CSV persistence.

Seeds are derived from (master_seed, point_index, replica_index), so the
output is byte-identical for any worker count or scheduling order.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import dynamics
from ._rng import derive_kernel_seed
from .graph import Graph, GraphError, graph_from_family
from .persuasion import parse_phi
from .trajectory import Trajectory, write_atomic

__all__ = ["SweepSpec", "SweepPoint", "SweepResult", "run_sweep", "is_success",
           "survivor_final_z", "InsufficientHorizonError",
           "DEFAULT_BETA_GRID", "DEFAULT_Z0_GRID"]

DEFAULT_BETA_GRID = (0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 13.0, 16.0, 20.0)
DEFAULT_Z0_GRID = tuple(round(0.01 * i, 2) for i in range(61))


class InsufficientHorizonError(ValueError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    family: str                     # complete | er | config | ba | torus | file
    family_params: dict
    phi_spec: str
    axis: str                       # "beta" | "z0"
    grid: tuple
    beta: float | None = None       # fixed value when axis == "z0"
    z0: float | None = None         # fixed value when axis == "beta"
    replicas: int = 500
    T: float = 100.0
    master_seed: int = 0
    regenerate_graph_per_replica: bool = True
    threads: int | None = None

    def __post_init__(self):
        if self.axis not in ("beta", "z0"):
            raise ValueError(f"axis must be beta or z0, got {self.axis!r}")
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        if self.T <= 0:
            raise ValueError("T must be > 0")
        grid = tuple(float(v) for v in self.grid)
        if len(grid) == 0 or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("grid must be nonempty and strictly increasing")
        if self.axis == "beta" and self.z0 is None:
            raise ValueError("sweep over beta needs a fixed z0")
        if self.axis == "z0" and self.beta is None:
            raise ValueError("sweep over z0 needs a fixed beta")
        object.__setattr__(self, "grid", grid)

    def to_dict(self) -> dict:
        return {
            "family": self.family, "family_params": self.family_params,
            "phi": self.phi_spec, "axis": self.axis, "grid": list(self.grid),
            "beta": self.beta, "z0": self.z0, "replicas": self.replicas,
            "T": self.T, "master_seed": self.master_seed,
            "regenerate_graph_per_replica": self.regenerate_graph_per_replica,
        }


@dataclass(frozen=True)
class SweepPoint:
    axis_value: float
    successes: int
    replicas: int
    mean_survivor_z: float | None
    mean_absorb_time: float | None
    generation_failures: int = 0


@dataclass(frozen=True)
class SweepResult:
    axis: str
    points: tuple[SweepPoint, ...]
    provenance: dict = field(default_factory=dict)

    def to_csv_text(self) -> str:
        lines = ["axis,value,successes,replicas,mean_survivor_z,mean_absorb_time"]
        for p in self.points:
            sz = "" if p.mean_survivor_z is None else repr(p.mean_survivor_z)
            at = "" if p.mean_absorb_time is None else repr(p.mean_absorb_time)
            lines.append(f"{self.axis},{p.axis_value!r},{p.successes},"
                         f"{p.replicas},{sz},{at}")
        return "\n".join(lines) + "\n"

    def to_csv(self, path, with_metadata: bool = True) -> None:
        write_atomic(path, self.to_csv_text())
        if with_metadata:
            meta = dict(self.provenance)
            meta["generation_failures"] = {
                repr(p.axis_value): p.generation_failures
                for p in self.points if p.generation_failures}
            write_atomic(str(path) + ".meta.json", json.dumps(meta, indent=2) + "\n")


def is_success(traj: Trajectory, T: float) -> bool:
    """Successful iff not absorbed by time T (strictly later counts as alive)."""
    if traj.absorbed_at is None:
        if traj.horizon < T:
            raise InsufficientHorizonError(
                f"trajectory horizon {traj.horizon} < T = {T} and not absorbed")
        return True
    return traj.absorbed_at > T


def survivor_final_z(trajectories, T: float):
    """(mean, min) of Z(T) over successful trajectories; None when no
    trajectory survives."""
    finals = [float(t.value_at(T)) for t in trajectories if is_success(t, T)]
    if not finals:
        return None
    return float(np.mean(finals)), float(min(finals))


def _run_replica(spec: SweepSpec, fixed_graph: Graph | None, point_idx: int,
                 replica_idx: int, beta: float, z0: float):
    if fixed_graph is not None:
        g = fixed_graph
    else:
        gseed = derive_kernel_seed(spec.master_seed, point_idx, replica_idx, 0)
        g = graph_from_family(spec.family, spec.family_params, seed=gseed)
    phi = parse_phi(spec.phi_spec)
    init = dynamics.init_config(
        g.node_count, z0,
        derive_kernel_seed(spec.master_seed, point_idx, replica_idx, 1))
    sim_seed = derive_kernel_seed(spec.master_seed, point_idx, replica_idx, 2)
    traj = dynamics.simulate(g, phi, beta, init, spec.T, sim_seed)
    success = is_success(traj, spec.T)
    final_z = float(traj.value_at(spec.T)) if success else None
    return success, final_z, traj.absorbed_at


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Run the full grid; replicas fan out over threads (the simulator
    kernels release the GIL) and aggregate by index, so the result is
    independent of the execution schedule."""
    random_family = spec.family in ("er", "config", "ba")
    fixed_graph = None
    if not random_family or not spec.regenerate_graph_per_replica:
        fixed_graph = graph_from_family(
            spec.family, spec.family_params,
            seed=derive_kernel_seed(spec.master_seed, 0xF1))

    tasks = []
    for pi, value in enumerate(spec.grid):
        beta = value if spec.axis == "beta" else spec.beta
        z0 = value if spec.axis == "z0" else spec.z0
        for ri in range(spec.replicas):
            tasks.append((pi, ri, float(beta), float(z0)))

    results: dict[tuple[int, int], tuple] = {}
    failures: dict[int, int] = {pi: 0 for pi in range(len(spec.grid))}

    def work(task):
        pi, ri, beta, z0 = task
        try:
            return task, _run_replica(spec, fixed_graph, pi, ri, beta, z0)
        except GraphError as exc:
            return task, exc

    max_workers = spec.threads or 4
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        for task, outcome in pool.map(work, tasks):
            pi, ri = task[0], task[1]
            if isinstance(outcome, GraphError):
                failures[pi] += 1
            else:
                results[(pi, ri)] = outcome

    points = []
    for pi, value in enumerate(spec.grid):
        outcomes = [results[(pi, ri)] for ri in range(spec.replicas)
                    if (pi, ri) in results]
        successes = sum(1 for s, _, _ in outcomes if s)
        survivor_zs = [fz for s, fz, _ in outcomes if s]
        absorb_ts = [at for s, _, at in outcomes if not s and at is not None]
        points.append(SweepPoint(
            axis_value=float(value), successes=successes, replicas=spec.replicas,
            mean_survivor_z=float(np.mean(survivor_zs)) if survivor_zs else None,
            mean_absorb_time=float(np.mean(absorb_ts)) if absorb_ts else None,
            generation_failures=failures[pi]))
    provenance = {"spec": spec.to_dict(), "tool": "gossipsim", "version": "0.1.0"}
    return SweepResult(axis=spec.axis, points=tuple(points), provenance=provenance)
