"""HTTP service exposing the simulation and analysis toolkit.

Stateless JSON API: every request carries a full graph description (family +
parameters + seed, or an inline edge list), so results are reproducible from
the request body alone.
"""

from __future__ import annotations

import os
import tempfile
from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__, bounds, dynamics, experiments, meanfield
from .graph import (Graph, GraphError, compute_metrics, graph_from_family,
                    read_edge_list, write_edge_list)
from .persuasion import parse_phi, validate_assumptions

app = FastAPI(title="gossipsim", version=__version__)


# ---------------------------------------------------------------- models

class GraphSpec(BaseModel):
    family: str = Field(description="complete | er | config | ba | torus | file")
    params: dict = Field(default_factory=dict)
    seed: int = 0
    edge_list: Optional[str] = Field(
        default=None, description="inline edge-list text; overrides family")


class HealthResponse(BaseModel):
    status: str
    version: str


class MeanfieldRequest(BaseModel):
    beta: float
    phi: str = "linear"


class MeanfieldResponse(BaseModel):
    regime: int
    beta_star: float
    z_u: Optional[float]
    z_s: Optional[float]
    tangency: bool
    phi_standard: bool
    phi_strong: bool


class MetricsResponse(BaseModel):
    node_count: int
    arc_count: int
    avg_degree: float
    max_degree: int
    has_self_loops: bool
    strongly_connected: bool
    spectral_radius: float
    spectral_residual: float
    spectral_converged: bool
    cheeger: Optional[str]
    cheeger_value: Optional[float]


class GenerateRequest(BaseModel):
    graph: GraphSpec


class GenerateResponse(BaseModel):
    edge_list: str
    metrics: MetricsResponse


class ThresholdsRequest(BaseModel):
    graph: GraphSpec
    beta: float
    phi: str = "linear"


class ThresholdsResponse(BaseModel):
    beta: float
    z_u_prime: Optional[float]
    z_u_dprime: Optional[float]
    z_s_general: Optional[float]
    z_s_gamma: Optional[float]
    regime: str
    gamma_available: bool
    gamma_source: Optional[str]
    metrics: MetricsResponse


class SimulateRequest(BaseModel):
    graph: GraphSpec
    phi: str = "linear"
    beta: float
    z0: float
    T: float
    seed: int
    sample_stride: Optional[int] = None


class SimulateResponse(BaseModel):
    csv: str
    absorbed_at: Optional[float]
    event_count: int
    final_z: float
    final_xi: Optional[float]


class SweepRequest(BaseModel):
    graph: GraphSpec
    phi: str = "linear"
    axis: str
    grid: list[float]
    beta: Optional[float] = None
    z0: Optional[float] = None
    replicas: int = 500
    T: float = 100.0
    seed: int
    regenerate_graph_per_replica: bool = True
    threads: Optional[int] = None


class SweepResponse(BaseModel):
    csv: str
    metadata: dict


# ---------------------------------------------------------------- helpers

def _resolve_graph(spec: GraphSpec) -> Graph:
    if spec.edge_list is not None:
        fd, path = tempfile.mkstemp(suffix=".edges")
        try:
            with os.fdopen(fd, "w") as f:
                f.write(spec.edge_list)
            return read_edge_list(path)
        finally:
            os.unlink(path)
    return graph_from_family(spec.family, spec.params, seed=spec.seed)


def _metrics_response(g: Graph) -> MetricsResponse:
    m = compute_metrics(g)
    return MetricsResponse(
        node_count=g.node_count, arc_count=g.arc_count,
        avg_degree=g.avg_degree, max_degree=g.max_degree,
        has_self_loops=g.has_self_loops,
        strongly_connected=g.strongly_connected,
        spectral_radius=m.spectral_radius,
        spectral_residual=m.spectral_radius_residual,
        spectral_converged=m.spectral_radius_converged,
        cheeger=None if m.cheeger is None else str(m.cheeger),
        cheeger_value=None if m.cheeger is None else float(m.cheeger))


def _bad_request(exc: Exception) -> HTTPException:
    return HTTPException(status_code=400, detail=f"{type(exc).__name__}: {exc}")


# ---------------------------------------------------------------- routes

@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/meanfield", response_model=MeanfieldResponse)
def meanfield_route(req: MeanfieldRequest) -> MeanfieldResponse:
    try:
        phi = parse_phi(req.phi)
        ssa = validate_assumptions(phi)
        rep = meanfield.classify_regime(req.beta, phi)
    except ValueError as exc:
        raise _bad_request(exc)
    return MeanfieldResponse(
        regime=rep.regime, beta_star=rep.beta_star, z_u=rep.z_u, z_s=rep.z_s,
        tangency=bool(rep.tangency), phi_standard=bool(ssa.standard),
        phi_strong=bool(ssa.strong))


@app.post("/graph/generate", response_model=GenerateResponse)
def generate_route(req: GenerateRequest) -> GenerateResponse:
    try:
        g = _resolve_graph(req.graph)
        fd, path = tempfile.mkstemp(suffix=".edges")
        try:
            os.close(fd)
            write_edge_list(g, path)
            with open(path) as f:
                text = f.read()
        finally:
            os.unlink(path)
        return GenerateResponse(edge_list=text, metrics=_metrics_response(g))
    except (GraphError, ValueError) as exc:
        raise _bad_request(exc)


@app.post("/graph/metrics", response_model=MetricsResponse)
def metrics_route(req: GenerateRequest) -> MetricsResponse:
    try:
        return _metrics_response(_resolve_graph(req.graph))
    except (GraphError, ValueError) as exc:
        raise _bad_request(exc)


@app.post("/thresholds", response_model=ThresholdsResponse)
def thresholds_route(req: ThresholdsRequest) -> ThresholdsResponse:
    try:
        g = _resolve_graph(req.graph)
        m = compute_metrics(g)
        phi = parse_phi(req.phi)
        t = bounds.general_thresholds(g, m, req.beta, phi)
    except (GraphError, ValueError) as exc:
        raise _bad_request(exc)
    return ThresholdsResponse(
        beta=t.beta, z_u_prime=t.z_u_prime, z_u_dprime=t.z_u_dprime,
        z_s_general=t.z_s_general, z_s_gamma=t.z_s_gamma, regime=t.regime,
        gamma_available=t.gamma_available, gamma_source=t.gamma_source,
        metrics=_metrics_response(g))


@app.post("/simulate", response_model=SimulateResponse)
def simulate_route(req: SimulateRequest) -> SimulateResponse:
    try:
        g = _resolve_graph(req.graph)
        phi = parse_phi(req.phi)
        init = dynamics.init_config(g.node_count, req.z0, req.seed)
        traj = dynamics.simulate(g, phi, req.beta, init, req.T, req.seed,
                                 sample_stride=req.sample_stride)
    except (GraphError, ValueError) as exc:
        raise _bad_request(exc)
    final_t = traj.times[-1]
    return SimulateResponse(
        csv=traj.to_csv_text(), absorbed_at=traj.absorbed_at,
        event_count=traj.event_count, final_z=float(traj.value_at(final_t)),
        final_xi=None if traj.xi is None else float(traj.xi_at(final_t)))


@app.post("/sweep", response_model=SweepResponse)
def sweep_route(req: SweepRequest) -> SweepResponse:
    try:
        if req.graph.edge_list is not None:
            raise ValueError("sweeps take a graph family, not an inline edge list")
        spec = experiments.SweepSpec(
            family=req.graph.family, family_params=req.graph.params,
            phi_spec=req.phi, axis=req.axis, grid=tuple(req.grid),
            beta=req.beta, z0=req.z0, replicas=req.replicas, T=req.T,
            master_seed=req.seed,
            regenerate_graph_per_replica=req.regenerate_graph_per_replica,
            threads=req.threads)
        result = experiments.run_sweep(spec)
    except (GraphError, ValueError) as exc:
        raise _bad_request(exc)
    return SweepResponse(csv=result.to_csv_text(), metadata=result.provenance)
