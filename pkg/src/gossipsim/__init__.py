"""Stochastic gossip-diffusion simulation and analysis on networks.

Core pieces: exact event-driven simulation of the jump Markov chain with a
globally coupled persuasion factor, mean-field ODE and birth-death reductions,
spectral/isoperimetric graph metrics, rigorous threshold formulas, and a
Monte Carlo sweep harness.
"""

from .graph import Graph, GraphMetrics, build_from_arcs, compute_metrics, graph_from_family
from .persuasion import PersuasionFunction, parse_phi, validate_assumptions
from .trajectory import Trajectory

__version__ = "0.1.0"

__all__ = [
    "Graph", "GraphMetrics", "build_from_arcs", "compute_metrics",
    "graph_from_family", "PersuasionFunction", "parse_phi",
    "validate_assumptions", "Trajectory", "__version__",
]
