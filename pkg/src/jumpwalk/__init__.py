"""Discrete-time coined quantum walk with q-exponential time-dependent jumps.

The step length at time t is drawn from a q-exponential distribution
over {1..t}, interpolating between the standard nearest-neighbour walk
(q = 1/2) and uniformly random long-range hops (q -> inf).  The package
simulates seeded trajectory ensembles, measures spreading, localization
and coin-space entanglement, fits diffusion exponents, and maps
trajectories onto complex networks.
"""

__version__ = "0.1.0"

from .exceptions import NumericalInvariantError
from .kernel import KernelTable, MemoryKernel, kernel_sample, kernel_weights
from .walk import (COIN_FAMILIES, CoinParams, WalkerState, apply_coin,
                   apply_shift, coin_matrix, initial_state, step)
from .observables import (DEFAULT_OCCUPANCY_THRESHOLD, ReducedDensityMatrix,
                          SpatialDistribution, distribution,
                          entanglement_entropy, fit_alpha, first_moment, ipr,
                          jsd, kld, occupancy, reduced_density, rqd_profile,
                          second_moment, shannon_entropy)
from .ensemble import (AVERAGING_MODES, EnsembleResult, RunConfig, SweepPoint,
                       TrajectoryRecord, jsd_series, run_ensemble,
                       run_trajectory, sweep, trajectory_rng)
from .netmap import (DegreeStats, StructuralStats, WalkGraph, build_graph,
                     degree_stats, edge_list_text, graph_timeseries,
                     structural_stats)

__all__ = [
    "__version__",
    "NumericalInvariantError",
    "KernelTable", "MemoryKernel", "kernel_sample", "kernel_weights",
    "COIN_FAMILIES", "CoinParams", "WalkerState", "apply_coin", "apply_shift",
    "coin_matrix", "initial_state", "step",
    "DEFAULT_OCCUPANCY_THRESHOLD", "ReducedDensityMatrix",
    "SpatialDistribution", "distribution", "entanglement_entropy",
    "fit_alpha", "first_moment", "ipr", "jsd", "kld", "occupancy",
    "reduced_density", "rqd_profile", "second_moment", "shannon_entropy",
    "AVERAGING_MODES", "EnsembleResult", "RunConfig", "SweepPoint",
    "TrajectoryRecord", "jsd_series", "run_ensemble", "run_trajectory",
    "sweep", "trajectory_rng",
    "DegreeStats", "StructuralStats", "WalkGraph", "build_graph",
    "degree_stats", "edge_list_text", "graph_timeseries", "structural_stats",
]
