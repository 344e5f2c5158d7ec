"""Mapping walk trajectories onto complex networks.

A trajectory induces an undirected graph over lattice sites: starting
from the origin vertex, after every step t each site i occupied at t
links to the sites i +- dx occupied at t - 1, where dx is that step's
jump.  The graph only grows, so its statistics form time series that
give a structural, coin-insensitive view of the walk.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .ensemble import TrajectoryRecord
from .observables import DEFAULT_OCCUPANCY_THRESHOLD


class WalkGraph:
    """Simple undirected graph over lattice sites with creation times.

    Starts with the origin vertex at t = 0.  Vertices appear when they
    first participate in an edge; self-loops and duplicate edges are
    impossible by construction.
    """

    def __init__(self):
        self.adjacency: dict[int, set[int]] = {0: set()}
        self.vertex_created: dict[int, int] = {0: 0}
        self.edge_created: dict[tuple[int, int], int] = {}

    @property
    def n_vertices(self) -> int:
        return len(self.adjacency)

    @property
    def n_edges(self) -> int:
        return len(self.edge_created)

    def vertices(self) -> list[int]:
        return sorted(self.adjacency)

    def edges(self) -> list[tuple[int, int]]:
        return sorted(self.edge_created)

    def has_edge(self, i: int, j: int) -> bool:
        key = (i, j) if i <= j else (j, i)
        return key in self.edge_created

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def add_edge(self, i: int, j: int, t: int) -> bool:
        """Add undirected edge (i, j) at time t; returns False if present."""
        if i == j:
            raise ValueError(f"self-loop at site {i} is not allowed")
        key = (i, j) if i < j else (j, i)
        if key in self.edge_created:
            return False
        for v in key:
            if v not in self.adjacency:
                self.adjacency[v] = set()
                self.vertex_created[v] = t
        self.adjacency[i].add(j)
        self.adjacency[j].add(i)
        self.edge_created[key] = t
        return True


def _grow(graph: WalkGraph, record: TrajectoryRecord, t_from: int, t_to: int,
          threshold: float) -> None:
    """Apply the construction rule for steps t_from..t_to inclusive."""
    dists = record.distributions
    for t in range(t_from, t_to + 1):
        dx = int(record.jumps[t - 1])
        cur = dists[t]
        prev = dists[t - 1]
        occupied = cur.positions()[cur.p > threshold]
        prev_mask = prev.p > threshold
        prev_lo = prev.x_min
        prev_n = len(prev.p)
        for sign in (-1, 1):
            targets = occupied + sign * dx
            idx = targets - prev_lo
            valid = (idx >= 0) & (idx < prev_n)
            valid[valid] = prev_mask[idx[valid]]
            for i, j in zip(occupied[valid], targets[valid]):
                graph.add_edge(int(i), int(j), t)


def build_graph(record: TrajectoryRecord,
                threshold: float = DEFAULT_OCCUPANCY_THRESHOLD) -> WalkGraph:
    """Build the cumulative walk graph from a full trajectory.

    The record must carry per-step jumps and per-time distributions
    (run the trajectory with ``record_distributions=True``).
    """
    if record.distributions is None:
        raise ValueError("trajectory record lacks per-time distributions; "
                         "run with record_distributions=True")
    if record.jumps is None or len(record.jumps) != len(record.distributions) - 1:
        raise ValueError("trajectory record lacks a jump value for every step")
    graph = WalkGraph()
    _grow(graph, record, 1, len(record.jumps), threshold)
    return graph


@dataclass
class DegreeStats:
    """Moments and entropy of the degree distribution P(k).

    ``histogram[k]`` is the fraction of vertices with degree k.
    Skewness is the standardized third central moment, undefined
    (None) for a degenerate degree sequence.  Entropy is in nats.
    """

    histogram: np.ndarray
    mean: float
    std: float
    skewness: float | None
    entropy: float


def degree_stats(graph: WalkGraph) -> DegreeStats:
    """Degree-distribution statistics of the graph."""
    degrees = np.array([len(graph.adjacency[v]) for v in graph.vertices()],
                       dtype=np.float64)
    n = len(degrees)
    histogram = np.bincount(degrees.astype(np.int64)) / n
    mean = float(degrees.mean())
    centered = degrees - mean
    std = float(np.sqrt(np.mean(centered ** 2)))
    if std == 0.0:
        skewness = None
    else:
        skewness = float(np.mean(centered ** 3) / std ** 3)
    positive = histogram[histogram > 0]
    entropy = -float(np.dot(positive, np.log(positive)))
    return DegreeStats(histogram=histogram, mean=mean, std=std,
                       skewness=skewness, entropy=entropy)


@dataclass
class StructuralStats:
    """Global graph structure summary.

    Average path length is the mean breadth-first distance over all
    unordered vertex pairs of the largest connected component, None
    when that component has fewer than two vertices.  Assortativity is
    the Pearson correlation of endpoint degrees over directed edges,
    None when the endpoint degrees have zero variance.
    """

    n_vertices: int
    n_edges: int
    avg_path_length: float | None
    assortativity: float | None


def _largest_component(graph: WalkGraph) -> list[int]:
    seen: set[int] = set()
    best: list[int] = []
    for root in graph.adjacency:
        if root in seen:
            continue
        component = [root]
        seen.add(root)
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for u in graph.adjacency[v]:
                if u not in seen:
                    seen.add(u)
                    component.append(u)
                    queue.append(u)
        if len(component) > len(best):
            best = component
    return best


def _avg_path_length(graph: WalkGraph) -> float | None:
    component = _largest_component(graph)
    n = len(component)
    if n < 2:
        return None
    total = 0
    for source in component:
        dist = {source: 0}
        queue = deque([source])
        while queue:
            v = queue.popleft()
            d = dist[v] + 1
            for u in graph.adjacency[v]:
                if u not in dist:
                    dist[u] = d
                    queue.append(u)
        total += sum(dist.values())
    # Each unordered pair was counted once per direction.
    return total / (n * (n - 1))


def _assortativity(graph: WalkGraph) -> float | None:
    if graph.n_edges == 0:
        return None
    x = np.empty(2 * graph.n_edges)
    y = np.empty(2 * graph.n_edges)
    for row, (i, j) in enumerate(graph.edges()):
        di = len(graph.adjacency[i])
        dj = len(graph.adjacency[j])
        x[2 * row], y[2 * row] = di, dj
        x[2 * row + 1], y[2 * row + 1] = dj, di
    xc = x - x.mean()
    yc = y - y.mean()
    denom = np.sqrt(np.dot(xc, xc) * np.dot(yc, yc))
    if denom == 0.0:
        return None
    return float(np.dot(xc, yc) / denom)


def structural_stats(graph: WalkGraph) -> StructuralStats:
    """Vertex/edge counts, average path length and degree assortativity."""
    return StructuralStats(
        n_vertices=graph.n_vertices,
        n_edges=graph.n_edges,
        avg_path_length=_avg_path_length(graph),
        assortativity=_assortativity(graph))


def graph_timeseries(record: TrajectoryRecord, sample_times,
                     threshold: float = DEFAULT_OCCUPANCY_THRESHOLD,
                     ) -> list[tuple[int, DegreeStats, StructuralStats]]:
    """Statistics of the cumulative graph at each requested time.

    ``sample_times`` must be increasing times within [1, t_max]; the
    graph grows monotonically between snapshots.
    """
    if record.distributions is None:
        raise ValueError("trajectory record lacks per-time distributions; "
                         "run with record_distributions=True")
    t_max = len(record.jumps)
    times = [int(t) for t in sample_times]
    if any(t < 1 or t > t_max for t in times):
        raise ValueError(f"sample times must lie in [1, {t_max}]")
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError("sample times must be strictly increasing")
    graph = WalkGraph()
    out = []
    previous = 0
    for t in times:
        _grow(graph, record, previous + 1, t, threshold)
        previous = t
        out.append((t, degree_stats(graph), structural_stats(graph)))
    return out


def edge_list_text(graph: WalkGraph) -> str:
    """Edge list as text, one ``i j t_created`` line per edge.

    Lines are sorted by creation time, then endpoints, so output is
    canonical for a given graph.
    """
    rows = sorted((t, i, j) for (i, j), t in graph.edge_created.items())
    return "".join(f"{i} {j} {t}\n" for t, i, j in rows)
