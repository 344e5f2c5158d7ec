"""Seeded trajectory ensembles and their aggregated observables.

Each trajectory owns a private random stream derived from the master
seed and its index, so results are reproducible bit-for-bit at any
parallelism degree.  Aggregation runs over fixed-size trajectory
blocks whose partial sums are combined in block order, which pins the
floating-point summation tree independently of the worker count.

Two averaging modes are supported.  ``"distributions"`` (default)
averages the position distribution over trajectories at every time and
evaluates entropy, participation ratio and occupancy on that mean,
while variance and coin entanglement stay per-trajectory means.
``"observables"`` averages every per-trajectory observable directly.
With one trajectory the modes coincide.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from itertools import repeat

import numpy as np

from . import observables as obs
from ._engine import evolve, sample_jumps
from .kernel import KernelTable, Q_MIN
from .observables import SpatialDistribution
from .walk import COIN_FAMILIES, CoinParams

AVERAGING_MODES = ("distributions", "observables")

# Trajectories per aggregation block.  Fixed so that the reduction tree
# (hence every output byte) is independent of the parallelism degree.
_BLOCK_SIZE = 8


@dataclass(frozen=True)
class RunConfig:
    """Full description of a simulation run.

    theta and phi are radians; ``phi=None`` selects the per-family
    default phase that symmetrizes the walk.  ``entropy_base=None``
    keeps position entropies in nats.
    """

    q: float
    coin: str = "H"
    theta: float = math.pi / 4
    phi: float | None = None
    t_max: int = 1000
    n_trajectories: int = 1
    seed: int = 0
    averaging: str = "distributions"
    occupancy_threshold: float = obs.DEFAULT_OCCUPANCY_THRESHOLD
    entropy_base: float | None = None
    fit_window: tuple[float, float] = (0.1, 1.0)

    def __post_init__(self):
        if self.q < Q_MIN:
            raise ValueError(f"q must be >= {Q_MIN}, got {self.q}")
        if self.coin not in COIN_FAMILIES:
            raise ValueError(f"coin must be one of {COIN_FAMILIES}, got {self.coin!r}")
        if self.t_max < 2:
            raise ValueError(f"t_max must be >= 2, got {self.t_max}")
        if self.n_trajectories < 1:
            raise ValueError(f"n_trajectories must be >= 1, got {self.n_trajectories}")
        if self.averaging not in AVERAGING_MODES:
            raise ValueError(f"averaging must be one of {AVERAGING_MODES}, "
                             f"got {self.averaging!r}")
        if self.occupancy_threshold <= 0:
            raise ValueError("occupancy_threshold must be positive")
        lo, hi = self.fit_window
        if not (0 <= lo < hi <= 1):
            raise ValueError(f"fit_window must satisfy 0 <= lo < hi <= 1, got {self.fit_window}")
        object.__setattr__(self, "fit_window", (float(lo), float(hi)))

    @property
    def coin_params(self) -> CoinParams:
        return CoinParams(family=self.coin, theta=self.theta, phi=self.phi)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = list(value) if isinstance(value, tuple) else value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        if "fit_window" in data:
            data["fit_window"] = tuple(data["fit_window"])
        return cls(**data)


def trajectory_rng(seed: int, index: int) -> np.random.Generator:
    """Private random stream for one trajectory.

    Counter-based derivation: the master seed is the entropy and the
    trajectory index the spawn key, so streams are independent and do
    not depend on scheduling.
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


@dataclass
class TrajectoryRecord:
    """One stochastic realization with its per-time observables.

    ``jumps[s-1]`` is the displacement used by step s (the first entry
    is always 1).  Series are indexed by t = 1..t_max.  When built with
    ``record_distributions=True``, ``distributions[t]`` holds P_t(x)
    for t = 0..t_max.
    """

    config: RunConfig
    index: int
    jumps: np.ndarray
    variance: np.ndarray
    entropy: np.ndarray
    ipr: np.ndarray
    occupancy: np.ndarray
    entanglement: np.ndarray
    final_distribution: SpatialDistribution
    max_norm_error: float
    distributions: list[SpatialDistribution] | None = None


def run_trajectory(config: RunConfig, index: int = 0,
                   record_distributions: bool = False) -> TrajectoryRecord:
    """Run trajectory ``index`` of the ensemble described by ``config``."""
    rng = trajectory_rng(config.seed, index)
    table = KernelTable(config.q, config.t_max)
    jumps = sample_jumps(table, config.t_max, rng)
    data = evolve(config.coin_params, jumps,
                  occupancy_threshold=config.occupancy_threshold,
                  record_distributions=record_distributions)
    entropy = data.entropy
    if config.entropy_base is not None:
        entropy = entropy / math.log(config.entropy_base)
    return TrajectoryRecord(
        config=config, index=index, jumps=jumps,
        variance=data.variance, entropy=entropy, ipr=data.ipr,
        occupancy=data.occupancy.astype(np.float64),
        entanglement=data.entanglement,
        final_distribution=obs.distribution(data.final_state),
        max_norm_error=data.max_norm_error,
        distributions=data.distributions)


class _DistSum:
    """Running sum of distributions on a growing union window."""

    __slots__ = ("p", "x_min")

    def __init__(self):
        self.p = None
        self.x_min = 0

    def add(self, p: np.ndarray, x_min: int) -> None:
        if self.p is None:
            self.p = p.copy()
            self.x_min = x_min
            return
        lo = min(self.x_min, x_min)
        hi = max(self.x_min + len(self.p), x_min + len(p))
        if lo < self.x_min or hi > self.x_min + len(self.p):
            grown = np.zeros(hi - lo)
            grown[self.x_min - lo: self.x_min - lo + len(self.p)] = self.p
            self.p = grown
            self.x_min = lo
        off = x_min - self.x_min
        self.p[off: off + len(p)] += p

    def merge(self, other: "_DistSum") -> None:
        if other.p is not None:
            self.add(other.p, other.x_min)

    def mean(self, n: int, t: int) -> SpatialDistribution:
        return SpatialDistribution(p=self.p / n, x_min=self.x_min, t=t)


class _DistAccumulator:
    """Per-time distribution sums across trajectories."""

    def __init__(self, t_max: int):
        self.slots = [_DistSum() for _ in range(t_max)]

    def hook(self, t: int, p: np.ndarray, x_min: int) -> None:
        self.slots[t - 1].add(p, x_min)

    def merge(self, other: "_DistAccumulator") -> None:
        for mine, theirs in zip(self.slots, other.slots):
            mine.merge(theirs)


@dataclass
class _BlockResult:
    variance: np.ndarray                      # (block, t_max)
    entanglement: np.ndarray                  # (block, t_max)
    entropy: np.ndarray | None                # observables mode only
    ipr: np.ndarray | None
    occupancy: np.ndarray | None
    final_sum: _DistSum
    dist_acc: _DistAccumulator | None         # distributions mode only
    max_norm_error: float


def _per_trajectory_stats(config: RunConfig) -> bool:
    """Whether per-trajectory entropy/IPR/occupancy series are kept.

    True in observables mode, and also for a single trajectory: there
    the mean distribution equals the trajectory's own distribution
    bit for bit, so both modes share one code path and coincide
    exactly.
    """
    return config.averaging == "observables" or config.n_trajectories == 1


def _run_block(config: RunConfig, start: int, stop: int) -> _BlockResult:
    """Run trajectories [start, stop) and aggregate them block-locally."""
    keep_series = _per_trajectory_stats(config)
    n = stop - start
    t_max = config.t_max
    variance = np.empty((n, t_max))
    entanglement = np.empty((n, t_max))
    entropy = np.empty((n, t_max)) if keep_series else None
    ipr_rows = np.empty((n, t_max)) if keep_series else None
    occ_rows = np.empty((n, t_max)) if keep_series else None
    final_sum = _DistSum()
    dist_acc = None if keep_series else _DistAccumulator(t_max)
    max_norm_error = 0.0
    table = KernelTable(config.q, t_max)
    for row, index in enumerate(range(start, stop)):
        rng = trajectory_rng(config.seed, index)
        jumps = sample_jumps(table, t_max, rng)
        data = evolve(config.coin_params, jumps,
                      occupancy_threshold=config.occupancy_threshold,
                      want_dist_stats=keep_series,
                      distribution_hook=None if keep_series else dist_acc.hook)
        variance[row] = data.variance
        entanglement[row] = data.entanglement
        if keep_series:
            entropy[row] = data.entropy
            ipr_rows[row] = data.ipr
            occ_rows[row] = data.occupancy
        dist = obs.distribution(data.final_state)
        final_sum.add(dist.p, dist.x_min)
        max_norm_error = max(max_norm_error, data.max_norm_error)
    return _BlockResult(variance=variance, entanglement=entanglement,
                        entropy=entropy, ipr=ipr_rows, occupancy=occ_rows,
                        final_sum=final_sum, dist_acc=dist_acc,
                        max_norm_error=max_norm_error)


@dataclass
class EnsembleResult:
    """Aggregated series (indexed by t = 1..t_max) and summary values."""

    config: RunConfig
    times: np.ndarray
    variance_mean: np.ndarray
    variance_se: np.ndarray
    entropy_mean: np.ndarray
    entropy_se: np.ndarray
    ipr_mean: np.ndarray
    ipr_se: np.ndarray
    occupancy_mean: np.ndarray
    occupancy_se: np.ndarray
    entanglement_mean: np.ndarray
    entanglement_se: np.ndarray
    alpha: float
    alpha_se: float
    final_distribution: SpatialDistribution
    max_norm_error: float


def _blocks(n: int) -> list[tuple[int, int]]:
    return [(s, min(s + _BLOCK_SIZE, n)) for s in range(0, n, _BLOCK_SIZE)]


def _map_blocks(fn, config: RunConfig, workers: int):
    """Yield fn(config, start, stop) per block, in block order."""
    blocks = _blocks(config.n_trajectories)
    if workers <= 1 or len(blocks) == 1:
        for start, stop in blocks:
            yield fn(config, start, stop)
        return
    with ProcessPoolExecutor(max_workers=min(workers, len(blocks))) as pool:
        yield from pool.map(fn, repeat(config), *zip(*blocks))


def _mean_se(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = rows.shape[0]
    mean = rows.mean(axis=0)
    if n == 1:
        return mean, np.zeros_like(mean)
    return mean, rows.std(axis=0, ddof=1) / math.sqrt(n)


def run_ensemble(config: RunConfig, workers: int = 1) -> EnsembleResult:
    """Run the configured ensemble and aggregate its observables.

    ``workers`` sets the number of worker processes; any value produces
    byte-identical results.
    """
    n = config.n_trajectories
    t_max = config.t_max
    keep_series = _per_trajectory_stats(config)

    var_rows = []
    ent_rows = []
    obs_rows = {"entropy": [], "ipr": [], "occupancy": []}
    final_sum = _DistSum()
    dist_acc = None if keep_series else _DistAccumulator(t_max)
    max_norm_error = 0.0
    for block in _map_blocks(_run_block, config, workers):
        var_rows.append(block.variance)
        ent_rows.append(block.entanglement)
        if keep_series:
            obs_rows["entropy"].append(block.entropy)
            obs_rows["ipr"].append(block.ipr)
            obs_rows["occupancy"].append(block.occupancy)
        else:
            dist_acc.merge(block.dist_acc)
        final_sum.merge(block.final_sum)
        max_norm_error = max(max_norm_error, block.max_norm_error)

    variance = np.vstack(var_rows)
    entanglement = np.vstack(ent_rows)
    variance_mean, variance_se = _mean_se(variance)
    entanglement_mean, entanglement_se = _mean_se(entanglement)

    log_scale = math.log(config.entropy_base) if config.entropy_base is not None else 1.0
    if keep_series:
        entropy_mean, entropy_se = _mean_se(np.vstack(obs_rows["entropy"]))
        entropy_mean = entropy_mean / log_scale
        entropy_se = entropy_se / log_scale
        ipr_mean, ipr_se = _mean_se(np.vstack(obs_rows["ipr"]))
        occupancy_mean, occupancy_se = _mean_se(np.vstack(obs_rows["occupancy"]))
    else:
        # Plug-in statistics of the mean distribution: deterministic
        # functions of the run, reported with zero standard error.
        entropy_mean = np.empty(t_max)
        ipr_mean = np.empty(t_max)
        occupancy_mean = np.empty(t_max)
        for i, slot in enumerate(dist_acc.slots):
            mean_dist = slot.mean(n, i + 1)
            entropy_mean[i] = obs.shannon_entropy(mean_dist) / log_scale
            ipr_mean[i] = obs.ipr(mean_dist)
            occupancy_mean[i] = obs.occupancy(mean_dist, config.occupancy_threshold)
        entropy_se = np.zeros(t_max)
        ipr_se = np.zeros(t_max)
        occupancy_se = np.zeros(t_max)

    times = np.arange(1, t_max + 1, dtype=np.float64)
    try:
        alpha = obs.fit_alpha(times, variance_mean, config.fit_window)
        if n > 1:
            alphas = np.array([obs.fit_alpha(times, variance[i], config.fit_window)
                               for i in range(n)])
            alpha_se = float(alphas.std(ddof=1) / math.sqrt(n))
        else:
            alpha_se = 0.0
    except ValueError:
        # Runs too short for the fit window still aggregate fine.
        alpha = math.nan
        alpha_se = math.nan

    return EnsembleResult(
        config=config, times=times,
        variance_mean=variance_mean, variance_se=variance_se,
        entropy_mean=entropy_mean, entropy_se=entropy_se,
        ipr_mean=ipr_mean, ipr_se=ipr_se,
        occupancy_mean=occupancy_mean, occupancy_se=occupancy_se,
        entanglement_mean=entanglement_mean, entanglement_se=entanglement_se,
        alpha=alpha, alpha_se=alpha_se,
        final_distribution=final_sum.mean(n, t_max),
        max_norm_error=max_norm_error)


def _coin_pair(config: RunConfig) -> tuple[CoinParams, CoinParams]:
    return (CoinParams("H", config.theta, config.phi),
            CoinParams("K", config.theta, config.phi))


def _jsd_block(config: RunConfig, start: int, stop: int):
    """Per-block H-vs-K comparison with shared jump sequences."""
    per_observable = config.averaging == "observables"
    t_max = config.t_max
    coin_h, coin_k = _coin_pair(config)
    table = KernelTable(config.q, t_max)
    if per_observable:
        rows = np.empty((stop - start, t_max))
        for row, index in enumerate(range(start, stop)):
            rng = trajectory_rng(config.seed, index)
            jumps = sample_jumps(table, t_max, rng)
            data_h = evolve(coin_h, jumps,
                            occupancy_threshold=config.occupancy_threshold,
                            want_coin_stats=False, want_dist_stats=False,
                            record_distributions=True)
            series = np.empty(t_max)

            def against_h(t, p, x_min, dists=data_h.distributions, out=series):
                out[t - 1] = obs.jsd(dists[t], SpatialDistribution(p=p, x_min=x_min, t=t))

            evolve(coin_k, jumps,
                   occupancy_threshold=config.occupancy_threshold,
                   want_coin_stats=False, want_dist_stats=False,
                   distribution_hook=against_h)
            rows[row] = series
        return rows
    acc_h = _DistAccumulator(t_max)
    acc_k = _DistAccumulator(t_max)
    for index in range(start, stop):
        rng = trajectory_rng(config.seed, index)
        jumps = sample_jumps(table, t_max, rng)
        evolve(coin_h, jumps, occupancy_threshold=config.occupancy_threshold,
               want_coin_stats=False, want_dist_stats=False, distribution_hook=acc_h.hook)
        evolve(coin_k, jumps, occupancy_threshold=config.occupancy_threshold,
               want_coin_stats=False, want_dist_stats=False, distribution_hook=acc_k.hook)
    return acc_h, acc_k


def jsd_series(config: RunConfig, workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Jensen-Shannon dissimilarity between the H and K walks over time.

    Both walks share the jump sequence of each trajectory index (the
    kernel stream does not depend on the coin), so the comparison
    isolates the coin's effect.  Returns ``(times, jsd_values)``
    following the configured averaging mode; ``config.coin`` is
    ignored.
    """
    n = config.n_trajectories
    t_max = config.t_max
    times = np.arange(1, t_max + 1, dtype=np.float64)
    if config.averaging == "observables":
        rows = [r for r in _map_blocks(_jsd_block, config, workers)]
        return times, np.vstack(rows).mean(axis=0)
    acc_h = _DistAccumulator(t_max)
    acc_k = _DistAccumulator(t_max)
    for block_h, block_k in _map_blocks(_jsd_block, config, workers):
        acc_h.merge(block_h)
        acc_k.merge(block_k)
    values = np.empty(t_max)
    for i in range(t_max):
        values[i] = obs.jsd(acc_h.slots[i].mean(n, i + 1), acc_k.slots[i].mean(n, i + 1))
    return times, values


@dataclass
class SweepPoint:
    """One grid point of a regime sweep, summarized at t_max."""

    q: float
    theta: float
    coin: str
    alpha: float
    alpha_se: float
    variance: float
    entropy: float
    ipr: float
    occupancy: float
    entanglement: float
    jsd: float = math.nan


def sweep(config: RunConfig, qs, thetas, coins=("H", "K"),
          workers: int = 1) -> list[SweepPoint]:
    """Run an ensemble per (q, theta, coin) grid point.

    Rows are emitted in grid order and are independent of each other;
    every point reuses the template's master seed, so H and K rows of
    the same point share jump sequences.  When both coin families are
    present the ``jsd`` column holds the dissimilarity between their
    final mean distributions.
    """
    qs = list(qs)
    thetas = list(thetas)
    coins = list(coins)
    if not qs or not thetas or not coins:
        raise ValueError("sweep grid must be nonempty in q, theta and coin")
    points = []
    for q in qs:
        for theta in thetas:
            results = {}
            for coin in coins:
                cfg = replace(config, q=q, theta=theta, coin=coin)
                results[coin] = run_ensemble(cfg, workers=workers)
            pair_jsd = math.nan
            if "H" in results and "K" in results:
                pair_jsd = obs.jsd(results["H"].final_distribution,
                                   results["K"].final_distribution)
            for coin in coins:
                res = results[coin]
                points.append(SweepPoint(
                    q=float(q), theta=float(theta), coin=coin,
                    alpha=res.alpha, alpha_se=res.alpha_se,
                    variance=float(res.variance_mean[-1]),
                    entropy=float(res.entropy_mean[-1]),
                    ipr=float(res.ipr_mean[-1]),
                    occupancy=float(res.occupancy_mean[-1]),
                    entanglement=float(res.entanglement_mean[-1]),
                    jsd=pair_jsd))
    return points
