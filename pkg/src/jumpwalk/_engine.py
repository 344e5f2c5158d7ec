"""Fused trajectory evolution loop.

The public operations in :mod:`jumpwalk.walk` allocate fresh arrays per
step, which is fine for inspection but wasteful inside long runs: for
heavy-tailed kernels the window grows by O(t) sites per step, so a
trajectory touches O(t_max^3) amplitudes overall.  This module drives
the same evolution through a jitted kernel that mixes, shifts and
accumulates the cheap per-step statistics in single passes over
ping-pong buffers sized once from the sampled jump sequence.

Equivalence with the public step operation is pinned by tests against
a dense-unitary oracle; this module must never disagree with
``walk.step`` beyond float roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .exceptions import NumericalInvariantError
from .kernel import KernelTable
from .observables import SpatialDistribution, entropy_of, ipr_of, occupancy_of
from .walk import CoinParams, WalkerState, coin_matrix, initial_state

_NORM_TOL = 1e-10
_EIG_TOL = 1e-10


@njit(cache=True)
def _step_stats(L, R, nL, nR, P, lo, hi, jump, origin,
                c00, c01, c10, c11, want_coin_stats):
    """Coin + shift from window [lo, hi] into [lo - jump, hi + jump].

    Writes the new amplitudes into nL/nR and the new position
    probabilities into P (same absolute indexing), and returns
    (x2, norm, g_a, Re g_ab, Im g_ab) of the new state.  The site
    coordinate of index i is i - origin.
    """
    for i in range(lo, hi + 1):
        l = L[i]
        r = R[i]
        nL[i + jump] = c00 * l + c01 * r
        nR[i - jump] = c10 * l + c11 * r
    for i in range(lo - jump, lo + jump):
        nL[i] = 0.0          # left field starts at lo + jump
    for i in range(hi - jump + 1, hi + jump + 1):
        nR[i] = 0.0          # right field ends at hi - jump
    x2 = 0.0
    norm = 0.0
    g_a = 0.0
    g_re = 0.0
    g_im = 0.0
    for i in range(lo - jump, hi + jump + 1):
        l = nL[i]
        r = nR[i]
        pl = l.real * l.real + l.imag * l.imag
        pr = r.real * r.real + r.imag * r.imag
        p = pl + pr
        P[i] = p
        x = float(i - origin)
        x2 += x * x * p
        norm += p
        if want_coin_stats:
            g_a += pl
            g = l * np.conj(r)
            g_re += g.real
            g_im += g.imag
    return x2, norm, g_a, g_re, g_im


def sample_jumps(table: KernelTable, t_max: int, rng: np.random.Generator) -> np.ndarray:
    """Jump lengths for steps 1..t_max; step s draws on horizon {1..s}.

    Consumes exactly t_max uniforms from ``rng`` in step order, so the
    sequence is a pure function of the stream state.  The first entry
    is always 1: the horizon of step 1 is the single point {1}.
    """
    us = rng.random(t_max)
    jumps = np.empty(t_max, dtype=np.int64)
    for s in range(1, t_max + 1):
        jumps[s - 1] = table.sample(s, us[s - 1])
    return jumps


@dataclass
class TrajectoryData:
    """Raw per-step series produced by :func:`evolve`."""

    jumps: np.ndarray
    variance: np.ndarray
    entanglement: np.ndarray | None
    entropy: np.ndarray | None
    ipr: np.ndarray | None
    occupancy: np.ndarray | None
    final_state: WalkerState
    max_norm_error: float
    distributions: list[SpatialDistribution] | None = field(default=None)


def evolve(coin: CoinParams, jumps: np.ndarray, *,
           occupancy_threshold: float,
           want_coin_stats: bool = True,
           want_dist_stats: bool = True,
           record_distributions: bool = False,
           distribution_hook=None) -> TrajectoryData:
    """Run one trajectory along a fixed jump sequence.

    ``want_coin_stats`` controls the entanglement series,
    ``want_dist_stats`` the entropy/IPR/occupancy series.
    ``distribution_hook(t, p, x_min)`` is called after every step with
    a view of the position probabilities (valid only during the call).
    Raises :class:`NumericalInvariantError` if the norm drifts beyond
    1e-10 or the coin density matrix leaves the physical region.
    """
    t_max = len(jumps)
    span = int(jumps.sum())
    cap = 2 * span + 1
    bufs_l = (np.zeros(cap, dtype=np.complex128), np.zeros(cap, dtype=np.complex128))
    bufs_r = (np.zeros(cap, dtype=np.complex128), np.zeros(cap, dtype=np.complex128))
    prob = np.empty(cap, dtype=np.float64)
    start = initial_state(coin)
    bufs_l[0][span] = start.psi_l[0]
    bufs_r[0][span] = start.psi_r[0]
    matrix = coin_matrix(coin)
    c00, c01 = matrix[0, 0], matrix[0, 1]
    c10, c11 = matrix[1, 0], matrix[1, 1]

    variance = np.empty(t_max)
    entanglement = np.empty(t_max) if want_coin_stats else None
    entropy = np.empty(t_max) if want_dist_stats else None
    ipr_series = np.empty(t_max) if want_dist_stats else None
    occ_series = np.empty(t_max, dtype=np.int64) if want_dist_stats else None
    distributions: list[SpatialDistribution] | None = None
    if record_distributions:
        distributions = [SpatialDistribution(p=np.array([1.0]), x_min=0, t=0)]

    lo = hi = span
    cur = 0
    max_norm_error = 0.0
    for t in range(1, t_max + 1):
        jump = int(jumps[t - 1])
        x2, norm, g_a, g_re, g_im = _step_stats(
            bufs_l[cur], bufs_r[cur], bufs_l[1 - cur], bufs_r[1 - cur], prob,
            lo, hi, jump, span, c00, c01, c10, c11, want_coin_stats)
        lo -= jump
        hi += jump
        cur = 1 - cur
        norm_error = abs(norm - 1.0)
        if norm_error > _NORM_TOL:
            raise NumericalInvariantError(
                f"norm deviation {norm_error:.3e} at t={t} exceeds {_NORM_TOL}")
        max_norm_error = max(max_norm_error, norm_error)
        variance[t - 1] = x2
        if want_coin_stats:
            g_b = 1.0 - g_a
            arg = 1.0 - 4.0 * g_a * g_b + 4.0 * (g_re * g_re + g_im * g_im)
            if arg < -_EIG_TOL or arg > 1.0 + _EIG_TOL:
                raise NumericalInvariantError(
                    f"eigenvalue discriminant {arg} outside [0, 1] at t={t}")
            root = np.sqrt(min(max(arg, 0.0), 1.0))
            s_e = 0.0
            for lam in ((1.0 - root) / 2.0, (1.0 + root) / 2.0):
                if lam > 0.0:
                    s_e -= lam * np.log2(lam)
            entanglement[t - 1] = s_e
        window = prob[lo:hi + 1]
        if want_dist_stats:
            entropy[t - 1] = entropy_of(window)
            ipr_series[t - 1] = ipr_of(window)
            occ_series[t - 1] = occupancy_of(window, occupancy_threshold)
        if record_distributions:
            distributions.append(SpatialDistribution(
                p=window.copy(), x_min=lo - span, t=t))
        if distribution_hook is not None:
            distribution_hook(t, window, lo - span)

    final_state = WalkerState(
        psi_l=bufs_l[cur][lo:hi + 1].copy(),
        psi_r=bufs_r[cur][lo:hi + 1].copy(),
        x_min=lo - span, t=t_max)
    return TrajectoryData(
        jumps=jumps, variance=variance, entanglement=entanglement,
        entropy=entropy, ipr=ipr_series, occupancy=occ_series,
        final_state=final_state, max_norm_error=max_norm_error,
        distributions=distributions)
