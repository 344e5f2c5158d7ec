"""Measurements on walker states and position distributions.

Covers the spreading diagnostics (second moment, sitewise quadratic
deviation, diffusion-exponent fit), the localization measures (Shannon
entropy, inverse participation ratio, occupancy), distribution
comparison (Kullback-Leibler and Jensen-Shannon, base-2), and the
coin-space entanglement entropy from the reduced 2x2 density matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NumericalInvariantError
from .walk import WalkerState

# Sites count as occupied when their probability exceeds this.
DEFAULT_OCCUPANCY_THRESHOLD = 1e-9

# Slack allowed on the closed-form eigenvalue argument before the
# computation is declared inconsistent.
_EIG_TOL = 1e-10


@dataclass
class SpatialDistribution:
    """Position probabilities ``p[i]`` at sites ``x_min + i`` at time t."""

    p: np.ndarray
    x_min: int
    t: int = 0

    def positions(self) -> np.ndarray:
        return np.arange(self.x_min, self.x_min + len(self.p))


def distribution(state: WalkerState) -> SpatialDistribution:
    """P_t(x) = |psi_l(x)|^2 + |psi_r(x)|^2."""
    l, r = state.psi_l, state.psi_r
    p = l.real**2 + l.imag**2 + r.real**2 + r.imag**2
    return SpatialDistribution(p=p, x_min=state.x_min, t=state.t)


def first_moment(dist: SpatialDistribution) -> float:
    """Mean position sum_x x P(x)."""
    return float(np.dot(dist.positions().astype(np.float64), dist.p))


def second_moment(dist: SpatialDistribution) -> float:
    """Mean squared position sum_x x^2 P(x)."""
    x = dist.positions().astype(np.float64)
    return float(np.dot(x * x, dist.p))


def rqd_profile(dist: SpatialDistribution) -> np.ndarray:
    """Sitewise quadratic deviation (x - mean)^2 P(x).

    Sums to the variance; a local map of which sites drive spreading.
    """
    x = dist.positions().astype(np.float64)
    dx = x - first_moment(dist)
    return dx * dx * dist.p


def entropy_of(p: np.ndarray) -> float:
    """-sum p ln p over an array of probabilities, with 0 ln 0 = 0."""
    positive = p[p > 0]
    return -float(np.dot(positive, np.log(positive)))


def ipr_of(p: np.ndarray) -> float:
    return 1.0 / float(np.dot(p, p))


def occupancy_of(p: np.ndarray, threshold: float) -> int:
    return int(np.count_nonzero(p > threshold))


def shannon_entropy(dist: SpatialDistribution, base: float | None = None) -> float:
    """Position entropy -sum_x P log P with 0 log 0 = 0.

    Natural logarithm by default; pass ``base`` to rescale (for example
    ``base=2`` for bits).
    """
    s = entropy_of(dist.p)
    if base is not None:
        s /= np.log(base)
    return s


def ipr(dist: SpatialDistribution) -> float:
    """Inverse participation ratio 1 / sum_x P(x)^2.

    Ranges from 1 (single site) to the window size (uniform).
    """
    return ipr_of(dist.p)


def occupancy(dist: SpatialDistribution,
              threshold: float = DEFAULT_OCCUPANCY_THRESHOLD) -> int:
    """Number of sites with probability above ``threshold``."""
    if threshold <= 0:
        raise ValueError(f"occupancy threshold must be positive, got {threshold}")
    return occupancy_of(dist.p, threshold)


def _union_window(a: SpatialDistribution, b: SpatialDistribution) -> tuple[np.ndarray, np.ndarray]:
    """Embed both probability vectors on the union of their windows."""
    lo = min(a.x_min, b.x_min)
    hi = max(a.x_min + len(a.p), b.x_min + len(b.p))
    pa = np.zeros(hi - lo)
    pb = np.zeros(hi - lo)
    pa[a.x_min - lo: a.x_min - lo + len(a.p)] = a.p
    pb[b.x_min - lo: b.x_min - lo + len(b.p)] = b.p
    return pa, pb


def _kld_arrays(u: np.ndarray, w: np.ndarray) -> float:
    mask = u > 0
    if np.any(w[mask] == 0):
        raise ValueError("KLD undefined: reference assigns zero probability "
                         "to a point with positive mass")
    um = u[mask]
    return float(np.dot(um, np.log2(um / w[mask])))


def kld(u: SpatialDistribution, w: SpatialDistribution) -> float:
    """Kullback-Leibler dissimilarity sum_x U log2(U/W), in bits.

    Terms with U(x) = 0 contribute zero; raises if W vanishes anywhere
    U does not.
    """
    pu, pw = _union_window(u, w)
    return _kld_arrays(pu, pw)


def jsd(a: SpatialDistribution, b: SpatialDistribution) -> float:
    """Jensen-Shannon dissimilarity between two distributions, in bits.

    Symmetrized KLD against the pointwise midpoint, formed on the union
    of the two supports so differing domains stay commensurable.
    Bounded in [0, 1]; 0 for identical inputs, 1 for disjoint supports.
    """
    pa, pb = _union_window(a, b)
    m = 0.5 * (pa + pb)
    return 0.5 * (_kld_arrays(pa, m) + _kld_arrays(pb, m))


@dataclass
class ReducedDensityMatrix:
    """Reduced coin density matrix [[g_a, g_ab], [conj(g_ab), g_b]].

    g_a and g_b are the total left/right component weights and g_ab the
    cross overlap sum_x psi_l(x) conj(psi_r(x)).
    """

    g_a: float
    g_b: float
    g_ab: complex

    def eigenvalues(self) -> tuple[float, float]:
        """(lambda_minus, lambda_plus) from the closed form.

        lambda_pm = 1/2 +- 1/2 sqrt(1 - 4 g_a g_b + 4 |g_ab|^2).
        The argument is clamped to [0, 1] when within 1e-10 of either
        boundary and rejected as inconsistent beyond that.
        """
        arg = 1.0 - 4.0 * self.g_a * self.g_b + 4.0 * abs(self.g_ab) ** 2
        if arg < -_EIG_TOL or arg > 1.0 + _EIG_TOL:
            raise NumericalInvariantError(
                f"eigenvalue discriminant {arg} outside [0, 1]")
        root = np.sqrt(min(max(arg, 0.0), 1.0))
        return (1.0 - root) / 2.0, (1.0 + root) / 2.0


def reduced_density(state: WalkerState) -> ReducedDensityMatrix:
    """Trace out position, keeping the 2x2 coin-space density matrix."""
    l, r = state.psi_l, state.psi_r
    g_a = float(np.dot(l.real, l.real) + np.dot(l.imag, l.imag))
    g_b = float(np.dot(r.real, r.real) + np.dot(r.imag, r.imag))
    g_ab = complex(np.dot(l, r.conj()))
    return ReducedDensityMatrix(g_a=g_a, g_b=g_b, g_ab=g_ab)


def entanglement_entropy(rdm: ReducedDensityMatrix) -> float:
    """Von Neumann entropy of the coin, in bits: -sum lambda log2 lambda.

    0 for a separable (pure-coin) state, 1 for a maximally mixed coin.
    """
    lo, hi = rdm.eigenvalues()
    s = 0.0
    for lam in (lo, hi):
        if lam > 0:
            s -= lam * np.log2(lam)
    return s


def fit_alpha(times: np.ndarray, values: np.ndarray,
              window: tuple[float, float] = (0.1, 1.0)) -> float:
    """Diffusion exponent: least-squares slope of log(values) vs log(times).

    ``window`` gives the fitted fraction of the time axis as
    (lo, hi) multiples of ``times[-1]``; the default keeps the last
    decade.  Requires at least 10 points in the window and strictly
    positive values there.
    """
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if times.shape != values.shape or times.ndim != 1:
        raise ValueError("times and values must be 1-d arrays of equal length")
    lo, hi = window
    t_end = times[-1]
    mask = (times >= lo * t_end) & (times <= hi * t_end)
    if int(mask.sum()) < 10:
        raise ValueError(f"fit window contains {int(mask.sum())} points; need >= 10")
    v = values[mask]
    if np.any(v <= 0):
        raise ValueError("fit window contains nonpositive variance values")
    lt = np.log(times[mask])
    lv = np.log(v)
    lt_c = lt - lt.mean()
    return float(np.dot(lt_c, lv) / np.dot(lt_c, lt_c))
