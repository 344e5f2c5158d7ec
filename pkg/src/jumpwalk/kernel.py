"""Time-dependent q-exponential jump-length distribution.

The jump length k at step t is drawn from

    P(k) = C_t * [1 - (1 - q) k]_+^(1/(1-q)),   k in {1, ..., t},

where [.]_+ clamps negative bases to zero and C_t renormalizes over the
current horizon t.  The family interpolates between a point mass at
k = 1 (q -> 1/2, nearest-neighbour steps), a geometric/exponential law
(q = 1), power-law tails (q > 1) and the uniform distribution
(q -> +inf).  Entropic indices below 1/2 are rejected: at q = 1/2 the
support has already collapsed to {1}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Smallest admissible entropic index (point-mass limit).
Q_MIN = 0.5

# Bases smaller than this are treated as exactly zero, so the support
# boundary does not depend on denormal arithmetic.
_BASE_FLOOR = 1e-300

# Weight sums and CDF endpoints must match 1 this tightly.
NORMALIZATION_TOL = 1e-12


def _raw_weights(q: float, kmax: int) -> np.ndarray:
    """Unnormalized weights for k = 1..kmax.

    Computed as exp(log1p(-(1-q) k) / (1-q)) for positive bases, which
    stays accurate through the q -> 1 crossover; q = 1 dispatches to the
    exact exponential limit exp(-k).
    """
    k = np.arange(1, kmax + 1, dtype=np.float64)
    if q == 1.0:
        return np.exp(-k)
    x = -(1.0 - q) * k
    w = np.zeros(kmax, dtype=np.float64)
    positive = (1.0 + x) >= _BASE_FLOOR
    w[positive] = np.exp(np.log1p(x[positive]) / (1.0 - q))
    return w


def _validate_q_t(q: float, t: int) -> None:
    if not np.isfinite(q) or q < Q_MIN:
        raise ValueError(f"entropic index q must be >= {Q_MIN}, got {q}")
    if t < 1:
        raise ValueError(f"horizon t must be a positive integer, got {t}")


def kernel_weights(q: float, t: int) -> np.ndarray:
    """Normalized jump-length probabilities on {1..t}.

    Index i of the returned vector holds the probability of jump length
    k = i + 1.
    """
    _validate_q_t(q, t)
    raw = _raw_weights(q, int(t))
    return raw / raw.sum()


@dataclass(frozen=True)
class MemoryKernel:
    """Immutable jump-length distribution at a fixed horizon t.

    Attributes
    ----------
    q : entropic index (>= 1/2).
    horizon : upper end t of the support {1..t}.
    weights : probabilities, ``weights[k-1]`` for jump length k.
    cdf : cumulative sums of ``weights``.
    """

    q: float
    horizon: int
    weights: np.ndarray
    cdf: np.ndarray

    @classmethod
    def build(cls, q: float, t: int) -> "MemoryKernel":
        weights = kernel_weights(q, t)
        kernel = cls(q=float(q), horizon=int(t), weights=weights,
                     cdf=np.cumsum(weights))
        kernel.validate()
        return kernel

    def validate(self) -> None:
        if np.any(self.weights < 0):
            raise ValueError("kernel weights must be nonnegative")
        if abs(self.weights.sum() - 1.0) > NORMALIZATION_TOL:
            raise ValueError("kernel weights must sum to 1")
        if np.any(np.diff(self.cdf) < 0) or abs(self.cdf[-1] - 1.0) > NORMALIZATION_TOL:
            raise ValueError("kernel cdf must be nondecreasing and end at 1")

    @property
    def support(self) -> int:
        """Largest jump length with positive probability."""
        return int(np.nonzero(self.weights > 0)[0][-1]) + 1

    def sample(self, rng: np.random.Generator) -> int:
        """Draw one jump length by inverse-CDF lookup on one uniform."""
        u = rng.random()
        idx = int(np.searchsorted(self.cdf, u, side="right"))
        # A float tie at the CDF plateau may land past the support.
        return min(idx + 1, self.support)


def kernel_sample(kernel: MemoryKernel, rng: np.random.Generator) -> int:
    """Draw one jump length from ``kernel`` using ``rng``."""
    return kernel.sample(rng)


class KernelTable:
    """Incrementally extendable kernel over horizons 1..t_max.

    The unnormalized weight of a given k never changes as the horizon
    grows, only the normalization does, so one cumulative-sum table
    serves every horizon: sampling at horizon t rescales a uniform
    variate by the cumulative mass at t and searches the prefix.  This
    replaces the O(t) per-step rebuild with O(log t) sampling.
    """

    def __init__(self, q: float, t_max: int):
        _validate_q_t(q, t_max)
        self.q = float(q)
        self.t_max = int(t_max)
        self._raw = _raw_weights(self.q, self.t_max)
        self._cum = np.cumsum(self._raw)
        self._support_cap = int(np.nonzero(self._raw > 0)[0][-1]) + 1

    def sample(self, t: int, u: float) -> int:
        """Jump length at horizon t for a uniform variate u in [0, 1)."""
        v = u * self._cum[t - 1]
        idx = int(np.searchsorted(self._cum[:t], v, side="right"))
        return min(idx + 1, t, self._support_cap)

    def weights(self, t: int) -> np.ndarray:
        """Normalized weights at horizon t; matches ``kernel_weights(q, t)``
        up to the roundoff of the running normalization."""
        return self._raw[:t] / self._cum[t - 1]

    def kernel(self, t: int) -> MemoryKernel:
        """Materialize the immutable kernel snapshot at horizon t."""
        return MemoryKernel.build(self.q, t)
