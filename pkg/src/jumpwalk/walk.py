"""Walker state and the elementary coin/shift evolution step.

The walker is a two-component complex field (psi_l, psi_r) over a
contiguous integer window of lattice sites.  One time step applies a
2x2 unitary coin sitewise, then a conditional translation that moves
the left component by +t' and the right component by -t' sites, where
t' is the jump length supplied for that step.  The window expands by
t' on each side per step, so storage grows with the walk instead of
being preallocated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

COIN_FAMILIES = ("H", "K")

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class CoinParams:
    """Coin family, mixing angle and initial relative phase.

    ``phi`` is the phase between the two spinor components of the
    localized initial state.  When left unset it defaults per family to
    the value that makes the position distribution symmetric: pi/2 for
    the Hadamard-like family H and 0 for the non-hermitian family K.
    """

    family: str
    theta: float
    phi: float | None = None

    def __post_init__(self):
        if self.family not in COIN_FAMILIES:
            raise ValueError(f"coin family must be one of {COIN_FAMILIES}, got {self.family!r}")

    @property
    def initial_phase(self) -> float:
        if self.phi is not None:
            return self.phi
        return np.pi / 2 if self.family == "H" else 0.0


def coin_matrix(params: CoinParams) -> np.ndarray:
    """The 2x2 unitary coin for ``params``.

    H family: [[cos, sin], [sin, -cos]] (Hadamard at theta = pi/4).
    K family: [[cos, i sin], [i sin, cos]].
    """
    c = np.cos(params.theta)
    s = np.sin(params.theta)
    if params.family == "H":
        return np.array([[c, s], [s, -c]], dtype=np.complex128)
    return np.array([[c, 1j * s], [1j * s, c]], dtype=np.complex128)


@dataclass
class WalkerState:
    """Two-component amplitudes over the window [x_min, x_min + n - 1].

    ``psi_l[i]`` and ``psi_r[i]`` are the amplitudes at site
    ``x_min + i``.  The squared norm summed over both components is 1.
    """

    psi_l: np.ndarray
    psi_r: np.ndarray
    x_min: int
    t: int = 0

    @property
    def x_max(self) -> int:
        return self.x_min + len(self.psi_l) - 1

    def positions(self) -> np.ndarray:
        return np.arange(self.x_min, self.x_min + len(self.psi_l))

    def norm_sq(self) -> float:
        l, r = self.psi_l, self.psi_r
        return float(np.dot(l.real, l.real) + np.dot(l.imag, l.imag)
                     + np.dot(r.real, r.real) + np.dot(r.imag, r.imag))

    def copy(self) -> "WalkerState":
        return WalkerState(self.psi_l.copy(), self.psi_r.copy(), self.x_min, self.t)


def initial_state(params: CoinParams) -> WalkerState:
    """Localized state at x = 0: (|L> + e^{i phi} |R>) / sqrt(2)."""
    psi_l = np.array([_INV_SQRT2], dtype=np.complex128)
    psi_r = np.array([_INV_SQRT2 * np.exp(1j * params.initial_phase)],
                     dtype=np.complex128)
    return WalkerState(psi_l=psi_l, psi_r=psi_r, x_min=0, t=0)


def apply_coin(state: WalkerState, matrix: np.ndarray) -> WalkerState:
    """Sitewise 2x2 rotation of the spinor components."""
    l = matrix[0, 0] * state.psi_l + matrix[0, 1] * state.psi_r
    r = matrix[1, 0] * state.psi_l + matrix[1, 1] * state.psi_r
    return WalkerState(psi_l=l, psi_r=r, x_min=state.x_min, t=state.t)


def apply_shift(state: WalkerState, t_prime: int) -> WalkerState:
    """Conditional translation by the jump length t_prime.

    The new left component at x is the old left component at x - t',
    the new right component at x is the old right component at x + t';
    the window widens by t' on each side.  A pure relabeling, so the
    norm is preserved exactly.
    """
    if t_prime < 1:
        raise ValueError(f"jump length must be >= 1, got {t_prime}")
    n = len(state.psi_l)
    dt = int(t_prime)
    psi_l = np.zeros(n + 2 * dt, dtype=np.complex128)
    psi_r = np.zeros(n + 2 * dt, dtype=np.complex128)
    psi_l[2 * dt: 2 * dt + n] = state.psi_l
    psi_r[0: n] = state.psi_r
    return WalkerState(psi_l=psi_l, psi_r=psi_r, x_min=state.x_min - dt, t=state.t)


def step(state: WalkerState, coin: CoinParams | np.ndarray, t_prime: int) -> WalkerState:
    """One full evolution step: coin, then shift by t_prime; t advances.

    The jump must satisfy 1 <= t_prime <= t + 1, matching how jumps are
    drawn: the step that produces the state at time t + 1 samples from
    {1, ..., t + 1} (the first step is forced to 1).
    """
    if not 1 <= t_prime <= state.t + 1:
        raise ValueError(
            f"jump length {t_prime} outside {{1..{state.t + 1}}} at time {state.t}")
    matrix = coin_matrix(coin) if isinstance(coin, CoinParams) else coin
    out = apply_shift(apply_coin(state, matrix), t_prime)
    out.t = state.t + 1
    return out
