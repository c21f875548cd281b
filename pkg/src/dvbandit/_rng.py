"""Keyed counter-based random numbers for reproducible trials.

Every draw is a pure function of the tuple (master_seed, trial_index, arm, t):
the 64-bit words are absorbed one at a time through the SplitMix64 finalizer
(Stafford mix 13), the resulting 64-bit hash is turned into a uniform on
(0, 1) using its top 53 bits centered on the lattice, and the uniform is
mapped to a standard normal through scipy's ndtri (Cephes inverse normal
CDF).  There is no stream state, so draws can be replayed or evaluated in
any order and in parallel.

The compiled backend (``_ckernels``) repeats the same construction in C with
the same Cephes ndtri, so both backends produce bit-identical values; the
arithmetic is plain IEEE-754 double precision throughout.
"""

import numpy as np
from scipy.special import ndtri

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB
_U53 = 2.0**-53


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a 64-bit avalanching bijection."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & MASK64
    return z ^ (z >> 31)


def _absorb(h: int, word: int) -> int:
    return mix64(((h ^ (word & MASK64)) + _GOLDEN) & MASK64)


def draw_bits(master_seed: int, trial_index: int, arm: int, t: int) -> int:
    """64-bit hash of the draw coordinates (arm is 1-based, t >= 1)."""
    h = mix64(master_seed & MASK64)
    h = _absorb(h, trial_index)
    h = _absorb(h, arm)
    h = _absorb(h, t)
    return h


def uniform01(master_seed: int, trial_index: int, arm: int, t: int) -> float:
    """Uniform on the open interval (0, 1): ((bits >> 11) + 0.5) * 2^-53."""
    return ((draw_bits(master_seed, trial_index, arm, t) >> 11) + 0.5) * _U53


def standard_normal(master_seed: int, trial_index: int, arm: int, t: int) -> float:
    """Standard normal draw keyed by (master_seed, trial_index, arm, t)."""
    return float(ndtri(uniform01(master_seed, trial_index, arm, t)))


def derive_seed(master_seed: int, index: int) -> int:
    """Derive an independent 64-bit sub-seed (used for per-row experiment seeds)."""
    return _absorb(mix64(master_seed & MASK64), index)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX_A)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX_B)
    return z ^ (z >> np.uint64(31))


def _absorb_array(h: np.ndarray, word: np.ndarray) -> np.ndarray:
    return _mix64_array((h ^ word) + np.uint64(_GOLDEN))


def standard_normal_grid(
    master_seed: int,
    trial_indices: np.ndarray,
    arm: int,
    ts: np.ndarray,
) -> np.ndarray:
    """Vectorized draws: element [i, j] equals standard_normal(seed, trial_i, arm, t_j).

    Wraparound uint64 arithmetic reproduces the scalar path bit for bit; the
    grid form exists because the Monte Carlo verification tests need millions
    of draws.
    """
    trials = np.asarray(trial_indices, dtype=np.uint64).reshape(-1, 1)
    times = np.asarray(ts, dtype=np.uint64).reshape(1, -1)
    h0 = np.uint64(mix64(master_seed & MASK64))
    h = _absorb_array(np.broadcast_to(h0, trials.shape).copy(), trials)
    h = _absorb_array(h, np.uint64(arm))
    h = _absorb_array(np.broadcast_to(h, (trials.shape[0], times.shape[1])).copy(), times)
    u = ((h >> np.uint64(11)).astype(np.float64) + 0.5) * _U53
    return ndtri(u)
