"""Reward generation for the decreasing-variance Gaussian bandit.

An arm k with mean mu_k sampled in round t yields mu_k + (sigma/sqrt(t)) * Z
with Z standard normal, so every arm's reward variance decays as sigma^2/t.
Draws are keyed by (master_seed, trial_index, arm, t) through the counter
construction in :mod:`dvbandit._rng`: replaying a trial, or querying the same
coordinates twice, gives bit-identical rewards, and distinct trial indices
give independent streams with no shared state.
"""

import math
from dataclasses import dataclass

from . import backend


@dataclass(frozen=True)
class Instance:
    """A bandit instance: arm means (any order) and the base noise scale sigma.

    The best arm must be unique; ties are rejected at construction.  sigma = 0
    is allowed and produces noiseless rewards.
    """

    means: tuple[float, ...]
    sigma: float

    def __post_init__(self):
        means = tuple(float(m) for m in self.means)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "sigma", float(self.sigma))
        if len(means) < 1:
            raise ValueError("instance needs at least one arm")
        if not all(math.isfinite(m) for m in means):
            raise ValueError(f"means must be finite, got {means}")
        if not (self.sigma >= 0.0 and math.isfinite(self.sigma)):
            raise ValueError(f"sigma must be finite and >= 0, got {self.sigma}")
        top = max(means)
        if sum(1 for m in means if m == top) != 1:
            raise ValueError(f"best arm must be unique, got means {means}")

    @property
    def num_arms(self) -> int:
        return len(self.means)

    @property
    def best_arm(self) -> int:
        """1-based index of the unique best arm."""
        return self.means.index(max(self.means)) + 1


@dataclass(frozen=True)
class RngStream:
    """Value-type handle for one trial's reward stream."""

    master_seed: int
    trial_index: int

    def __post_init__(self):
        if self.trial_index < 0:
            raise ValueError(f"trial_index must be >= 0, got {self.trial_index}")


def sample_reward(inst: Instance, arm: int, t: int, rng: RngStream) -> float:
    """Reward of ``arm`` (1-based) in round ``t`` >= 1 under the given stream."""
    if not 1 <= arm <= inst.num_arms:
        raise ValueError(f"arm must be in 1..{inst.num_arms}, got {arm}")
    if t < 1:
        raise ValueError(f"round t must be >= 1, got {t}")
    z = backend.standard_normal(rng.master_seed, rng.trial_index, arm, t)
    return inst.means[arm - 1] + inst.sigma / math.sqrt(t) * z


def gaps(inst: Instance) -> list[float]:
    """Suboptimality gaps max(means) - mu_k, in input order (zero for the best arm)."""
    if inst.num_arms < 2:
        raise ValueError("gaps are undefined for a single-arm instance")
    top = max(inst.means)
    return [top - m for m in inst.means]


def min_gap(inst: Instance) -> float:
    """The smallest positive gap (distance from best to second-best mean)."""
    return min(g for g in gaps(inst) if g > 0.0)
