"""The four identification policies behind one sequential contract.

A policy is driven round by round: ``decide(t, rewards)`` receives the round
just completed (t = 0 before the first round) together with the rewards for
the arm set it previously requested, and answers either ``SampleSet`` (arms
to sample in round t+1, possibly empty while waiting) or ``Stop`` (terminal,
with the declared best arm).  Arms are 1-based everywhere.

Policies:

* ``WtcsPolicy``   -- wait until a precomputed round, then sample every arm
  for a fixed window and declare the window-mean argmax.  Needs the true gap.
* ``PswsePolicy``  -- sample the active set every ``lam`` rounds, estimate
  means with weights that grow linearly in the sampling round, eliminate arms
  more than twice the anytime radius below the leading estimate.
* ``SePolicy``     -- successive elimination sampling all active arms every
  round; confidence radii use the exact variance of the unweighted mean under
  the decaying-noise model (variance sigma^2/t in round t, sigma known).
* ``LucbPolicy``   -- samples the empirical leader plus the best upper bound
  among the rest each round; stops when the leader's lower bound clears every
  other arm's upper bound.  Same radii as SePolicy.

All argmax ties break to the lowest arm index so trials are reproducible.
The compiled kernels replicate these update rules operation for operation;
any change here must be mirrored in ``_ckernels.pyx``.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Union

from . import bounds
from .bounds import CostConfig

DEFAULT_MAX_ROUNDS = 10_000_000


class PolicyKind(str, Enum):
    WTCS = "wtcs"
    PSWSE = "pswse"
    SE = "se"
    LUCB = "lucb"


@dataclass(frozen=True)
class PolicyConfig:
    """Which policy to run plus its parameters.

    ``known_gap`` is required for WTCS (the policy's defining side
    information) and must be left unset for the others.
    """

    kind: PolicyKind
    known_gap: Optional[float] = None
    max_rounds: int = DEFAULT_MAX_ROUNDS

    def __post_init__(self):
        object.__setattr__(self, "kind", PolicyKind(self.kind))
        if self.kind is PolicyKind.WTCS:
            if self.known_gap is None or not self.known_gap > 0.0:
                raise ValueError("WTCS requires known_gap > 0")
        elif self.known_gap is not None:
            raise ValueError(f"{self.kind.value} must not set known_gap")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")


@dataclass(frozen=True)
class SampleSet:
    """Request: sample these arms (ascending, possibly empty) in the next round."""

    arms: tuple[int, ...]


@dataclass(frozen=True)
class Stop:
    """Terminal decision declaring the best arm."""

    arm: int


Decision = Union[SampleSet, Stop]


class NonTerminationError(RuntimeError):
    """The policy hit its max_rounds safety cap without stopping."""

    def __init__(self, message: str, t: int):
        super().__init__(message)
        self.t = t
        self.round_log = None  # harness attaches the partial log


def wtcs_schedule(gap: float, sigma: float, num_arms: int,
                  cost: CostConfig) -> tuple[int, int]:
    """Integer schedule (wait_end, window) for the wait-then-sample policy.

    Both durations round up so the realized window is never shorter than the
    analysis assumes; sampling happens in rounds wait_end+1 .. wait_end+window.
    """
    t_w = bounds.wait_time(gap, sigma, num_arms, cost)
    wait_end = math.ceil(t_w)
    window = math.ceil(t_w / (num_arms * cost.c))
    return wait_end, window


def baseline_radius(sigma: float, n: int, inv_t_sum: float, num_arms: int,
                    delta: float) -> float:
    """Confidence radius for an unweighted mean of n samples taken at rounds t_i.

    The mean's exact variance is V = (sigma^2/n^2) * sum_i 1/t_i
    (``inv_t_sum``); the radius sqrt(2*V*ln(4*K*n^2/delta)) spends failure
    budget delta/(2*K*n^2) per (arm, n), which sums below delta.
    """
    variance = sigma * sigma * inv_t_sum / (n * n)
    return math.sqrt(2.0 * variance * math.log(4.0 * num_arms * n * n / delta))


class _PolicyBase:
    """Shared bookkeeping: terminal state, max_rounds cap, single-arm shortcut."""

    def __init__(self, num_arms: int, max_rounds: int):
        self.num_arms = num_arms
        self.max_rounds = max_rounds
        self._declared: Optional[int] = None

    @property
    def is_terminal(self) -> bool:
        return self._declared is not None

    def declared_arm(self) -> int:
        if self._declared is None:
            raise RuntimeError("declared_arm() on a non-terminal policy state")
        return self._declared

    def decide(self, t: int, rewards: Sequence[float]) -> Decision:
        if self.is_terminal:
            raise RuntimeError("decide() after Stop violates the policy contract")
        if self.num_arms == 1:
            return self._stop(1)
        return self._decide(t, rewards)

    def _stop(self, arm: int) -> Stop:
        self._declared = arm
        return Stop(arm)

    def _check_cap(self, next_round: int):
        if next_round > self.max_rounds:
            raise NonTerminationError(
                f"{type(self).__name__} exceeded max_rounds={self.max_rounds}",
                t=next_round,
            )

    def _decide(self, t: int, rewards: Sequence[float]) -> Decision:
        raise NotImplementedError


class WtcsPolicy(_PolicyBase):
    """Wait, then sample all arms continuously, then declare the window argmax."""

    def __init__(self, num_arms: int, sigma: float, cost: CostConfig,
                 known_gap: float, max_rounds: int = DEFAULT_MAX_ROUNDS):
        super().__init__(num_arms, max_rounds)
        self.sigma = sigma
        if num_arms == 1:
            self.wait_end, self.window = 0, 0
        else:
            self.wait_end, self.window = wtcs_schedule(known_gap, sigma, num_arms, cost)
        self.t_end = self.wait_end + self.window
        self.sums = [0.0] * num_arms
        self._all_arms = tuple(range(1, num_arms + 1))

    def _decide(self, t: int, rewards: Sequence[float]) -> Decision:
        if t > self.wait_end and rewards:
            for j, x in enumerate(rewards):
                self.sums[j] += x
        if t == self.t_end:
            window_means = [s / self.window for s in self.sums]
            best = 0
            for j in range(1, self.num_arms):
                if window_means[j] > window_means[best]:
                    best = j
            return self._stop(best + 1)
        nxt = t + 1
        self._check_cap(nxt)
        if nxt <= self.wait_end:
            return SampleSet(())
        return SampleSet(self._all_arms)

    def window_means(self) -> list[float]:
        """Per-arm means over the sampling window (valid once terminal)."""
        return [s / self.window for s in self.sums]


class PswsePolicy(_PolicyBase):
    """Periodic sampling with weighted successive elimination."""

    def __init__(self, num_arms: int, sigma: float, cost: CostConfig,
                 max_rounds: int = DEFAULT_MAX_ROUNDS):
        super().__init__(num_arms, max_rounds)
        self.sigma = sigma
        self.cost = cost
        self.lam = bounds.sampling_period(num_arms, cost)
        self.active = list(range(1, num_arms + 1))
        self.estimates = [0.0] * num_arms
        self.r = 0  # completed sampling rounds

    def _decide(self, t: int, rewards: Sequence[float]) -> Decision:
        if rewards:
            self.r += 1
            r = self.r
            for j, x in zip(self.active, rewards):
                est = self.estimates[j - 1]
                self.estimates[j - 1] = (r - 1) / (r + 1) * est + 2 / (r + 1) * x
            radius = bounds.confidence_radius(t, self.lam, self.sigma,
                                              self.num_arms, self.cost)
            leader_est = self.estimates[self.active[0] - 1]
            for j in self.active[1:]:
                if self.estimates[j - 1] > leader_est:
                    leader_est = self.estimates[j - 1]
            threshold = leader_est - 2.0 * radius
            self.active = [j for j in self.active
                           if not (self.estimates[j - 1] < threshold)]
        if len(self.active) == 1:
            return self._stop(self.active[0])
        nxt = t + 1
        self._check_cap(nxt)
        if nxt % self.lam == 0:
            return SampleSet(tuple(self.active))
        return SampleSet(())


class SePolicy(_PolicyBase):
    """Successive elimination with exact-variance radii for the decaying noise."""

    def __init__(self, num_arms: int, sigma: float, cost: CostConfig,
                 max_rounds: int = DEFAULT_MAX_ROUNDS):
        super().__init__(num_arms, max_rounds)
        self.sigma = sigma
        self.delta = cost.delta
        self.active = list(range(1, num_arms + 1))
        self.sums = [0.0] * num_arms
        self.n = 0          # rounds so far == samples per active arm
        self.inv_t_sum = 0.0

    def _decide(self, t: int, rewards: Sequence[float]) -> Decision:
        if rewards:
            self.n = t
            self.inv_t_sum += 1.0 / t
            for j, x in zip(self.active, rewards):
                self.sums[j - 1] += x
            radius = baseline_radius(self.sigma, self.n, self.inv_t_sum,
                                     self.num_arms, self.delta)
            means = {j: self.sums[j - 1] / self.n for j in self.active}
            leader_mean = means[self.active[0]]
            for j in self.active[1:]:
                if means[j] > leader_mean:
                    leader_mean = means[j]
            threshold = radius + radius
            self.active = [j for j in self.active
                           if not (leader_mean - means[j] > threshold)]
        if len(self.active) == 1:
            return self._stop(self.active[0])
        self._check_cap(t + 1)
        return SampleSet(tuple(self.active))


class LucbPolicy(_PolicyBase):
    """Leader/challenger sampling with exact-variance radii."""

    def __init__(self, num_arms: int, sigma: float, cost: CostConfig,
                 max_rounds: int = DEFAULT_MAX_ROUNDS):
        super().__init__(num_arms, max_rounds)
        self.sigma = sigma
        self.delta = cost.delta
        self.n = [0] * num_arms
        self.sums = [0.0] * num_arms
        self.inv_t_sums = [0.0] * num_arms
        self._requested: tuple[int, ...] = ()

    def _decide(self, t: int, rewards: Sequence[float]) -> Decision:
        if t == 0:
            self._requested = tuple(range(1, self.num_arms + 1))
            self._check_cap(1)
            return SampleSet(self._requested)
        for j, x in zip(self._requested, rewards):
            self.n[j - 1] += 1
            self.sums[j - 1] += x
            self.inv_t_sums[j - 1] += 1.0 / t
        means = [self.sums[j] / self.n[j] for j in range(self.num_arms)]
        radii = [baseline_radius(self.sigma, self.n[j], self.inv_t_sums[j],
                                 self.num_arms, self.delta)
                 for j in range(self.num_arms)]
        leader = 0
        for j in range(1, self.num_arms):
            if means[j] > means[leader]:
                leader = j
        challenger = -1
        challenger_ucb = -math.inf
        for j in range(self.num_arms):
            if j == leader:
                continue
            ucb = means[j] + radii[j]
            if ucb > challenger_ucb:
                challenger = j
                challenger_ucb = ucb
        if means[leader] - radii[leader] >= challenger_ucb:
            return self._stop(leader + 1)
        self._check_cap(t + 1)
        lo, hi = sorted((leader + 1, challenger + 1))
        self._requested = (lo, hi)
        return SampleSet(self._requested)


def make_policy(cfg: PolicyConfig, num_arms: int, sigma: float,
                cost: CostConfig) -> _PolicyBase:
    """Instantiate the policy described by ``cfg`` for a K-arm instance."""
    if num_arms < 1:
        raise ValueError(f"need at least 1 arm, got {num_arms}")
    if cfg.kind is PolicyKind.WTCS:
        return WtcsPolicy(num_arms, sigma, cost, cfg.known_gap, cfg.max_rounds)
    if cfg.kind is PolicyKind.PSWSE:
        return PswsePolicy(num_arms, sigma, cost, cfg.max_rounds)
    if cfg.kind is PolicyKind.SE:
        return SePolicy(num_arms, sigma, cost, cfg.max_rounds)
    if cfg.kind is PolicyKind.LUCB:
        return LucbPolicy(num_arms, sigma, cost, cfg.max_rounds)
    raise ValueError(f"unknown policy kind {cfg.kind}")
