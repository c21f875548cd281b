"""Closed-form quantities behind the policies: wait time, sampling period,
estimator weights, the anytime confidence radius, elimination-time bounds,
and the proved cost bounds for both proposed policies.

All logarithms are natural.  Every function returns exact reals; rounding to
integer schedules happens in :mod:`dvbandit.policies` so these stay directly
testable against high-precision evaluation.
"""

import math
from dataclasses import dataclass

from .env import Instance, gaps


class FormulaDomainError(ValueError):
    """A formula's log argument left its valid domain (flagged, never clamped)."""


@dataclass(frozen=True)
class CostConfig:
    """Cost and confidence parameters: c > 0 per arm-sample, delta in (0, 1)."""

    c: float
    delta: float

    def __post_init__(self):
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "delta", float(self.delta))
        if not (self.c > 0.0 and math.isfinite(self.c)):
            raise ValueError(f"sampling cost c must be positive, got {self.c}")
        if not (0.0 < self.delta < 1.0):
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")


def _checked_log(arg: float, formula: str) -> float:
    if not arg > 1.0:
        raise FormulaDomainError(
            f"{formula}: log argument {arg} <= 1 gives a non-positive log"
        )
    return math.log(arg)


def wait_time(gap: float, sigma: float, num_arms: int, cfg: CostConfig) -> float:
    """Wait duration t_w = (2*sigma/gap) * sqrt(K*c*ln(K/delta)).

    The continuous-sampling policy idles this long before sampling; the value
    is returned un-rounded.
    """
    if not gap > 0.0:
        raise ValueError(f"gap must be positive, got {gap}")
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if num_arms < 2:
        raise ValueError(f"need at least 2 arms, got {num_arms}")
    log_term = _checked_log(num_arms / cfg.delta, "wait_time")
    return 2.0 * sigma / gap * math.sqrt(num_arms * cfg.c * log_term)


def sampling_period(num_arms: int, cfg: CostConfig) -> int:
    """Sampling period lambda = c*K rounded to the nearest integer (ties up, min 1).

    Small c*K collapses to 1, i.e. continuous sampling.
    """
    if num_arms < 1:
        raise ValueError(f"need at least 1 arm, got {num_arms}")
    return max(1, int(math.floor(cfg.c * num_arms + 0.5)))


def weight(tau: int, r: int) -> float:
    """Estimator weight w(tau, r) = 2*tau / (r*(r+1)) for the tau-th of r samples.

    Later samples carry more weight because their reward variance is lower;
    the weights over tau = 1..r sum to 1.
    """
    if r < 1 or tau < 1 or tau > r:
        raise ValueError(f"need 1 <= tau <= r, got tau={tau}, r={r}")
    return 2.0 * tau / (r * (r + 1))


def confidence_radius(t: int, lam: int, sigma: float, num_arms: int, cfg: CostConfig) -> float:
    """Anytime radius U_t = (sigma/t) * sqrt(lam * ln(2*K*t^2 / (lam^2*delta))).

    Valid at sampling times only (t a positive multiple of lam).  The
    elimination rule compares estimate differences against 2*U_t.
    """
    if lam < 1:
        raise ValueError(f"lam must be >= 1, got {lam}")
    if t < 1 or t % lam != 0:
        raise ValueError(f"t must be a positive multiple of lam={lam}, got t={t}")
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    arg = 2.0 * num_arms * t * t / (lam * lam * cfg.delta)
    log_term = _checked_log(arg, "confidence_radius")
    return sigma / t * math.sqrt(lam * log_term)


def elimination_time_bound(gap: float, sigma: float, lam: int, num_arms: int,
                           cfg: CostConfig) -> float:
    """Round T_j = (6*sigma/gap) * sqrt(lam * ln(36*K*sigma^2 / (lam*delta*gap^2))).

    On the good concentration event, an arm whose gap to the best mean is
    ``gap`` is eliminated by the first sampling round >= T_j.
    """
    if not gap > 0.0:
        raise ValueError(f"gap must be positive, got {gap}")
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if lam < 1:
        raise ValueError(f"lam must be >= 1, got {lam}")
    arg = 36.0 * num_arms * sigma * sigma / (lam * cfg.delta * gap * gap)
    log_term = _checked_log(arg, "elimination_time_bound")
    return 6.0 * sigma / gap * math.sqrt(lam * log_term)


def wtcs_cost_bound(gap: float, sigma: float, num_arms: int,
                    cfg: CostConfig) -> tuple[float, float]:
    """Cost bounds for the wait-then-sample policy: (exact form, rounded-constant form).

    exact   = (2*sigma/gap) * (2 + 1/(K*c)) * sqrt(K*c*ln(K/delta))
    rounded = (6*sigma/gap) * sqrt(K*c*ln(K/delta))

    The rounded form dominates the exact one iff K*c >= 1; both are reported
    and neither is "corrected".
    """
    if not gap > 0.0:
        raise ValueError(f"gap must be positive, got {gap}")
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if num_arms < 2:
        raise ValueError(f"need at least 2 arms, got {num_arms}")
    log_term = _checked_log(num_arms / cfg.delta, "wtcs_cost_bound")
    root = math.sqrt(num_arms * cfg.c * log_term)
    exact = 2.0 * sigma / gap * (2.0 + 1.0 / (num_arms * cfg.c)) * root
    rounded = 6.0 * sigma / gap * root
    return exact, rounded


def pswse_cost_bound(inst: Instance, cfg: CostConfig) -> float:
    """Cost bound for periodic sampling with weighted elimination (success event).

    (6*sigma*(c*K + 2*c)/gap_min) * sqrt((1/(c*K)) * ln(36*sigma^2/(c*delta*gap_min^2)))
      + sum over the remaining suboptimal gaps g of
        (6*c*sigma/g) * sqrt((1/(c*K)) * ln(36*sigma^2/(c*delta*g^2)))

    Evaluated with the unrounded period c*K, exactly as the bound is stated.
    """
    k = inst.num_arms
    if k < 2:
        raise ValueError("cost bound needs at least 2 arms")
    if not inst.sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {inst.sigma}")
    sub_gaps = sorted(g for g in gaps(inst) if g > 0.0)
    sigma = inst.sigma
    c = cfg.c
    gap_min = sub_gaps[0]

    def term(scale: float, g: float) -> float:
        arg = 36.0 * sigma * sigma / (c * cfg.delta * g * g)
        log_term = _checked_log(arg, "pswse_cost_bound")
        return scale / g * math.sqrt(1.0 / (c * k) * log_term)

    total = term(6.0 * sigma * (c * k + 2.0 * c), gap_min)
    for g in sub_gaps[1:]:
        total += term(6.0 * c * sigma, g)
    return total
