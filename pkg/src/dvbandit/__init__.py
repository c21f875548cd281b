"""dvbandit: fixed-confidence best-arm identification for Gaussian bandits
whose reward variance decays as sigma^2/t.

The cost of a run is the stopping round plus c times the number of samples
drawn, which rewards policies that delay sampling into the low-noise regime.
The package provides two such policies (wait-then-sample with a known gap;
periodic sampling with weighted elimination), two classical baselines
(successive elimination, leader/challenger), the closed-form bounds behind
them, and a deterministic Monte Carlo harness with four built-in sweeps.
"""

from .backend import active_backend, have_compiled
from .bounds import (CostConfig, FormulaDomainError, confidence_radius,
                     elimination_time_bound, pswse_cost_bound,
                     sampling_period, wait_time, weight, wtcs_cost_bound)
from .env import Instance, RngStream, gaps, min_gap, sample_reward
from .harness import (AggregateStats, ExperimentPoint, ExperimentResult,
                      ExperimentSpec, PointFailure, RoundRecord, RunResult,
                      builtin_experiment, builtin_experiments,
                      load_experiment_spec, read_results, replay_log,
                      run_experiment, run_monte_carlo, run_trial,
                      write_results)
from .policies import (Decision, LucbPolicy, NonTerminationError,
                       PolicyConfig, PolicyKind, PswsePolicy, SampleSet,
                       SePolicy, Stop, WtcsPolicy, baseline_radius,
                       make_policy, wtcs_schedule)

__version__ = "0.1.0"

__all__ = [
    "AggregateStats", "CostConfig", "Decision", "ExperimentPoint",
    "ExperimentResult", "ExperimentSpec", "FormulaDomainError", "Instance",
    "LucbPolicy", "NonTerminationError", "PointFailure", "PolicyConfig",
    "PolicyKind", "PswsePolicy", "RngStream", "RoundRecord", "RunResult",
    "SampleSet", "SePolicy", "Stop", "WtcsPolicy", "active_backend",
    "baseline_radius", "builtin_experiment", "builtin_experiments",
    "confidence_radius", "elimination_time_bound", "gaps", "have_compiled",
    "load_experiment_spec", "make_policy", "min_gap", "pswse_cost_bound",
    "read_results", "replay_log", "run_experiment", "run_monte_carlo",
    "run_trial", "sample_reward", "sampling_period", "wait_time", "weight",
    "write_results", "wtcs_cost_bound",
]
