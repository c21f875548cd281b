"""Trial driver, Monte Carlo sweeps, the four built-in experiments, and
results persistence.

A trial is fully determined by (instance, policy config, cost config,
master_seed, trial_index); aggregation uses only per-trial statistics in
trial-index order, so results are independent of worker count and completion
order.  Experiment rows derive their own sub-seed from (master_seed, row
index), and each row is reproducible standalone from the seed stored with it.
"""

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import backend, bounds, policies
from .bounds import CostConfig
from .env import Instance, RngStream, min_gap, sample_reward
from .policies import (NonTerminationError, PolicyConfig, PolicyKind,
                       SampleSet, Stop, make_policy, wtcs_schedule)

DEFAULT_MASTER_SEED = 123456789
_ALL_POLICIES = ("wtcs", "pswse", "se", "lucb")
_ERROR_LOG_TAIL = 256  # rounds of log kept for non-termination diagnostics

CSV_COLUMNS = [
    "experiment", "param_name", "param_value", "policy", "K", "sigma", "c",
    "delta", "n_trials", "mean_tau", "se_tau", "mean_eta", "se_eta",
    "mean_cost", "se_cost", "error_rate", "master_seed",
]


@dataclass(frozen=True)
class RoundRecord:
    """One sampled round: the arm set requested and the rewards observed."""

    t: int
    arms: tuple[int, ...]
    rewards: tuple[float, ...]


@dataclass(frozen=True)
class RunResult:
    """Outcome of a single trial; cost = tau + c * eta exactly."""

    tau: int
    eta: int
    cost: float
    declared: int
    correct: bool
    master_seed: int
    trial_index: int
    log: Optional[list[RoundRecord]] = None


@dataclass(frozen=True)
class AggregateStats:
    """Monte Carlo summary for one (parameter point, policy) row."""

    experiment: str
    param_name: str
    param_value: float
    policy: str
    K: int
    sigma: float
    c: float
    delta: float
    n_trials: int
    mean_tau: float
    se_tau: float
    mean_eta: float
    se_eta: float
    mean_cost: float
    se_cost: float
    error_rate: float
    master_seed: int
    n_errors: int = 0
    se_defined: bool = True


@dataclass(frozen=True)
class ExperimentPoint:
    """One parameter point: the swept value plus the instance it induces."""

    param_value: float
    means: tuple[float, ...]
    sigma: float
    c: float


@dataclass(frozen=True)
class ExperimentSpec:
    """A parameter sweep: points x policies, each run for n_trials trials."""

    id: str
    param_name: str
    points: tuple[ExperimentPoint, ...]
    policies: tuple[str, ...] = _ALL_POLICIES
    n_trials: int = 1000
    delta: float = 0.1
    master_seed: int = DEFAULT_MASTER_SEED

    def __post_init__(self):
        if not self.points:
            raise ValueError("experiment needs at least one parameter point")
        if not self.policies:
            raise ValueError("experiment needs at least one policy")
        for p in self.policies:
            PolicyKind(p)
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")


@dataclass(frozen=True)
class PointFailure:
    """A (point, policy) row that errored; remaining rows still ran."""

    param_value: float
    policy: str
    message: str


@dataclass(frozen=True)
class ExperimentResult:
    rows: list[AggregateStats]
    failures: list[PointFailure] = field(default_factory=list)


def _drive_policy(inst: Instance, policy_cfg: PolicyConfig, cost_cfg: CostConfig,
                  stream: RngStream, record_log: bool):
    """Run the sequential protocol to termination; returns (tau, eta, declared, log)."""
    pol = make_policy(policy_cfg, inst.num_arms, inst.sigma, cost_cfg)
    log: list[RoundRecord] = []
    t = 0
    eta = 0
    try:
        decision = pol.decide(0, ())
        while isinstance(decision, SampleSet):
            t += 1
            arms = decision.arms
            rewards = tuple(sample_reward(inst, a, t, stream) for a in arms)
            if arms:
                eta += len(arms)
                log.append(RoundRecord(t, arms, rewards))
                if not record_log and len(log) > _ERROR_LOG_TAIL:
                    del log[0]
            decision = pol.decide(t, rewards)
    except NonTerminationError as err:
        err.round_log = log
        raise
    tau = t
    return tau, eta, decision.arm, (log if record_log else None)


def _run_compiled(inst: Instance, policy_cfg: PolicyConfig, cost_cfg: CostConfig,
                  master_seed: int, trial_index: int, choice: str):
    """Dispatch to a fused kernel; returns (tau, eta, declared) or None."""
    kind = policy_cfg.kind
    if kind is PolicyKind.WTCS:
        wait_end, window = wtcs_schedule(policy_cfg.known_gap, inst.sigma,
                                         inst.num_arms, cost_cfg)
        if wait_end + window > policy_cfg.max_rounds:
            raise NonTerminationError(
                f"WtcsPolicy exceeded max_rounds={policy_cfg.max_rounds}",
                t=wait_end + window)
        return backend.kernel_wtcs(inst.means, inst.sigma, master_seed,
                                   trial_index, wait_end, window, choice)
    if kind is PolicyKind.PSWSE:
        lam = bounds.sampling_period(inst.num_arms, cost_cfg)
        return backend.kernel_pswse(inst.means, inst.sigma, master_seed,
                                    trial_index, lam, cost_cfg.delta,
                                    policy_cfg.max_rounds, choice)
    if kind is PolicyKind.SE:
        return backend.kernel_se(inst.means, inst.sigma, master_seed,
                                 trial_index, cost_cfg.delta,
                                 policy_cfg.max_rounds, choice)
    if kind is PolicyKind.LUCB:
        return backend.kernel_lucb(inst.means, inst.sigma, master_seed,
                                   trial_index, cost_cfg.delta,
                                   policy_cfg.max_rounds, choice)
    return None


def run_trial(inst: Instance, policy_cfg: PolicyConfig, cost_cfg: CostConfig,
              master_seed: int, trial_index: int, *, record_log: bool = False,
              backend_choice: str = "auto") -> RunResult:
    """Run one trial to termination.

    Fully deterministic in (master_seed, trial_index).  With
    ``record_log=True`` the per-round sample log is attached (this forces the
    pure-Python path; both paths produce bit-identical results).

    Raises NonTerminationError (partial log tail attached when available) if
    the policy hits its max_rounds cap.
    """
    log = None
    result = None
    if not record_log and inst.num_arms > 1:
        result = _run_compiled(inst, policy_cfg, cost_cfg, master_seed,
                               trial_index, backend_choice)
        if result is not None and result[0] < 0:
            raise NonTerminationError(
                f"{policy_cfg.kind.value} exceeded max_rounds="
                f"{policy_cfg.max_rounds} (rerun with record_log=True for the log)",
                t=policy_cfg.max_rounds)
    if result is not None:
        tau, eta, declared = result
    else:
        stream = RngStream(master_seed, trial_index)
        tau, eta, declared, log = _drive_policy(inst, policy_cfg, cost_cfg,
                                                stream, record_log)
    return RunResult(
        tau=tau,
        eta=eta,
        cost=tau + cost_cfg.c * eta,
        declared=declared,
        correct=declared == inst.best_arm,
        master_seed=master_seed,
        trial_index=trial_index,
        log=log,
    )


def replay_log(policy_cfg: PolicyConfig, num_arms: int, sigma: float,
               cost_cfg: CostConfig, log: list[RoundRecord]) -> int:
    """Re-drive a fresh policy from a recorded log; returns the declared arm.

    Verifies that the policy requests exactly the logged arm sets, so a log
    replays to the same terminal state.
    """
    pol = make_policy(policy_cfg, num_arms, sigma, cost_cfg)
    entries = {rec.t: rec for rec in log}
    t = 0
    decision = pol.decide(0, ())
    while isinstance(decision, SampleSet):
        t += 1
        rec = entries.get(t)
        logged_arms = rec.arms if rec else ()
        if tuple(decision.arms) != logged_arms:
            raise ValueError(
                f"replay diverged at round {t}: requested {decision.arms}, "
                f"log has {logged_arms}")
        decision = pol.decide(t, rec.rewards if rec else ())
    return decision.arm


def _trial_stats_batch(args):
    (inst, policy_cfg, cost_cfg, master_seed, indices, backend_choice) = args
    out = []
    for i in indices:
        r = run_trial(inst, policy_cfg, cost_cfg, master_seed, i,
                      backend_choice=backend_choice)
        out.append((r.tau, r.eta, r.cost, r.correct))
    return out


def _aggregate(taus, etas, costs, corrects, *, n_trials, experiment, param_name,
               param_value, policy, inst, cost_cfg, master_seed) -> AggregateStats:
    def se(a):
        if n_trials < 2:
            return 0.0
        return float(np.std(a, ddof=1) / math.sqrt(n_trials))

    n_errors = int(n_trials - np.sum(corrects))
    return AggregateStats(
        experiment=experiment,
        param_name=param_name,
        param_value=param_value,
        policy=policy,
        K=inst.num_arms,
        sigma=inst.sigma,
        c=cost_cfg.c,
        delta=cost_cfg.delta,
        n_trials=n_trials,
        mean_tau=float(np.mean(taus)),
        se_tau=se(taus),
        mean_eta=float(np.mean(etas)),
        se_eta=se(etas),
        mean_cost=float(np.mean(costs)),
        se_cost=se(costs),
        error_rate=n_errors / n_trials,
        master_seed=master_seed,
        n_errors=n_errors,
        se_defined=n_trials > 1,
    )


def run_monte_carlo(inst: Instance, policy_cfg: PolicyConfig, cost_cfg: CostConfig,
                    n_trials: int, master_seed: int, *, n_jobs: int = 1,
                    backend_choice: str = "auto", experiment: str = "custom",
                    param_name: str = "gap",
                    param_value: Optional[float] = None) -> AggregateStats:
    """Aggregate n_trials independent trials (trial indices 0..n_trials-1).

    The result is identical for any n_jobs because statistics are computed
    from the per-trial array in trial-index order.  With a single trial the
    standard errors are undefined and reported as 0 with se_defined=False.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    if param_value is None:
        param_value = min_gap(inst) if inst.num_arms >= 2 else 0.0
    indices = range(n_trials)
    if n_jobs <= 1:
        stats = _trial_stats_batch(
            (inst, policy_cfg, cost_cfg, master_seed, indices, backend_choice))
    else:
        chunks = [
            (inst, policy_cfg, cost_cfg, master_seed,
             range(w, n_trials, n_jobs), backend_choice)
            for w in range(min(n_jobs, n_trials))
        ]
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            per_chunk = list(pool.map(_trial_stats_batch, chunks))
        by_index = {}
        for chunk, results in zip(chunks, per_chunk):
            for i, row in zip(chunk[4], results):
                by_index[i] = row
        stats = [by_index[i] for i in indices]
    taus = np.array([s[0] for s in stats], dtype=float)
    etas = np.array([s[1] for s in stats], dtype=float)
    costs = np.array([s[2] for s in stats], dtype=float)
    corrects = np.array([s[3] for s in stats], dtype=bool)
    return _aggregate(taus, etas, costs, corrects, n_trials=n_trials,
                      experiment=experiment, param_name=param_name,
                      param_value=param_value, policy=policy_cfg.kind.value,
                      inst=inst, cost_cfg=cost_cfg, master_seed=master_seed)


def _arith_means(num_arms: int, diff: float) -> tuple[float, ...]:
    """Means in arithmetic progression with step ``diff``, arm 1 best, last 0."""
    return tuple(diff * (num_arms - 1 - i) for i in range(num_arms))


def builtin_experiments() -> list[ExperimentSpec]:
    """The four built-in sweeps (all run all four policies, delta = 0.1).

    1. gap sweep: K=5, arithmetic means with common difference 0.3..1.0, c=1, sigma=10
    2. arm-count sweep: means equally spaced on [0, 3], K = 2..12 step 2, c=1, sigma=10
    3. noise sweep: K=5, consecutive gap 0.5, c=1, sigma = 1..11 step 2
    4. cost sweep: K=5, gap 0.5, sigma=10, c on a half-decade log grid 0.01..100
    """
    exp1 = ExperimentSpec(
        id="exp1", param_name="gap",
        points=tuple(ExperimentPoint(d, _arith_means(5, d), 10.0, 1.0)
                     for d in (0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)))
    exp2 = ExperimentSpec(
        id="exp2", param_name="K",
        points=tuple(
            ExperimentPoint(
                k, tuple(3.0 * (k - 1 - i) / (k - 1) for i in range(k)), 10.0, 1.0)
            for k in (2, 4, 6, 8, 10, 12)))
    exp3 = ExperimentSpec(
        id="exp3", param_name="sigma",
        points=tuple(ExperimentPoint(s, _arith_means(5, 0.5), float(s), 1.0)
                     for s in (1, 3, 5, 7, 9, 11)))
    exp4 = ExperimentSpec(
        id="exp4", param_name="c",
        points=tuple(ExperimentPoint(c, _arith_means(5, 0.5), 10.0, c)
                     for c in (0.01, 0.0316, 0.1, 0.316, 1.0, 3.16, 10.0, 31.6, 100.0)))
    return [exp1, exp2, exp3, exp4]


def builtin_experiment(exp_id: str) -> ExperimentSpec:
    for spec in builtin_experiments():
        if spec.id == exp_id:
            return spec
    raise ValueError(f"unknown experiment id {exp_id!r} "
                     f"(expected exp1, exp2, exp3 or exp4)")


def _policy_config_for(policy: str, inst: Instance) -> PolicyConfig:
    kind = PolicyKind(policy)
    if kind is PolicyKind.WTCS:
        return PolicyConfig(kind=kind, known_gap=min_gap(inst))
    return PolicyConfig(kind=kind)


def run_experiment(spec: ExperimentSpec, *, n_jobs: int = 1,
                   backend_choice: str = "auto") -> ExperimentResult:
    """Run the full points x policies grid of a sweep.

    Row order is point-major.  Each row's trials are seeded from a sub-seed
    derived from (spec.master_seed, row index); the sub-seed is stored in the
    row, so any row reruns standalone via run_monte_carlo.  A failing row is
    recorded and the remaining rows still run.
    """
    from ._rng import derive_seed

    rows: list[AggregateStats] = []
    failures: list[PointFailure] = []
    row_index = 0
    for point in spec.points:
        inst = Instance(means=point.means, sigma=point.sigma)
        cost_cfg = CostConfig(c=point.c, delta=spec.delta)
        for policy in spec.policies:
            row_seed = derive_seed(spec.master_seed, row_index)
            row_index += 1
            try:
                policy_cfg = _policy_config_for(policy, inst)
                rows.append(run_monte_carlo(
                    inst, policy_cfg, cost_cfg, spec.n_trials, row_seed,
                    n_jobs=n_jobs, backend_choice=backend_choice,
                    experiment=spec.id, param_name=spec.param_name,
                    param_value=point.param_value))
            except Exception as exc:
                failures.append(PointFailure(point.param_value, policy, str(exc)))
    return ExperimentResult(rows=rows, failures=failures)


def load_experiment_spec(path: str) -> ExperimentSpec:
    """Load a custom sweep from JSON; keys mirror ExperimentSpec's fields."""
    with open(path) as f:
        raw = json.load(f)
    try:
        points = tuple(
            ExperimentPoint(
                param_value=p["param_value"],
                means=tuple(float(m) for m in p["means"]),
                sigma=float(p["sigma"]),
                c=float(p["c"]),
            )
            for p in raw["points"])
        return ExperimentSpec(
            id=raw.get("id", "custom"),
            param_name=raw.get("param_name", "param"),
            points=points,
            policies=tuple(raw.get("policies", _ALL_POLICIES)),
            n_trials=int(raw.get("n_trials", 1000)),
            delta=float(raw.get("delta", 0.1)),
            master_seed=int(raw.get("master_seed", DEFAULT_MASTER_SEED)),
        )
    except KeyError as exc:
        raise ValueError(f"experiment spec {path} is missing key {exc}") from exc


def with_overrides(spec: ExperimentSpec, *, n_trials: Optional[int] = None,
                   master_seed: Optional[int] = None) -> ExperimentSpec:
    kwargs = {}
    if n_trials is not None:
        kwargs["n_trials"] = n_trials
    if master_seed is not None:
        kwargs["master_seed"] = master_seed
    return replace(spec, **kwargs) if kwargs else spec


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _row_cells(row: AggregateStats) -> dict[str, str]:
    return {col: _format_cell(getattr(row, col)) for col in CSV_COLUMNS}


def write_results(rows: list[AggregateStats], path: str, fmt: str = "csv") -> str:
    """Persist rows as CSV (fixed column order) or JSON (list of row objects).

    Numbers are written in round-trip precision, so reading the file back
    reproduces the rows exactly and identical runs produce identical bytes.
    """
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise OSError(f"cannot write results: directory {parent} does not exist")
    if fmt == "csv":
        with open(path, "w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
            writer.writeheader()
            for row in rows:
                writer.writerow(_row_cells(row))
    else:
        payload = [
            {col: getattr(row, col) for col in CSV_COLUMNS} for row in rows
        ]
        with open(path, "w") as f:
            json.dump(payload, f, indent=2)
            f.write("\n")
    return path


def _parse_param_value(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)


def _row_from_mapping(data: dict) -> AggregateStats:
    n_trials = int(data["n_trials"])
    error_rate = float(data["error_rate"])
    return AggregateStats(
        experiment=str(data["experiment"]),
        param_name=str(data["param_name"]),
        param_value=(data["param_value"]
                     if isinstance(data["param_value"], (int, float))
                     else _parse_param_value(data["param_value"])),
        policy=str(data["policy"]),
        K=int(data["K"]),
        sigma=float(data["sigma"]),
        c=float(data["c"]),
        delta=float(data["delta"]),
        n_trials=n_trials,
        mean_tau=float(data["mean_tau"]),
        se_tau=float(data["se_tau"]),
        mean_eta=float(data["mean_eta"]),
        se_eta=float(data["se_eta"]),
        mean_cost=float(data["mean_cost"]),
        se_cost=float(data["se_cost"]),
        error_rate=error_rate,
        master_seed=int(data["master_seed"]),
        n_errors=round(error_rate * n_trials),
        se_defined=n_trials > 1,
    )


def read_results(path: str, fmt: Optional[str] = None) -> list[AggregateStats]:
    """Read a results file written by write_results."""
    if fmt is None:
        fmt = "json" if path.endswith(".json") else "csv"
    if fmt == "json":
        with open(path) as f:
            return [_row_from_mapping(obj) for obj in json.load(f)]
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        missing = [c for c in CSV_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"results file {path} lacks columns: {missing}")
        return [_row_from_mapping(rec) for rec in reader]
