"""Command-line front end: single runs, experiment sweeps, and the bound
calculator.

Success output on stdout is plain key=value lines so scripts can parse it;
diagnostics go to stderr.  Exit codes: 0 success, 2 validation error,
3 runtime error, 4 experiment finished with some failed points.
"""

import argparse
import os
import secrets
import sys

from . import backend, bounds, harness
from .bounds import CostConfig, FormulaDomainError
from .env import Instance, min_gap
from .policies import NonTerminationError, PolicyConfig, PolicyKind

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RUNTIME = 3
EXIT_PARTIAL = 4


class CliError(Exception):
    """Validation failure; maps to exit code 2."""


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if value.is_integer() and abs(value) < 1e15:
            return str(int(value))
        return repr(value)
    return str(value)


def _kv(key, value):
    print(f"{key}={_fmt(value)}")


def _note(msg: str):
    if sys.stderr.isatty() and not os.environ.get("NO_COLOR"):
        msg = f"\033[1m{msg}\033[0m"
    print(msg, file=sys.stderr)


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise CliError(f"{flag} expects a comma-separated list of reals: {exc}")
    if not values:
        raise CliError(f"{flag} must not be empty")
    return values


def _parse_seed(text: str) -> int:
    if text == "random":
        seed = secrets.randbits(63)
        _note(f"using random seed {seed}")
        return seed
    try:
        return int(text)
    except ValueError:
        raise CliError(f"--seed expects an integer or 'random', got {text!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dvbandit",
        description="Best-arm identification under decaying reward variance: "
                    "single runs, experiment sweeps, and bound calculators.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one policy on one instance")
    run.add_argument("--policy", required=True,
                     choices=[k.value for k in PolicyKind])
    run.add_argument("--means", required=True,
                     help="comma-separated arm means, e.g. 2.0,1.5,1.0")
    run.add_argument("--sigma", type=float, required=True)
    run.add_argument("--c", type=float, required=True)
    run.add_argument("--delta", type=float, required=True)
    run.add_argument("--gap", type=float, default=None,
                     help="known suboptimality gap (required for wtcs)")
    run.add_argument("--trials", type=int, default=1)
    run.add_argument("--seed", default=str(harness.DEFAULT_MASTER_SEED))
    run.add_argument("--out", default=None)
    run.add_argument("--format", choices=["csv", "json"], default="csv")
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--backend", choices=["auto", "compiled", "python"],
                     default="auto")

    exp = sub.add_parser("experiment", help="run a built-in or custom sweep")
    which = exp.add_mutually_exclusive_group(required=True)
    which.add_argument("--id", choices=["exp1", "exp2", "exp3", "exp4"])
    which.add_argument("--spec", help="JSON file describing a custom sweep")
    exp.add_argument("--trials", type=int, default=None)
    exp.add_argument("--seed", default=None)
    exp.add_argument("--out", required=True)
    exp.add_argument("--format", choices=["csv", "json"], default="csv")
    exp.add_argument("--jobs", type=int, default=1)
    exp.add_argument("--backend", choices=["auto", "compiled", "python"],
                     default="auto")

    bnd = sub.add_parser("bounds", help="print the closed-form quantities")
    bnd.add_argument("--K", type=int, required=True)
    bnd.add_argument("--sigma", type=float, required=True)
    bnd.add_argument("--c", type=float, required=True)
    bnd.add_argument("--delta", type=float, required=True)
    bnd.add_argument("--gaps", required=True,
                     help="comma-separated suboptimal gaps (K-1 of them)")
    return parser


def _cmd_run(args) -> int:
    means = _parse_float_list(args.means, "--means")
    try:
        inst = Instance(means=tuple(means), sigma=args.sigma)
        cost_cfg = CostConfig(c=args.c, delta=args.delta)
    except ValueError as exc:
        raise CliError(str(exc))
    kind = PolicyKind(args.policy)
    if kind is PolicyKind.WTCS and args.gap is None:
        raise CliError("--gap is required for the wtcs policy")
    if kind is not PolicyKind.WTCS and args.gap is not None:
        raise CliError(f"--gap only applies to wtcs, not {kind.value}")
    if args.trials < 1:
        raise CliError("--trials must be >= 1")
    seed = _parse_seed(args.seed)
    try:
        policy_cfg = PolicyConfig(kind=kind, known_gap=args.gap)
    except ValueError as exc:
        raise CliError(str(exc))
    row = harness.run_monte_carlo(
        inst, policy_cfg, cost_cfg, args.trials, seed,
        n_jobs=args.jobs, backend_choice=args.backend)
    _kv("policy", kind.value)
    _kv("K", inst.num_arms)
    _kv("sigma", inst.sigma)
    _kv("c", cost_cfg.c)
    _kv("delta", cost_cfg.delta)
    _kv("trials", args.trials)
    _kv("seed", seed)
    if args.trials == 1:
        _kv("tau", int(row.mean_tau))
        _kv("eta", int(row.mean_eta))
        _kv("cost", row.mean_cost)
    _kv("mean_tau", row.mean_tau)
    _kv("se_tau", row.se_tau)
    _kv("mean_eta", row.mean_eta)
    _kv("se_eta", row.se_eta)
    _kv("mean_cost", row.mean_cost)
    _kv("se_cost", row.se_cost)
    _kv("error_rate", row.error_rate)
    if args.out:
        harness.write_results([row], args.out, args.format)
        _note(f"wrote {args.out}")
    return EXIT_OK


def _cmd_experiment(args) -> int:
    if args.id:
        spec = harness.builtin_experiment(args.id)
    else:
        try:
            spec = harness.load_experiment_spec(args.spec)
        except (OSError, ValueError) as exc:
            raise CliError(f"cannot load spec {args.spec}: {exc}")
    if args.trials is not None and args.trials < 1:
        raise CliError("--trials must be >= 1")
    seed = _parse_seed(args.seed) if args.seed is not None else None
    spec = harness.with_overrides(spec, n_trials=args.trials, master_seed=seed)
    _note(f"running {spec.id}: {len(spec.points)} points x "
          f"{len(spec.policies)} policies x {spec.n_trials} trials "
          f"[{backend.resolve(args.backend)} backend]")
    result = harness.run_experiment(spec, n_jobs=args.jobs,
                                    backend_choice=args.backend)
    for row in result.rows:
        print(f"experiment={row.experiment} {row.param_name}={_fmt(row.param_value)} "
              f"policy={row.policy} mean_tau={_fmt(row.mean_tau)} "
              f"mean_eta={_fmt(row.mean_eta)} mean_cost={_fmt(row.mean_cost)} "
              f"error_rate={_fmt(row.error_rate)}")
    harness.write_results(result.rows, args.out, args.format)
    _note(f"wrote {args.out}")
    if result.failures:
        for failure in result.failures:
            print(f"FAILED point {spec.param_name}={_fmt(failure.param_value)} "
                  f"policy={failure.policy}: {failure.message}", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def _cmd_bounds(args) -> int:
    gap_list = _parse_float_list(args.gaps, "--gaps")
    if any(g <= 0 for g in gap_list):
        raise CliError("--gaps must all be positive")
    if args.K != len(gap_list) + 1:
        raise CliError(f"--K must equal len(--gaps)+1, got K={args.K} "
                       f"with {len(gap_list)} gaps")
    if not args.sigma > 0:
        raise CliError("--sigma must be positive")
    try:
        cfg = CostConfig(c=args.c, delta=args.delta)
        inst = Instance(means=(0.0,) + tuple(-g for g in gap_list),
                        sigma=args.sigma)
        gap = min(gap_list)
        _kv("K", args.K)
        _kv("sigma", args.sigma)
        _kv("c", cfg.c)
        _kv("delta", cfg.delta)
        _kv("t_w", bounds.wait_time(gap, args.sigma, args.K, cfg))
        lam = bounds.sampling_period(args.K, cfg)
        _kv("lambda", lam)
        for g in gap_list:
            t_elim = bounds.elimination_time_bound(g, args.sigma, lam, args.K, cfg)
            print(f"elim_time gap={_fmt(g)} T={_fmt(t_elim)}")
        exact, rounded = bounds.wtcs_cost_bound(gap, args.sigma, args.K, cfg)
        _kv("wtcs_bound_exact", exact)
        _kv("wtcs_bound_theorem", rounded)
        _kv("pswse_bound", bounds.pswse_cost_bound(inst, cfg))
    except FormulaDomainError as exc:
        raise CliError(str(exc))
    except ValueError as exc:
        raise CliError(str(exc))
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "experiment":
            return _cmd_experiment(args)
        if args.command == "bounds":
            return _cmd_bounds(args)
        raise CliError(f"unknown command {args.command}")
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NonTerminationError, OSError, RuntimeError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
