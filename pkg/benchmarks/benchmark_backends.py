"""Compare the compiled trial kernels against the pure-Python policy loop.

Runs each policy on the 5-arm benchmark instance (consecutive gaps 0.5,
sigma 10, c = 1, delta = 0.1) for a fixed number of trials per backend and
reports trials/second plus the speedup.  Both backends produce bit-identical
trials (see tests/test_backends.py), so this is purely a throughput
comparison.

Usage: python benchmarks/benchmark_backends.py [--trials N]
"""

import argparse
import time

from dvbandit import (CostConfig, Instance, PolicyConfig, backend,
                      run_monte_carlo)

BASE = Instance(means=(2.0, 1.5, 1.0, 0.5, 0.0), sigma=10.0)
COST = CostConfig(c=1.0, delta=0.1)
SEED = 20250809


def _time_backend(policy: str, n_trials: int, choice: str) -> float:
    gap = 0.5 if policy == "wtcs" else None
    cfg = PolicyConfig(kind=policy, known_gap=gap)
    start = time.perf_counter()
    run_monte_carlo(BASE, cfg, COST, n_trials, SEED, backend_choice=choice)
    return time.perf_counter() - start


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=300,
                        help="trials per (policy, backend) cell")
    args = parser.parse_args()

    if not backend.have_compiled():
        print("compiled extension not built; nothing to compare "
              "(pip install -e . --no-build-isolation builds it)")
        return

    print(f"{args.trials} trials per cell on the 5-arm benchmark instance\n")
    print(f"{'policy':8s} {'python':>12s} {'compiled':>12s} {'speedup':>9s}")
    for policy in ("wtcs", "pswse", "se", "lucb"):
        t_py = _time_backend(policy, args.trials, "python")
        t_c = _time_backend(policy, args.trials, "compiled")
        print(f"{policy:8s} {args.trials / t_py:9.0f}/s {args.trials / t_c:9.0f}/s "
              f"{t_py / t_c:8.1f}x")


if __name__ == "__main__":
    main()
