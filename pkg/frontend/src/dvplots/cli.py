"""dvbandit-plot: render experiment figures from a results CSV."""

import argparse
import sys

from .figures import PANEL_STATS, FigureSpec, SchemaError, \
    render_experiment_figures


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dvbandit-plot",
        description="Render per-experiment figure panels (samples, stopping "
                    "time, cost) from a dvbandit results CSV.")
    parser.add_argument("--csv", required=True, help="results CSV path")
    parser.add_argument("--experiment", required=True,
                        help="experiment id to plot, e.g. exp1")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--panels", default=",".join(PANEL_STATS),
                        help="comma-separated subset of eta,tau,cost")
    parser.add_argument("--log-x", action="store_true", default=None,
                        help="force a log-scaled x axis (automatic for exp4)")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    panels = tuple(p.strip() for p in args.panels.split(",") if p.strip())
    try:
        spec = FigureSpec(csv_path=args.csv, experiment=args.experiment,
                          out_path=args.out, panels=panels, log_x=args.log_x)
        written = render_experiment_figures(spec)
    except (SchemaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(f"wrote {path}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
