"""Command-line experiment runner.

Subcommands: cond, compare-samplers, adapt, fully-adapt, budget-table,
sampler-stats, plots. Parameters come from an optional JSON configuration
file plus command-line overrides (flags win), so a frozen config committed
next to its outputs reproduces them bit for bit under the same seed. The
OPTWLS_OUT environment variable sets the output root directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import experiments as exp

_RUNNERS = {
    "cond": ("cond", exp.run_cond_experiment),
    "compare-samplers": ("compare_samplers", exp.run_sampler_comparison),
    "adapt": ("adaptive", exp.run_adaptive_experiment),
    "fully-adapt": ("fully_adaptive", exp.run_adaptive_experiment),
    "budget-table": ("budget_table", exp.run_budget_table),
    "sampler-stats": ("sampler_stats", exp.run_sampler_stats),
}

_DEFAULTS = {
    "cond": dict(d=1, family="hermite", replications=100, k_max=30),
    "compare-samplers": dict(d=1, family="hermite", replications=500, k_max=40),
    "adapt": dict(d=16, family="legendre", replications=10, k_max=25),
    "fully-adapt": dict(d=16, family="legendre", replications=10, k_max=25, xi=0.9),
    "budget-table": dict(replications=2000, k_max=20),
    "sampler-stats": dict(replications=5000, k_max=20),
}


def _add_experiment_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="JSON configuration file (flags override it)")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--replications", type=int, help="number of replications")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--jobs", type=int, help="parallel replication workers")
    parser.add_argument("--d", type=int, help="dimension")
    parser.add_argument("--family", choices=["legendre", "hermite"], help="polynomial family")
    parser.add_argument("--alpha", type=float, help="failure probability")
    parser.add_argument("--s", type=float, help="confidence-split exponent (> 1)")
    parser.add_argument("--beta", type=float, help="bulk fraction")
    parser.add_argument("--k-max", type=int, dest="k_max", help="number of iterations")
    parser.add_argument("--k-sg", type=int, dest="k_sg", help="safeguard period")
    parser.add_argument("--xi", type=float, help="stability threshold (fully adaptive)")
    parser.add_argument("--cv-count", type=int, dest="cv_count", help="validation points")
    parser.add_argument(
        "--max-new-indices", type=int, dest="max_new_indices",
        help="cap on indices added per step of the random growth schedule",
    )
    parser.add_argument(
        "--scaling", choices=["theta", "quadratic"],
        help="sample scaling of the sampler comparison",
    )


def _build_config(name: str, args: argparse.Namespace) -> exp.ExperimentConfig:
    experiment, _ = _RUNNERS[name]
    settings = dict(_DEFAULTS.get(name, {}))
    settings["experiment"] = experiment
    if args.config:
        with open(args.config) as fh:
            settings.update(json.load(fh))
        settings["experiment"] = experiment
    for key in (
        "seed", "replications", "jobs", "d", "family", "alpha", "s", "beta",
        "k_max", "k_sg", "xi", "cv_count", "max_new_indices", "scaling",
    ):
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    if args.out:
        settings["output_dir"] = args.out
    elif "output_dir" not in settings:
        root = os.environ.get("OPTWLS_OUT", "runs")
        settings["output_dir"] = os.path.join(root, experiment)
    return exp.ExperimentConfig.from_mapping(settings)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="optwls", description="Weighted least-squares approximation experiments"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _RUNNERS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        _add_experiment_arguments(p)
    plots = sub.add_parser("plots", help="emit plot scripts for an existing run directory")
    plots.add_argument("run_dir", help="directory holding experiment CSV files")

    args = parser.parse_args(argv)
    if args.command == "plots":
        try:
            written = exp.emit_plot_scripts(args.run_dir)
        except FileNotFoundError as err:
            print(f"error: {err}", file=sys.stderr)
            return 1
        for path in written:
            print(path)
        return 0

    _, runner = _RUNNERS[args.command]
    cfg = _build_config(args.command, args)
    out_dir = runner(cfg, cfg.output_dir)
    print(out_dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
