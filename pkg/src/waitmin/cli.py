"""Command-line front end.

Subcommands::

    analytic      closed-form summary for one (lambda, mu, d)
    optimize      wait-minimizing threshold for one (lambda, mu)
    simulate      discrete-event run cross-checked against the closed form
    distribution  queue-length pmf as CSV on stdout
    sweep         evaluate a JSON sweep config into CSV files (and PNGs)

Scalar reports are ``key=value`` lines with 12 significant digits; tables
are CSV. A simulated quantity is always printed next to its analytic
counterpart so a disagreement is visible in the output itself.

Exit codes: 0 success; 2 bad arguments or config; 3 the optimizer's search
bound was proven too small; 4 simulation and closed form disagree by more
than five CI half-widths.
"""

from __future__ import annotations

import argparse
import sys

from . import analytic, oracle
from .model import ValidationError, new_params
from .optimizer import BoundTooSmallError, find_d_star, heuristic_d_star
from .simulator import SimConfig, replicate
from .sweeps import default_lmax, load_config, run_config

__all__ = ["main", "build_parser"]

_DISAGREEMENT_HALF_WIDTHS = 5.0


def _fmt(value) -> str:
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".12g")


def _emit(*pairs: tuple[str, object]) -> None:
    for key, value in pairs:
        print(f"{key}={_fmt(value)}")


def _add_rates(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--lambda", dest="lam", type=float, required=True,
                     help="transaction arrival rate (> 0)")
    sub.add_argument("--mu", type=float, default=1.0,
                     help="mining-round completion rate (> 0, default 1)")


def _add_sim_knobs(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--transactions", type=int, default=1_000_000,
                     help="recorded post-warm-up waits (default 1000000)")
    sub.add_argument("--warmup", type=int, default=10_000,
                     help="picked-up transactions discarded first (default 10000)")
    sub.add_argument("--seed", type=int, default=0, help="PCG64 master seed (default 0)")
    sub.add_argument("--replications", type=int, default=1,
                     help="independent runs to pool (default 1)")
    sub.add_argument("--batch-count", type=int, default=30,
                     help="batches for the single-run CI (default 30)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="waitmin",
        description="threshold-batch mining queue: closed forms, optimizer, simulator",
    )
    # the oracle subcommand is a numerical cross-check, deliberately absent
    # from the advertised choices
    subs = parser.add_subparsers(
        dest="command",
        required=True,
        metavar="{analytic,optimize,simulate,distribution,sweep}",
    )

    p = subs.add_parser("analytic", help="closed-form summary for one parameter point")
    _add_rates(p)
    p.add_argument("--d", type=int, required=True, help="pickup threshold (>= 1)")
    p.set_defaults(handler=_cmd_analytic)

    p = subs.add_parser("optimize", help="find the wait-minimizing threshold")
    _add_rates(p)
    p.add_argument("--search-bound", type=int, default=None,
                   help="highest threshold scanned (default: scales with lambda/mu)")
    p.set_defaults(handler=_cmd_optimize)

    p = subs.add_parser("simulate", help="simulate and cross-check the closed form")
    _add_rates(p)
    p.add_argument("--d", type=int, required=True, help="pickup threshold (>= 1)")
    _add_sim_knobs(p)
    p.set_defaults(handler=_cmd_simulate)

    p = subs.add_parser("distribution", help="queue-length pmf as CSV on stdout")
    _add_rates(p)
    p.add_argument("--d", type=int, required=True, help="pickup threshold (>= 1)")
    p.add_argument("--lmax", type=int, default=None,
                   help="largest queue length tabulated (default: scales with d and lambda/mu)")
    p.set_defaults(handler=_cmd_distribution)

    p = subs.add_parser("sweep", help="evaluate a JSON sweep config into CSV files")
    p.add_argument("config", help="path to the sweep config (JSON)")
    p.add_argument("--output-dir", default="./out",
                   help="directory for CSV/PNG files (default ./out)")
    p.add_argument("--no-plot", action="store_true", help="skip PNG rendering")
    p.set_defaults(handler=_cmd_sweep)

    p = subs.add_parser("oracle")
    _add_rates(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n-max", type=int, default=None,
                   help="truncation level of the cross-check chain")
    p.set_defaults(handler=_cmd_oracle)

    return parser


def _cmd_analytic(args: argparse.Namespace) -> int:
    params = new_params(args.lam, args.mu)
    dist = analytic.StationaryDistribution.for_policy(params, args.d)
    summary = analytic.mean_wait(params, args.d)
    _emit(
        ("lambda", params.arrival_rate),
        ("mu", params.service_rate),
        ("d", args.d),
        ("rho", params.rho),
        ("pi_n0", dist.p0),
        ("busy_fraction", dist.busy_mass()),
        ("idle_fraction", dist.idle_mass()),
        ("mean_queue_length", summary.l_bar),
        ("mean_wait", summary.w_bar),
        ("mu_mean_wait", summary.w_bar_normalized),
        ("mean_batch_size", analytic.mean_batch_size(params, args.d)),
        ("asymptotic_mean_wait", analytic.asymptotic_wait(params, args.d)),
    )
    return 0


def _cmd_optimize(args: argparse.Namespace) -> int:
    params = new_params(args.lam, args.mu)
    best = find_d_star(params, args.search_bound)
    _emit(
        ("lambda", params.arrival_rate),
        ("mu", params.service_rate),
        ("d_star", best.d_star),
        ("d_heuristic", best.d_heuristic),
        ("mean_wait_at_d_star", best.w_star),
        ("mu_mean_wait_at_d_star", params.service_rate * best.w_star),
        ("mean_wait_at_d1", best.w_baseline),
        ("reduction_vs_d1", best.reduction),
        ("search_bound", best.search_bound),
    )
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    params = new_params(args.lam, args.mu)
    config = SimConfig(
        seed=args.seed,
        num_transactions=args.transactions,
        warmup_transactions=args.warmup,
        replications=args.replications,
        batch_count=args.batch_count,
    )
    summary = analytic.mean_wait(params, args.d)
    dist = analytic.StationaryDistribution.for_policy(params, args.d)
    result = replicate(params, args.d, config)
    z = (result.mean_wait - summary.w_bar) / result.ci_half_width
    _emit(
        ("lambda", params.arrival_rate),
        ("mu", params.service_rate),
        ("d", args.d),
        ("seed", config.seed),
        ("replications", result.replications),
        ("recorded", result.recorded),
        ("analytic_mean_wait", summary.w_bar),
        ("sim_mean_wait", result.mean_wait),
        ("sim_ci_half_width", result.ci_half_width),
        ("analytic_mu_mean_wait", summary.w_bar_normalized),
        ("sim_mu_mean_wait", result.mean_wait_normalized),
        ("analytic_idle_fraction", dist.idle_mass()),
        ("sim_idle_fraction", result.miner_idle_fraction),
        ("analytic_mean_batch_size", analytic.mean_batch_size(params, args.d)),
        ("sim_mean_batch_size", result.mean_batch_size),
        ("analytic_mean_queue_length", summary.l_bar),
        ("sim_mean_queue_length", result.time_avg_queue_length),
        ("z_score", z),
    )
    if abs(z) > _DISAGREEMENT_HALF_WIDTHS:
        print(
            f"error: simulated mean wait is {abs(z):.1f} CI half-widths from the "
            f"closed form (limit {_DISAGREEMENT_HALF_WIDTHS:g}); either the seed "
            "drew a wild trajectory or something is broken",
            file=sys.stderr,
        )
        return 4
    return 0


def _cmd_distribution(args: argparse.Namespace) -> int:
    params = new_params(args.lam, args.mu)
    dist = analytic.StationaryDistribution.for_policy(params, args.d)
    lmax = args.lmax if args.lmax is not None else default_lmax(params.load_ratio, args.d)
    if lmax < 0:
        raise ValidationError(f"lmax must be >= 0, got {lmax}")
    print("l,pi_l")
    for l in range(lmax + 1):
        print(f"{l},{_fmt(dist.pmf(l))}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    specs = load_config(args.config)

    def progress(message: str) -> None:
        print(message, file=sys.stderr, flush=True)

    artifacts = run_config(specs, args.output_dir, progress if sys.stderr.isatty() else None)
    for art in artifacts:
        print(f"wrote {art.path}")
    if not args.no_plot:
        from .plots import render_all

        for png in render_all(artifacts):
            print(f"wrote {png}")
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    params = new_params(args.lam, args.mu)
    chain = oracle.build_chain(params, args.d, args.n_max)
    w_oracle = oracle.oracle_mean_wait(chain)
    w_closed = analytic.mean_wait(params, args.d).w_bar
    _emit(
        ("lambda", params.arrival_rate),
        ("mu", params.service_rate),
        ("d", args.d),
        ("n_max", chain.n_max),
        ("oracle_mean_wait", w_oracle),
        ("analytic_mean_wait", w_closed),
        ("relative_gap", abs(w_oracle - w_closed) / w_closed),
    )
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ValidationError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except BoundTooSmallError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
