"""Command-line front end: ``memconsensus <subcommand> [flags]``.

Exit codes: 0 success, 2 bad parameters, 3 failed precondition (e.g. the
parameters are outside the consensus region), 4 numerical failure.
"""
import argparse
import re
import sys

import numpy as np

from . import _accel, figures
from .errors import NumericError, ParameterError, PreconditionError
from .graph import format_edge_list, generate_graph, load_edge_list, spectrum
from .h2core import METHODS, h2, h2_gramian_bruteforce
from .search import optimal_depth, optimal_params, sweep_beta
from .serialize import (disagreement_csv, param_rows, region_json, region_rows, sweep_csv,
                        to_csv, to_json)
from .simulate import SimConfig, estimate_msd, simulate_noise_free
from .stability import ProtocolParams, consensus_region

EXIT_OK, EXIT_PARAM, EXIT_PRECOND, EXIT_NUMERIC = 0, 2, 3, 4

FAMILY_HELP = ("graph family: complete, star, chain, ring_lattice (needs --d), "
               "ringD shorthand (e.g. ring2), barabasi_albert (needs --m, --seed)")


# ------------------------------------------------------------------ parser

def _add_graph(p):
    g = p.add_argument_group("graph")
    g.add_argument("--family", help=FAMILY_HELP)
    g.add_argument("--n", type=int, help="number of agents (>= 3)")
    g.add_argument("--d", type=int, help="ring lattice neighbours per side")
    g.add_argument("--m", type=int, help="Barabasi-Albert edges per new vertex")
    g.add_argument("--seed", type=int, help="random seed (Barabasi-Albert graphs, simulation)")
    g.add_argument("--graph-file", help="edge list: header 'n m', then 1-based 'i j w' lines")


def _add_beta(p, required=True):
    b = p.add_mutually_exclusive_group(required=required)
    b.add_argument("--beta", type=float, help="coupling gain (absolute)")
    b.add_argument("--beta-rel", type=float,
                   help="coupling gain as a fraction x of 2/lambda_n (beta = x * 2/lambda_n)")


def _add_common(p, default_format):
    p.add_argument("--format", choices=("json", "csv"), default=default_format,
                   help=f"output format (default: {default_format})")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--threads", type=int, help="cap on worker threads; results do not depend on it")


def build_parser():
    ap = argparse.ArgumentParser(prog="memconsensus",
                                 description="H2 robustness of consensus with tunable memory depth.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("graph", help="build a graph and print its Laplacian spectrum",
                       description="JSON: spectrum summary. CSV: edge list 'i,j,w' (1-based).")
    _add_graph(p)
    _add_common(p, "json")

    p = sub.add_parser("region", help="consensus region over an (alpha, beta) grid",
                       description="Grid strictly inside (0,1) x (0, beta_max); CSV 'alpha,beta,stable'.")
    _add_graph(p)
    p.add_argument("--theta", type=int, default=1, help="memory depth (default: 1)")
    p.add_argument("--alpha-steps", type=int, default=50, help="alpha grid size (default: 50)")
    p.add_argument("--beta-steps", type=int, default=50, help="beta grid size (default: 50)")
    p.add_argument("--beta-max-rel", type=float, default=1.0,
                   help="beta grid upper end as a multiple of 2/lambda_n (default: 1.0)")
    _add_common(p, "csv")

    p = sub.add_parser("h2", help="H2 performance metric",
                       description="JSON: method, value, per_mode, params. CSV: per-mode table.")
    _add_graph(p)
    p.add_argument("--alpha", type=float, required=True, help="memory factor in [0, 1]")
    _add_beta(p)
    p.add_argument("--theta", type=int, default=1, help="memory depth (default: 1)")
    p.add_argument("--method", choices=("auto",) + METHODS, default="auto",
                   help="evaluation route (default: auto)")
    p.add_argument("--horizon", type=int, default=5000,
                   help="truncation length for gramian_bruteforce (default: 5000)")
    _add_common(p, "json")

    p = sub.add_parser("simulate", help="Monte Carlo mean-square deviation",
                       description="JSON: SimResult. CSV: noise-free disagreement trace 't,disagreement' "
                                   "from a seeded Gaussian initial history over --horizon steps.")
    _add_graph(p)
    p.add_argument("--alpha", type=float, required=True, help="memory factor in [0, 1]")
    _add_beta(p)
    p.add_argument("--theta", type=int, default=1, help="memory depth (default: 1)")
    p.add_argument("--trials", type=int, default=64, help="independent trials (default: 64)")
    p.add_argument("--horizon", type=int, default=20000, help="time steps per trial (default: 20000)")
    p.add_argument("--burn-in", type=int, default=2000, help="discarded initial steps (default: 2000)")
    p.add_argument("--init-scale", type=float, default=0.0,
                   help="std of the random initial history (default: 0, start at consensus)")
    _add_common(p, "json")

    p = sub.add_parser("optimal-depth", help="best memory depth in 1..theta_max",
                       description="With --beta/--beta-rel: one search. Without: sweep --beta-steps "
                                   "interior points of (0, 2/lambda_n), CSV 'beta,optimal_theta,h2'.")
    _add_graph(p)
    p.add_argument("--alpha", type=float, default=0.5, help="memory factor (default: 0.5)")
    _add_beta(p, required=False)
    p.add_argument("--theta-max", type=int, default=10, help="largest depth (default: 10)")
    p.add_argument("--beta-steps", type=int, default=40, help="sweep size when beta is omitted (default: 40)")
    p.add_argument("--method", choices=("analytic", "simulate"), default="analytic",
                   help="metric evaluation (default: analytic; simulate needs --seed)")
    p.add_argument("--trials", type=int, default=64, help="Monte Carlo trials (default: 64)")
    p.add_argument("--horizon", type=int, default=20000, help="Monte Carlo horizon (default: 20000)")
    p.add_argument("--burn-in", type=int, default=2000, help="Monte Carlo burn-in (default: 2000)")
    _add_common(p, "json")

    p = sub.add_parser("optimal-params", help="grid search plus refinement for (alpha, beta)",
                       description="CSV 'alpha,beta,h2,stable' over the coarse grid; JSON adds the optimum.")
    _add_graph(p)
    p.add_argument("--theta", type=int, default=1, help="memory depth (default: 1)")
    p.add_argument("--alpha-steps", type=int, default=60, help="alpha grid size (default: 60)")
    p.add_argument("--beta-steps", type=int, default=60, help="beta grid size (default: 60)")
    p.add_argument("--refine", type=int, default=4, help="refinement rounds (default: 4)")
    _add_common(p, "json")

    p = sub.add_parser("figure", help="data tables behind the discussion figures",
                       description="fig1: optimal depth vs beta for sizes 3..n; fig2: metric vs alpha; "
                                   "fig3: metric vs depth; fig4: (alpha, beta) surface; fig5: BA depth map.")
    p.add_argument("--id", required=True, choices=figures.FIGURES, help="figure id")
    _add_graph(p)
    p.add_argument("--alpha", type=float, help="memory factor (figure default if omitted)")
    p.add_argument("--theta", type=int, help="memory depth (fig4)")
    p.add_argument("--theta-max", type=int, help="largest depth (fig1, fig2, fig3, fig5)")
    p.add_argument("--alpha-steps", type=int, help="alpha grid size (fig2, fig4, fig5)")
    p.add_argument("--beta-steps", type=int, help="beta grid size (fig1, fig4, fig5)")
    p.add_argument("--refine", type=int, help="refinement rounds (fig4)")
    _add_common(p, "csv")
    return ap


# ---------------------------------------------------------------- helpers

def _family(name, d):
    m = re.fullmatch(r"ring(\d+)", name or "")
    if m:
        return "ring_lattice", int(m.group(1))
    return name, d


def _graph(args):
    if args.graph_file:
        if args.family:
            raise ParameterError("give either --graph-file or --family, not both")
        return load_edge_list(args.graph_file)
    if not args.family or args.n is None:
        raise ParameterError("graph input needs --family and --n, or --graph-file")
    family, d = _family(args.family, args.d)
    return generate_graph(family, args.n, d=d, m=args.m, seed=args.seed)


def _beta(args, spec):
    if args.beta_rel is not None:
        return args.beta_rel * 2.0 / spec.lambda_max
    return args.beta


def _need_seed(args):
    if args.seed is None:
        raise ParameterError("stochastic jobs require --seed")


def _interior(steps, hi):
    if steps < 1:
        raise ParameterError(f"grid size must be >= 1, got {steps}")
    return np.arange(1, steps + 1) / (steps + 1) * hi


# --------------------------------------------------------------- commands

def _cmd_graph(args):
    g = _graph(args)
    spec = spectrum(g)
    if args.format == "csv":
        return to_csv(["i", "j", "w"], [(i + 1, j + 1, w) for i, j, w in g.edges()])
    return to_json({"name": g.name, "n": g.n, "edges": len(g.edges()),
                    "eigenvalues": spec.eigenvalues, "lambda2": spec.lambda2,
                    "lambda_n": spec.lambda_max, "connected": spec.connected,
                    "edge_list": format_edge_list(g)})


def _cmd_region(args):
    spec = spectrum(_graph(args))
    if not args.beta_max_rel > 0:
        raise ParameterError("--beta-max-rel must be positive")
    alphas = _interior(args.alpha_steps, 1.0)
    betas = _interior(args.beta_steps, args.beta_max_rel * 2.0 / spec.lambda_max)
    mask = consensus_region(spec, args.theta, alphas, betas)
    if args.format == "csv":
        return to_csv(["alpha", "beta", "stable"], region_rows(alphas, betas, mask))
    return to_json(region_json(alphas, betas, mask, args.theta))


def _cmd_h2(args):
    g = _graph(args)
    spec = spectrum(g)
    params = ProtocolParams(args.alpha, _beta(args, spec), args.theta)
    if args.method == "gramian_bruteforce":
        # whole-network sum, no per-mode split
        value = h2_gramian_bruteforce(g, params, args.horizon)
        if args.format == "csv":
            return to_csv(["value"], [(value,)])
        return to_json({"method": args.method, "value": value, "per_mode": [],
                        "params": {"alpha": params.alpha, "beta": params.beta,
                                   "theta": params.theta}})
    rep = h2(spec, params, method=args.method)
    if args.format == "csv":
        return to_csv(["lambda", "multiplicity", "contribution"],
                      [(m.lam, m.multiplicity, m.contribution) for m in rep.per_mode])
    return to_json(rep.to_dict())


def _cmd_simulate(args):
    _need_seed(args)
    g = _graph(args)
    spec = spectrum(g)
    params = ProtocolParams(args.alpha, _beta(args, spec), args.theta)
    if args.format == "csv":
        rng = np.random.default_rng(args.seed)
        hist = rng.standard_normal((params.theta + 1, g.n))
        return disagreement_csv(simulate_noise_free(g, params, hist, args.horizon))
    cfg = SimConfig(seed=args.seed, trials=args.trials, horizon=args.horizon,
                    burn_in=args.burn_in, init_scale=args.init_scale)
    return to_json(estimate_msd(g, params, cfg).to_dict())


def _cmd_optimal_depth(args):
    spec = spectrum(_graph(args))
    if args.beta is None and args.beta_rel is None:
        sw = sweep_beta(spec, args.alpha, args.theta_max,
                        _interior(args.beta_steps, 2.0 / spec.lambda_max))
        if args.format == "csv":
            return sweep_csv(sw)
        return to_json({"rows": sw.rows, "inv_lambda2": sw.inv_lambda2,
                        "inv_lambdan": sw.inv_lambdan, "two_over_lambdan": sw.two_over_lambdan})
    cfg = None
    if args.method == "simulate":
        _need_seed(args)
        cfg = SimConfig(seed=args.seed, trials=args.trials, horizon=args.horizon,
                        burn_in=args.burn_in)
    res = optimal_depth(spec, args.alpha, _beta(args, spec), args.theta_max,
                        method=args.method, config=cfg)
    if args.format == "csv":
        return to_csv(["theta", "h2"], res.values)
    return to_json(res.to_dict())


def _cmd_optimal_params(args):
    spec = spectrum(_graph(args))
    upper = 2.0 / spec.lambda_max
    res = optimal_params(spec, args.theta, np.linspace(0.02, 0.98, args.alpha_steps),
                         np.linspace(0.02, 0.98, args.beta_steps) * upper, args.refine)
    if args.format == "csv":
        return to_csv(["alpha", "beta", "h2", "stable"], param_rows(res))
    return to_json(res.to_dict())


def _cmd_figure(args):
    if args.graph_file:
        raise ParameterError("figures are built from --family graphs")
    family, d = _family(args.family, args.d)
    kw = {"family": family, "n": args.n, "d": d, "m": args.m, "seed": args.seed,
          "theta_max": args.theta_max, "alpha": args.alpha, "theta": args.theta,
          "alpha_steps": args.alpha_steps, "beta_steps": args.beta_steps, "refine": args.refine}
    accepted = {"fig1": ("family", "n", "d", "m", "seed", "theta_max", "alpha", "beta_steps"),
                "fig2": ("family", "n", "d", "m", "seed", "theta_max", "alpha_steps"),
                "fig3": ("family", "n", "d", "m", "seed", "theta_max", "alpha"),
                "fig4": ("family", "n", "d", "m", "seed", "theta", "alpha_steps", "beta_steps", "refine"),
                "fig5": ("family", "n", "d", "m", "seed", "theta_max", "alpha_steps", "beta_steps")}
    kw = {k: v for k, v in kw.items() if k in accepted[args.id]}
    if args.id != "fig5" and (kw.get("family") is None or kw.get("n") is None):
        raise ParameterError(f"{args.id} needs --family and --n")
    if family == "barabasi_albert" or args.id == "fig5":
        # pin the graph so the table is reproducible
        if args.seed is None and (family == "barabasi_albert" or args.family is None):
            _need_seed(args)
    columns, rows, meta = figures.figure(args.id, **kw)
    if args.format == "csv":
        return to_csv(columns, rows)
    return to_json({"figure": args.id, "columns": columns, "rows": rows, "meta": meta})


COMMANDS = {"graph": _cmd_graph, "region": _cmd_region, "h2": _cmd_h2,
            "simulate": _cmd_simulate, "optimal-depth": _cmd_optimal_depth,
            "optimal-params": _cmd_optimal_params, "figure": _cmd_figure}


def run(argv=None):
    """Parse ``argv``, run the job, write the output; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _accel.set_threads(args.threads)
        text = COMMANDS[args.command](args)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECOND
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except (NumericError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
