"""Command-line interface.

Subcommands: generate, ode, meanfield, mc, spectral, isolate, sweep,
reproduce-figures.  On validation failure the process exits nonzero after
printing a machine-readable error JSON to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys

from .experiments import ConfigError, ExperimentConfig, reproduce_figures, run_experiment
from .graphs import (
    EdgeListFormatError,
    gen_binomial,
    gen_exponential,
    gen_lattice4,
    gen_powerlaw,
    load_edge_list,
    save_edge_list,
)
from .isolation import (
    greedy_edge_removal,
    nn_hamiltonian_cycle,
    prune_to_cycle,
    rewire_to_lattice,
)
from .meanfield import (
    LinkProbs,
    MeanFieldBoundsError,
    MfState,
    NodeParams,
    ParamRegimeError,
)
from .meanfield import run as meanfield_run
from .montecarlo import mc_ensemble
from .ode import IntegrationInstabilityError, OdeParams, OdeState, integrate
from .spectral import survivability_score

_VALIDATION_ERRORS = (
    ConfigError,
    EdgeListFormatError,
    ParamRegimeError,
    ValueError,
    FileNotFoundError,
)
_RUNTIME_ERRORS = (MeanFieldBoundsError, IntegrationInstabilityError)


def _graph_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--graph", help="path to an edge-list file")
    parser.add_argument(
        "--family", choices=["binomial", "powerlaw", "exponential", "lattice4"]
    )
    parser.add_argument("--n", type=int)
    parser.add_argument("--p", type=float, help="edge probability (binomial)")
    parser.add_argument("--m", type=int, help="attachment count (powerlaw)")
    parser.add_argument("--lam", type=float, help="degree rate (exponential)")
    parser.add_argument("--rows", type=int, help="torus rows (lattice4)")
    parser.add_argument("--cols", type=int, help="torus cols (lattice4)")
    parser.add_argument("--seed", type=int, default=0)


def _build_graph(args: argparse.Namespace):
    if args.graph:
        return load_edge_list(args.graph)
    if args.family == "binomial":
        if args.n is None or args.p is None:
            raise ValueError("binomial family needs --n and --p")
        return gen_binomial(args.n, args.p, args.seed)
    if args.family == "powerlaw":
        if args.n is None or args.m is None:
            raise ValueError("powerlaw family needs --n and --m")
        return gen_powerlaw(args.n, args.m, args.seed)
    if args.family == "exponential":
        if args.n is None or args.lam is None:
            raise ValueError("exponential family needs --n and --lam")
        return gen_exponential(args.n, args.lam, args.seed)
    if args.family == "lattice4":
        if args.rows is None or args.cols is None:
            raise ValueError("lattice4 family needs --rows and --cols")
        return gen_lattice4(args.rows, args.cols)
    raise ValueError("provide --graph FILE or --family with its parameters")


def _node_param_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--beta", type=float, required=True)
    parser.add_argument("--gamma", type=float, required=True)
    parser.add_argument("--delta", type=float, required=True)
    parser.add_argument("--r", type=float, default=1.0)
    parser.add_argument("--nu", type=float, default=1.0)
    parser.add_argument("--chi", type=float, default=0.0)


def _node_params(n: int, args: argparse.Namespace) -> NodeParams:
    return NodeParams.homogeneous(
        n, r=args.r, delta=args.delta, gamma=args.gamma, nu=args.nu, chi=args.chi
    )


def _cmd_generate(args: argparse.Namespace) -> int:
    if args.graph:
        raise ValueError("generate takes --family, not --graph")
    g = _build_graph(args)
    save_edge_list(g, args.output)
    print(f"nodes={g.n} edges={g.num_edges} output={args.output}")
    return 0


def _cmd_ode(args: argparse.Namespace) -> int:
    params = OdeParams(beta=args.beta, gamma=args.gamma, mu=args.mu)
    s0 = args.s0 if args.s0 is not None else 1.0 - args.i0
    traj = integrate(
        args.model, OdeState(s=s0, i=args.i0), params, dt=args.dt, t_end=args.t_end
    )
    traj.write_csv(args.output)
    last = len(traj) - 1
    print(
        f"model={args.model} t_end={traj.times[last]:.6g} "
        f"s={traj.columns['s'][last]:.6g} i={traj.columns['i'][last]:.6g} "
        f"output={args.output}"
    )
    return 0


def _cmd_meanfield(args: argparse.Namespace) -> int:
    g = _build_graph(args)
    params = _node_params(g.n, args)
    links = LinkProbs.homogeneous(g, args.beta)
    state0 = MfState.uniform(g.n, p0=args.p0, w0=args.w0)
    result = meanfield_run(
        args.model,
        state0,
        links,
        params,
        max_steps=args.steps,
        tol=args.tol,
        allow_negative_coefficients=args.allow_negative_coefficients,
    )
    result.trajectory.write_csv(args.output)
    carriers = result.trajectory.columns["carriers"][-1]
    print(
        f"model={args.model} steps={result.steps} converged={result.converged} "
        f"carriers_final={carriers:.6g} violations={len(result.violations)} "
        f"output={args.output}"
    )
    return 0


def _cmd_mc(args: argparse.Namespace) -> int:
    g = _build_graph(args)
    params = _node_params(g.n, args)
    links = LinkProbs.homogeneous(g, args.beta)
    ensemble = mc_ensemble(
        g, links, params,
        init=args.init, steps=args.steps, runs=args.runs, seed=args.master_seed,
    )
    ensemble.write_csv(args.output)
    print(
        f"runs={args.runs} steps={args.steps} "
        f"final_hasinfo_mean={ensemble.mean[-1, 1]:.6g} output={args.output}"
    )
    return 0


def _cmd_spectral(args: argparse.Namespace) -> int:
    g = _build_graph(args)
    params = _node_params(g.n, args)
    links = LinkProbs.homogeneous(g, args.beta)
    result = survivability_score(g, links, params)
    print(f"s={result.score:.12g} fast_extinction={result.status}")
    if args.eigenvector_csv:
        from .spectral import build_system_matrix, largest_eigenvalue_magnitude

        res = largest_eigenvalue_magnitude(build_system_matrix(g, links, params))
        lines = ["node,value"]
        lines.extend(f"{i},{res.vector[i]:.12e}" for i in range(g.n))
        with open(args.eigenvector_csv, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    return 0


def _cmd_isolate(args: argparse.Namespace) -> int:
    g = _build_graph(args)
    params = _node_params(g.n, args)
    if args.strategy == "greedy":
        modified, report = greedy_edge_removal(
            g, args.k, beta_template=args.beta, params=params
        )
    elif args.strategy == "cycle":
        search = nn_hamiltonian_cycle(g, start=args.start)
        if not search.success:
            payload = {
                "strategy": "cycle",
                "success": False,
                "reason": search.reason,
                "partial_path_length": len(search.path),
            }
            with open(args.output_report, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, indent=2)
                fh.write("\n")
            print(f"strategy=cycle success=false reason={search.reason!r}")
            return 0
        modified, report = prune_to_cycle(
            g, search.cycle, beta_template=args.beta, params=params
        )
    else:
        modified, report = rewire_to_lattice(
            g, beta_template=args.beta, params=params
        )
    save_edge_list(modified, args.output_graph)
    payload = {"success": True, **report.to_dict()}
    with open(args.output_report, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    print(
        f"strategy={args.strategy} lambda1_before={report.lambda1_before:.6g} "
        f"lambda1_after={report.lambda1_after:.6g} "
        f"score_before={report.score_before:.6g} score_after={report.score_after:.6g} "
        f"threshold_crossed={report.threshold_crossed}"
    )
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_json(args.config)
    result = run_experiment(config, args.output_dir)
    errors = sum(1 for p in result.points if p.error is not None)
    print(
        f"points={len(result.points)} errors={errors} "
        f"manifest={result.manifest_path}"
    )
    return 0


def _cmd_reproduce_figures(args: argparse.Namespace) -> int:
    results = reproduce_figures(args.output_dir)
    for name, res in sorted(results.items()):
        errors = sum(1 for p in res.points if p.error is not None)
        print(f"{name}: points={len(res.points)} errors={errors}")
    print(f"summary={args.output_dir}/summary.csv")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netspread",
        description="Propagation dynamics on networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a graph and save its edge list")
    _graph_arguments(p)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("ode", help="integrate a continuous compartment model")
    p.add_argument("--model", choices=["sir_epidemic", "sir_endemic", "sis"],
                   required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--s0", type=float, default=None)
    p.add_argument("--i0", type=float, default=0.01)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--t-end", type=float, default=100.0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_ode)

    p = sub.add_parser("meanfield", help="run the discrete mean-field dynamics")
    p.add_argument("--model", choices=["sis", "sirs"], default="sis")
    _graph_arguments(p)
    _node_param_arguments(p)
    p.add_argument("--p0", type=float, default=0.1)
    p.add_argument("--w0", type=float, default=0.0)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--allow-negative-coefficients", action="store_true")
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_meanfield)

    p = sub.add_parser("mc", help="run a Monte Carlo ensemble")
    _graph_arguments(p)
    _node_param_arguments(p)
    p.add_argument("--init", type=float, default=0.1,
                   help="initial carrier fraction")
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--master-seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_mc)

    p = sub.add_parser("spectral", help="survivability score of a network")
    _graph_arguments(p)
    _node_param_arguments(p)
    p.add_argument("--eigenvector-csv", default=None)
    p.set_defaults(func=_cmd_spectral)

    p = sub.add_parser("isolate", help="apply an edge-isolation strategy")
    _graph_arguments(p)
    _node_param_arguments(p)
    p.add_argument("--strategy", choices=["greedy", "cycle", "lattice"],
                   required=True)
    p.add_argument("--k", type=int, default=1,
                   help="edges to remove (greedy strategy)")
    p.add_argument("--start", type=int, default=0,
                   help="start node for the cycle search")
    p.add_argument("--output-graph", required=True)
    p.add_argument("--output-report", required=True)
    p.set_defaults(func=_cmd_isolate)

    p = sub.add_parser("sweep", help="run a config-driven experiment sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("reproduce-figures",
                       help="run the bundled figure-style experiment set")
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=_cmd_reproduce_figures)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _RUNTIME_ERRORS as exc:
        json.dump({"error": str(exc), "type": type(exc).__name__}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    except _VALIDATION_ERRORS as exc:
        payload = {"error": str(exc), "type": type(exc).__name__}
        if isinstance(exc, ConfigError):
            payload["field"] = exc.field
        json.dump(payload, sys.stderr)
        sys.stderr.write("\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
