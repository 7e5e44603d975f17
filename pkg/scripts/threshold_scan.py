#!/usr/bin/env python3
"""Scan the link probability across the survivability threshold.

For each beta in a range, prints the survivability score and the expected
carrier count after a long mean-field run, showing extinction for scores
below 1 and persistence above it.

Usage:
    python3 scripts/threshold_scan.py --family lattice4 --rows 20 --cols 20
    python3 scripts/threshold_scan.py --family powerlaw --n 400 --seed 11
"""
import argparse

from netspread.graphs import gen_binomial, gen_lattice4, gen_powerlaw
from netspread.meanfield import LinkProbs, MeanFieldBoundsError, MfState, NodeParams, run
from netspread.spectral import survivability_score


def build_graph(args):
    if args.family == "lattice4":
        return gen_lattice4(args.rows, args.cols)
    if args.family == "powerlaw":
        return gen_powerlaw(args.n, args.m, args.seed)
    return gen_binomial(args.n, args.p, args.seed)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--family", default="lattice4",
                        choices=("lattice4", "powerlaw", "binomial"))
    parser.add_argument("--rows", type=int, default=20)
    parser.add_argument("--cols", type=int, default=20)
    parser.add_argument("--n", type=int, default=400)
    parser.add_argument("--m", type=int, default=2)
    parser.add_argument("--p", type=float, default=0.02)
    parser.add_argument("--seed", type=int, default=11)
    parser.add_argument("--delta", type=float, default=0.5)
    parser.add_argument("--gamma", type=float, default=0.3)
    parser.add_argument("--beta-start", type=float, default=0.05)
    parser.add_argument("--beta-step", type=float, default=0.05)
    parser.add_argument("--points", type=int, default=8)
    parser.add_argument("--steps", type=int, default=2000)
    args = parser.parse_args()

    g = build_graph(args)
    params = NodeParams.homogeneous(
        g.n, r=1.0, delta=args.delta, gamma=args.gamma)
    print(f"graph: family={args.family} n={g.n} edges={g.num_edges}")
    print(f"{'beta':>8} {'score':>10} {'verdict':>10} {'carriers_final':>16}")
    for k in range(args.points):
        beta = args.beta_start + k * args.beta_step
        links = LinkProbs.homogeneous(g, beta)
        verdict = survivability_score(g, links, params)
        try:
            res = run("sis", MfState.uniform(g.n, p0=0.1), links, params,
                      max_steps=args.steps, tol=0.0)
            carriers = f"{res.trajectory.columns['carriers'][-1]:16.6g}"
        except MeanFieldBoundsError as exc:
            carriers = f"bounds error: {exc.violations[0].kind}"
        print(f"{beta:8.3f} {verdict.score:10.5f} {verdict.status:>10} "
              f"{carriers}")


if __name__ == "__main__":
    main()
