#!/usr/bin/env python3
"""Run the bundled experiment set and write one directory per figure.

Each figure directory contains the swept trajectory CSVs, the graph edge
list (for network models) and a manifest; ``summary.csv`` at the top level
collects the terminal row and survivability score of every sweep point.

Usage:
    python3 scripts/reproduce_figures.py --output-dir out/figures
"""
import argparse

from netspread.experiments import reproduce_figures


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--output-dir", default="out/figures")
    args = parser.parse_args()
    results = reproduce_figures(args.output_dir)
    for name, res in sorted(results.items()):
        errors = sum(1 for p in res.points if p.error is not None)
        scores = [f"{p.score:.4g}" for p in res.points if p.score is not None]
        line = f"{name}: points={len(res.points)} errors={errors}"
        if scores:
            line += f" scores=[{', '.join(scores)}]"
        print(line)
    print(f"wrote {args.output_dir}/summary.csv")


if __name__ == "__main__":
    main()
