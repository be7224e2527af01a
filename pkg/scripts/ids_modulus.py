#!/usr/bin/env python3
"""Scan the integrated density of states of a layered potential and report its
log-Holder modulus on successively finer energy grids.

The IDS of these operators is log-Holder continuous but in general nothing
better, so the products |dk| * log(1/dE) are the quantity to watch: if they
keep climbing as the grid refines near some energy, that energy is a candidate
near-violation worth a dedicated run.
"""

import argparse
import json

from limitper import chain_make, ids_curve, log_holder_report, sawtooth_potential


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--prefix", default="2", help="comma-separated chain prefix")
    parser.add_argument("--rule", default="2", help="comma-separated cyclic ratios")
    parser.add_argument("--depth", type=int, default=8)
    parser.add_argument("--size", type=int, default=10_000, help="truncation size N")
    parser.add_argument("--emin", type=float, default=-2.5)
    parser.add_argument("--emax", type=float, default=2.5)
    args = parser.parse_args()

    chain = chain_make(
        [int(x) for x in args.prefix.split(",")],
        [int(x) for x in args.rule.split(",")] if args.rule else [],
    )
    pot = sawtooth_potential(chain, args.depth)
    out = {"chain": chain.to_json_dict(), "depth": args.depth, "scans": []}
    for points in (101, 401, 1601):
        grid = [args.emin + (args.emax - args.emin) * i / (points - 1) for i in range(points)]
        report = log_holder_report(ids_curve(pot, grid, N=args.size))
        worst = max(report["pairs"], key=lambda r: r["log_holder"])
        out["scans"].append(
            {
                "points": points,
                "max_log_holder": report["max_log_holder"],
                "worst_energy": worst["E"],
            }
        )
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
