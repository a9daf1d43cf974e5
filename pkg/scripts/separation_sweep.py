#!/usr/bin/env python3
"""Sweep measure generators across prime moduli and tabulate uniformity-norm
ratios against progression densities.

One CSV row per (kind, modulus, seed): the centered norm, the norm divided
by the two candidate density powers, and the progression density of the
measure, so the decay of random sets against structured sets can be read off
directly.  Deterministic for a fixed configuration.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, replace

from gowers import GeneratorSpec, ap_density, generate, hypothesis_ratio

HEADER = (
    "kind",
    "n",
    "seed",
    "p",
    "norm",
    "over_p_r",
    "over_p_half_r",
    "density",
    "density_minus_one",
)


@dataclass(frozen=True)
class SweepConfig:
    moduli: tuple[int, ...] = (257, 1009, 4093)
    p: float = 0.2
    seeds: int = 10
    r: int = 2
    kinds: tuple[str, ...] = ("random", "interval", "quadratic")
    budget: float | None = None


def sweep_rows(cfg: SweepConfig):
    for n in cfg.moduli:
        for kind in cfg.kinds:
            seeds = range(cfg.seeds) if kind == "random" else (0,)
            for seed in seeds:
                nu = generate(GeneratorSpec(kind=kind, n=n, p=cfg.p, seed=seed))
                hr = hypothesis_ratio(nu, cfg.r)
                ap = ap_density([nu.fn] * (cfg.r + 1), cfg.budget)
                yield (
                    kind,
                    n,
                    seed,
                    repr(hr.p),
                    repr(hr.norm),
                    repr(hr.over_p_r),
                    repr(hr.over_p_half_r),
                    repr(ap.density),
                    repr(ap.density - 1.0),
                )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--moduli", default=None, help="comma-separated moduli")
    parser.add_argument("--p", type=float, default=None, help="target density")
    parser.add_argument("--seeds", type=int, default=None, help="random draws per modulus")
    parser.add_argument("--r", type=int, default=None, help="norm order")
    parser.add_argument("--budget", type=float, default=None)
    parser.add_argument("--output", default=None, help="CSV path (default stdout)")
    args = parser.parse_args(argv)

    cfg = SweepConfig()
    if args.moduli:
        cfg = replace(cfg, moduli=tuple(int(x) for x in args.moduli.split(",")))
    if args.p is not None:
        cfg = replace(cfg, p=args.p)
    if args.seeds is not None:
        cfg = replace(cfg, seeds=args.seeds)
    if args.r is not None:
        cfg = replace(cfg, r=args.r)
    if args.budget is not None:
        cfg = replace(cfg, budget=args.budget)

    out = open(args.output, "w", newline="", encoding="utf-8") if args.output else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(HEADER)
        for row in sweep_rows(cfg):
            writer.writerow(row)
    finally:
        if args.output:
            out.close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
