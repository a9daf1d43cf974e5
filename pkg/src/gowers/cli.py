"""Batch front-end for every engine in the package.

Each subcommand builds its inputs from a seeded generator spec (or a JSON
file holding one), runs the requested computation, and writes a
machine-readable report to stdout or a file.  Exit code 0 means every check
passed, 1 means at least one check failed, 2 means a usage or budget error.
Budget errors carry the estimated elementary-product count and, when the
cost model scales with the modulus, a suggested feasible modulus.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from dataclasses import replace

import numpy as np

from .apcount import RelszConfig, ap_density, hypothesis_ratio, relsz_experiment, telescoping_check
from .budget import DEFAULT_BUDGET, resolve_budget
from .errors import BudgetExceeded, GowersError, NumericalInconsistency
from .genmeasure import KINDS, GeneratorSpec, generate
from .gowersnorm import (
    EdgeFn,
    box_norm_brute,
    cube_vertices,
    gcs_verify,
    u_norm_brute,
    u_norm_fast,
)
from .hypersystem import ap_values, progression_count_check, represent
from .linform import (
    Cap,
    CubePattern,
    Lf2Exponents,
    SlfInstance,
    binomial_expansion_identity,
    chain_verify,
    cube_centered_expectation,
    cube_expectation,
    lf2_chain_verify,
    lf2_expectation,
    lf2_telescoping,
    lf2_term,
    nu_prime,
    nu_prime_l2_dev,
    random_single_instance,
    random_slf_instance,
    single_chain_verify,
    slf_lhs,
    slf_single_lhs,
)
from .report import VerificationReport, eq_check

SCHEMA = 1

# Dominant modulus exponent of each subcommand's budgeted cost, used to turn
# a budget overrun into a suggested feasible modulus.  args -> power.
_COST_POWERS = {
    "norm": lambda a: a.k + 1,
    "boxnorm": lambda a: 2 * a.r,
    "represent": lambda a: a.r + 1,
    "cube": lambda a: 2 * a.r,
    "slf": lambda a: 2 * a.r + 2,
    "slf-single": lambda a: 2 * a.r + 1,
    "nuprime": lambda a: a.r + 2,
    "lf2": lambda a: 2 * a.r,
    "count": lambda a: a.r + 1,
    "experiment": lambda a: 2 * a.r + 1,
}


class UsageError(Exception):
    """Usage error raised after argparse; printed to stderr, exit code 2."""


def _spec_from_args(args) -> GeneratorSpec:
    if getattr(args, "input", None):
        with open(args.input, "r", encoding="utf-8") as fh:
            return GeneratorSpec.from_json_obj(json.load(fh))
    if args.n is None:
        raise UsageError("--n is required (or pass --input with a spec file)")
    return GeneratorSpec(kind=args.kind, n=args.n, p=args.p, seed=args.seed)


def _add_measure_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kind", choices=KINDS, default="random", help="measure generator")
    p.add_argument("--n", type=int, default=None, help="modulus N")
    p.add_argument("--p", type=float, default=0.5, help="target density in (0, 1]")
    p.add_argument("--seed", type=int, default=0, help="generator seed")
    p.add_argument("--input", default=None, help="JSON file with a generator spec")


def _add_common_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--budget",
        type=float,
        default=None,
        help=f"max elementary products (default {DEFAULT_BUDGET:g}, env GOWERS_BUDGET)",
    )
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", default=None, help="write the report here instead of stdout")


def _fold(dst: VerificationReport, sub: VerificationReport, prefix: str) -> None:
    """Merge a sub-report's checks (ids prefixed) and drop its ratios."""
    for c in sub.checks:
        dst.add(replace(c, check=f"{prefix}: {c.check}"))
    dst.notes.extend(f"{prefix}: {note}" for note in sub.notes)


def _random_edge_fn(rng, edge: tuple[int, ...], dims: tuple[int, ...]) -> EdgeFn:
    return EdgeFn(edge, dims, rng.random(dims) * 2.0 - 1.0)


def _checks_csv(reports: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["report", "check", "lhs", "rhs", "margin", "pass", "note"])
    for rep in reports:
        for c in rep["checks"]:
            writer.writerow(
                [
                    rep["name"],
                    c["check"],
                    repr(c["lhs"]),
                    repr(c["rhs"]),
                    repr(c["margin"]),
                    c["pass"],
                    c.get("note", ""),
                ]
            )
    return buf.getvalue()


def _values_csv(values: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["name", "value"])
    for key in sorted(values):
        writer.writerow([key, repr(values[key])])
    return buf.getvalue()


def _emit(obj: dict, args) -> None:
    if args.format == "csv":
        if "ap" in obj:
            ap = obj["ap"]
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(
                ["n", "k", "density", "prediction", "ratio", "trivial_count", "nontrivial_count"]
            )
            writer.writerow(
                [
                    ap["n"],
                    ap["k"],
                    repr(ap["density"]),
                    repr(ap["prediction"]),
                    repr(ap["ratio"]),
                    ap["trivial_count"],
                    ap["nontrivial_count"],
                ]
            )
            text = buf.getvalue()
        elif "suites" in obj:
            text = _checks_csv(obj["suites"])
        elif "reports" in obj:
            text = _checks_csv(obj["reports"])
        elif "report" in obj:
            text = _checks_csv([obj["report"]])
        else:
            text = _values_csv(obj.get("values", {}))
    else:
        text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _result(args, command: str, inputs: dict, extra: dict, passed: bool) -> int:
    obj = {"schema": SCHEMA, "command": command, "inputs": inputs, "pass": passed}
    obj.update(extra)
    _emit(obj, args)
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# Subcommand handlers


def _cmd_norm(args) -> int:
    spec = _spec_from_args(args)
    nu = generate(spec)
    f = nu.centered() if args.centered else nu.fn
    values: dict[str, float] = {}
    checks = []
    if args.mode in ("brute", "both"):
        values["brute"] = u_norm_brute(f, args.k, args.budget)
    if args.mode in ("fast", "both"):
        values["fast"] = u_norm_fast(f, args.k)
    if args.mode == "both":
        scale = max(1.0, abs(values["brute"]))
        checks.append(
            eq_check("dual-route-agreement", values["brute"], values["fast"], 1e-9 * scale)
        )
    passed = all(c.passed for c in checks)
    extra = {"values": values}
    if checks:
        extra["checks"] = [c.to_json_obj() for c in checks]
    inputs = {"spec": spec.to_json_obj(), "k": args.k, "mode": args.mode, "centered": args.centered}
    return _result(args, "norm", inputs, extra, passed)


def _cmd_boxnorm(args) -> int:
    spec = _spec_from_args(args)
    nu = generate(spec)
    w = represent(nu, args.r)
    values = {"u-norm-centered": u_norm_fast(nu.centered(), args.r)}
    for j in range(args.r + 1):
        g = w.weight_omitting(j)
        values[f"box-norm-raw-j{j}"] = box_norm_brute(g, args.budget)
        values[f"box-norm-centered-j{j}"] = box_norm_brute(g.centered(), args.budget)
    inputs = {"spec": spec.to_json_obj(), "r": args.r}
    return _result(args, "boxnorm", inputs, {"values": values}, True)


def _cmd_gcs(args) -> int:
    dims = tuple(int(d) for d in args.dims.split(","))
    if not dims or any(d < 1 for d in dims):
        raise UsageError(f"--dims must be positive integers, got {args.dims!r}")
    edge = tuple(range(1, len(dims) + 1))
    merged = VerificationReport(name="box-norm-product-bound")
    for t in range(args.tuples):
        rng = np.random.Generator(np.random.Philox(key=args.seed + t))
        if args.equal:
            g = _random_edge_fn(rng, edge, dims)
            gs = {omega: g for omega in cube_vertices(len(dims))}
        else:
            gs = {
                omega: _random_edge_fn(rng, edge, dims)
                for omega in cube_vertices(len(dims))
            }
        sub = gcs_verify(gs, budget=args.budget)
        _fold(merged, sub, f"tuple {t}")
        if args.equal:
            merged.add(
                eq_check(
                    f"tuple {t}: equality-margin",
                    sub.ratios["lhs"],
                    sub.ratios["rhs"],
                    1e-9 * max(1.0, sub.ratios["rhs"]),
                )
            )
    inputs = {
        "dims": list(dims),
        "tuples": args.tuples,
        "seed": args.seed,
        "equal": args.equal,
    }
    return _result(args, "gcs", inputs, {"report": merged.to_json_obj()}, merged.passed)


def _cmd_represent(args) -> int:
    spec = _spec_from_args(args)
    nu = generate(spec)
    w = represent(nu, args.r)
    u = u_norm_fast(nu.centered(), args.r)
    report = VerificationReport(name="representation")
    for j in range(args.r + 1):
        box = box_norm_brute(w.weight_omitting(j).centered(), args.budget)
        report.add(eq_check(f"norm-preservation j={j}", box, u, 1e-9))
    n, r = spec.n, args.r
    if float(n) ** (r + 1) <= 50_000:
        points = itertools.product(range(n), repeat=r + 1)
    else:
        rng = np.random.Generator(np.random.Philox(key=spec.seed))
        points = (tuple(int(v) for v in rng.integers(0, n, size=r + 1)) for _ in range(2000))
    bad = 0
    total = 0
    for x in points:
        ys, d = ap_values(w, x)
        total += 1
        if any((ys[j + 1] - ys[j]) % n != d for j in range(r)):
            bad += 1
    report.add(eq_check(f"progression-map ({total} points)", float(bad), 0.0, 0.0))
    density = ap_density([nu.fn] * (r + 1), args.budget).density
    report.add(
        eq_check("progression-density", progression_count_check(w), density, 1e-9)
    )
    report.ratios["u-norm-centered"] = u
    report.ratios["sup"] = nu.sup
    inputs = {"spec": spec.to_json_obj(), "r": args.r}
    return _result(args, "represent", inputs, {"report": report.to_json_obj()}, report.passed)


def _cmd_cube(args) -> int:
    spec = _spec_from_args(args)
    nu = generate(spec)
    w = represent(nu, args.r)
    g = w.weight_omitting(args.j)
    if args.pattern is None:
        pat = CubePattern.all_ones(len(g.edge))
    else:
        pat = CubePattern.from_string(args.pattern)
        if pat.k != len(g.edge):
            raise UsageError(
                f"pattern has {2 ** pat.k} bits but the edge cube needs {2 ** len(g.edge)}"
            )
    values = {
        "cube-expectation": cube_expectation(g, pat, args.budget),
        "cube-centered-expectation": cube_centered_expectation(g, pat, args.budget),
    }
    report = binomial_expansion_identity(g, pat, args.budget)
    inputs = {
        "spec": spec.to_json_obj(),
        "r": args.r,
        "j": args.j,
        "pattern": pat.to_string(),
    }
    extra = {"values": values, "report": report.to_json_obj()}
    return _result(args, "cube", inputs, extra, report.passed)


def _cmd_slf(args) -> int:
    spec = _spec_from_args(args)
    nu = generate(spec)
    w = represent(nu, args.r)
    inst = random_slf_instance(w, args.instance_seed, args.caps)
    lhs = slf_lhs(inst, args.budget)
    report = chain_verify(inst, args.budget)
    inputs = {
        "spec": spec.to_json_obj(),
        "r": args.r,
        "caps": args.caps,
        "instance_seed": args.instance_seed,
    }
    extra = {"values": {"lhs": lhs}, "report": report.to_json_obj()}
    return _result(args, "slf", inputs, extra, report.passed)


def _cmd_slf_single(args) -> int:
    spec = _spec_from_args(args)
    nu = generate(spec)
    w = represent(nu, args.r)
    inst = random_single_instance(w, args.instance_seed, args.caps)
    lhs = slf_single_lhs(inst, args.budget)
    report = single_chain_verify(inst, args.budget)
    inputs = {
        "spec": spec.to_json_obj(),
        "r": args.r,
        "caps": args.caps,
        "instance_seed": args.instance_seed,
    }
    extra = {"values": {"lhs": lhs}, "report": report.to_json_obj()}
    return _result(args, "slf-single", inputs, extra, report.passed)


def _cmd_nuprime(args) -> int:
    spec = _spec_from_args(args)
    nu = generate(spec)
    w = represent(nu, args.r)
    prime = nu_prime(w, args.budget)
    m1 = prime.mean()
    m2_direct = math.fsum((prime.values.ravel() ** 2).tolist()) / prime.npoints
    m2_doubled = lf2_expectation(w, Lf2Exponents.all_ones(args.r), args.budget)
    dev = nu_prime_l2_dev(w, args.budget)
    report = VerificationReport(name="product-weight-moments")
    report.add(
        eq_check(
            "doubled-origin-second-moment",
            m2_direct,
            m2_doubled,
            1e-9 * max(1.0, abs(m2_direct)),
        )
    )
    report.add(
        eq_check(
            "centered-moment-expansion",
            dev,
            m2_doubled - 2.0 * m1 + 1.0,
            1e-9 * max(1.0, abs(dev)),
        )
    )
    report.ratios["mean"] = m1
    report.ratios["second-moment"] = m2_direct
    report.ratios["centered-second-moment"] = dev
    inputs = {"spec": spec.to_json_obj(), "r": args.r}
    return _result(args, "nuprime", inputs, {"report": report.to_json_obj()}, report.passed)


def _cmd_lf2(args) -> int:
    spec = _spec_from_args(args)
    nu = generate(spec)
    w = represent(nu, args.r)
    exps = Lf2Exponents.all_ones(args.r)
    if args.exponents is not None:
        exps = Lf2Exponents.from_bits(args.r, [int(ch) for ch in args.exponents])
    reports = [lf2_telescoping(w, exps, args.budget)]
    js = range(1, args.r + 1) if args.j is None else [args.j]
    for j in js:
        reports.append(lf2_chain_verify(w, j, exps, args.budget))
    passed = all(rep.passed for rep in reports)
    inputs = {
        "spec": spec.to_json_obj(),
        "r": args.r,
        "j": args.j,
        "exponents": "".join(str(exps.table[k]) for k in sorted(exps.table)),
    }
    extra = {"reports": [rep.to_json_obj() for rep in reports]}
    return _result(args, "lf2", inputs, extra, passed)


def _cmd_count(args) -> int:
    spec = _spec_from_args(args)
    nu = generate(spec)
    ap = ap_density([nu.fn] * (args.r + 1), args.budget)
    hr = hypothesis_ratio(nu, args.r)
    inputs = {"spec": spec.to_json_obj(), "r": args.r}
    extra = {"ap": ap.to_json_obj(), "ratios": hr.to_json_obj()}
    return _result(args, "count", inputs, extra, True)


def _cmd_experiment(args) -> int:
    spec = _spec_from_args(args)
    cfg = RelszConfig(spec=spec, r=args.r, with_chains=args.with_chains, budget=args.budget)
    ap, report = relsz_experiment(cfg)
    inputs = {"spec": spec.to_json_obj(), "r": args.r, "with_chains": args.with_chains}
    extra = {"ap": ap.to_json_obj(), "report": report.to_json_obj()}
    return _result(args, "experiment", inputs, extra, report.passed)


# ---------------------------------------------------------------------------
# Full verification suite


def _suite_dual_route(n: int, seeds: int, budget) -> VerificationReport:
    # k = 1 runs on the raw measure only: a centered measure has mean exactly
    # zero, and the brute route's roundoff residue (~n*eps) is amplified by
    # the 2^k-th root far past any fixed tolerance when the true value is 0.
    rep = VerificationReport(name="uniformity-norm-dual-route")
    for s in range(seeds):
        nu = generate(GeneratorSpec(kind="random", n=n, p=0.5, seed=s))
        for label, f, orders in (("raw", nu.fn, (1, 2, 3)), ("centered", nu.centered(), (2, 3))):
            for k in orders:
                b = u_norm_brute(f, k, budget)
                rep.add(
                    eq_check(
                        f"dual-route seed={s} {label} k={k}",
                        b,
                        u_norm_fast(f, k),
                        1e-9 * max(1.0, b),
                    )
                )
    return rep


def _suite_gcs(seeds: int, budget) -> VerificationReport:
    rep = VerificationReport(name="box-norm-product-bound")
    for dims in ((5,), (3, 4)):
        edge = tuple(range(1, len(dims) + 1))
        for s in range(seeds):
            rng = np.random.Generator(np.random.Philox(key=s))
            gs = {om: _random_edge_fn(rng, edge, dims) for om in cube_vertices(len(dims))}
            _fold(rep, gcs_verify(gs, budget=budget), f"dims={dims} seed={s}")
        rng = np.random.Generator(np.random.Philox(key=seeds))
        g = _random_edge_fn(rng, edge, dims)
        gs = {om: g for om in cube_vertices(len(dims))}
        sub = gcs_verify(gs, budget=budget)
        _fold(rep, sub, f"dims={dims} equal")
        rep.add(
            eq_check(
                f"dims={dims} equality-margin",
                sub.ratios["lhs"],
                sub.ratios["rhs"],
                1e-9 * max(1.0, sub.ratios["rhs"]),
            )
        )
    return rep


def _suite_representation(n: int, r: int, seeds: int, budget) -> VerificationReport:
    rep = VerificationReport(name="representation")
    for s in range(seeds):
        nu = generate(GeneratorSpec(kind="random", n=n, p=0.5, seed=s))
        w = represent(nu, r)
        u = u_norm_fast(nu.centered(), r)
        for j in range(r + 1):
            box = box_norm_brute(w.weight_omitting(j).centered(), budget)
            rep.add(eq_check(f"norm-preservation seed={s} j={j}", box, u, 1e-9))
        density = ap_density([nu.fn] * (r + 1), budget).density
        rep.add(
            eq_check(
                f"progression-density seed={s}", progression_count_check(w), density, 1e-9
            )
        )
    w = represent(generate(GeneratorSpec(kind="random", n=n, p=0.5, seed=0)), r)
    bad = 0
    for x in itertools.product(range(n), repeat=r + 1):
        ys, d = ap_values(w, x)
        if any((ys[j + 1] - ys[j]) % n != d for j in range(r)):
            bad += 1
    rep.add(eq_check(f"progression-map exhaustive n={n} r={r}", float(bad), 0.0, 0.0))
    return rep


def _suite_cube(n: int, r: int, seeds: int, budget) -> VerificationReport:
    rep = VerificationReport(name="cube-expansion")
    if r == 2:
        patterns = [
            CubePattern(2, bits) for bits in itertools.product((0, 1), repeat=4)
        ]
    else:
        rng = np.random.Generator(np.random.Philox(key=0))
        patterns = [CubePattern.all_ones(r)] + [
            CubePattern(r, tuple(int(b) for b in rng.integers(0, 2, size=2**r)))
            for _ in range(7)
        ]
    for s in range(seeds):
        nu = generate(GeneratorSpec(kind="random", n=n, p=0.5, seed=s))
        g = represent(nu, r).weight_omitting(0)
        for pat in patterns:
            if pat.weight() == 0:
                continue
            sub = binomial_expansion_identity(g, pat, budget)
            _fold(rep, sub, f"seed={s} pattern={pat.to_string()}")
    return rep


def _suite_chains(n: int, r: int, seeds: int, budget) -> VerificationReport:
    rep = VerificationReport(name="strong-linear-forms-chain")
    count = seeds if r == 2 else min(seeds, 3)
    for s in range(count):
        nu = generate(GeneratorSpec(kind="random", n=n, p=0.5, seed=s))
        w = represent(nu, r)
        _fold(rep, chain_verify(random_slf_instance(w, s), budget), f"two-copy seed={s}")
        _fold(
            rep,
            single_chain_verify(random_single_instance(w, s), budget),
            f"single-copy seed={s}",
        )
    return rep


def _suite_nuprime(n: int, r: int, seeds: int, budget) -> VerificationReport:
    rep = VerificationReport(name="product-weight-moments")
    for s in range(seeds):
        nu = generate(GeneratorSpec(kind="random", n=n, p=0.5, seed=s))
        w = represent(nu, r)
        prime = nu_prime(w, budget)
        m1 = prime.mean()
        m2_direct = math.fsum((prime.values.ravel() ** 2).tolist()) / prime.npoints
        m2_doubled = lf2_expectation(w, Lf2Exponents.all_ones(r), budget)
        dev = nu_prime_l2_dev(w, budget)
        rep.add(
            eq_check(
                f"doubled-origin-second-moment seed={s}",
                m2_direct,
                m2_doubled,
                1e-9 * max(1.0, abs(m2_direct)),
            )
        )
        rep.add(
            eq_check(
                f"centered-moment-expansion seed={s}",
                dev,
                m2_doubled - 2.0 * m1 + 1.0,
                1e-9 * max(1.0, abs(dev)),
            )
        )
    return rep


def _suite_lf2(n: int, r: int, seeds: int, budget) -> VerificationReport:
    rep = VerificationReport(name="doubled-origin-telescoping")
    exps = Lf2Exponents.all_ones(r)
    for s in range(seeds):
        nu = generate(GeneratorSpec(kind="random", n=n, p=0.5, seed=s))
        w = represent(nu, r)
        _fold(rep, lf2_telescoping(w, exps, budget), f"seed={s}")
        for j in range(1, r + 1):
            _fold(rep, lf2_chain_verify(w, j, exps, budget), f"seed={s} j={j}")
    return rep


def _suite_count(n: int, r: int, seeds: int, budget) -> VerificationReport:
    rep = VerificationReport(name="progression-telescoping")
    for s in range(seeds):
        nu = generate(GeneratorSpec(kind="random", n=n, p=0.5, seed=s))
        _fold(rep, telescoping_check(nu, r, budget), f"seed={s}")
    return rep


def _suite_degenerate(n: int, r: int, budget) -> VerificationReport:
    rep = VerificationReport(name="degenerate-exactness")
    nu = generate(GeneratorSpec(kind="constant", n=n))
    w = represent(nu, r)
    rep.add(eq_check("u-norm-centered", u_norm_fast(nu.centered(), r), 0.0, 0.0))
    caps = {}
    gs = {}
    for j in range(1, r + 1):
        edge = w.system.edge_omitting(j)
        for copy in (0, 1):
            caps[(edge, copy)] = Cap.ONE
            gs[(edge, copy)] = EdgeFn.ones(edge, w.system.edge_dims(edge))
    rep.add(eq_check("centered-product", slf_lhs(SlfInstance(w, caps, gs), budget), 0.0, 0.0))
    exps = Lf2Exponents.all_ones(r)
    rep.add(eq_check("doubled-origin-term", lf2_term(w, 1, exps, budget), 0.0, 0.0))
    rep.add(eq_check("product-weight-deviation", nu_prime_l2_dev(w, budget), 0.0, 0.0))
    g0 = w.weight_omitting(0)
    pat = CubePattern.all_ones(r)
    rep.add(eq_check("cube-centered", cube_centered_expectation(g0, pat, budget), 0.0, 0.0))
    rep.add(eq_check("cube-product", cube_expectation(g0, pat, budget), 1.0, 0.0))
    rep.add(eq_check("doubled-origin-product", lf2_expectation(w, exps, budget), 1.0, 0.0))
    rep.add(
        eq_check("progression-density", ap_density([nu.fn] * (r + 1), budget).density, 1.0, 0.0)
    )
    return rep


def _cmd_verify(args) -> int:
    n, r, seeds = args.n, args.r, args.seeds
    suites = [
        _suite_dual_route(n, seeds, args.budget),
        _suite_gcs(seeds, args.budget),
        _suite_representation(n, r, seeds, args.budget),
        _suite_cube(n, r, seeds, args.budget),
        _suite_chains(n, r, seeds, args.budget),
        _suite_nuprime(n, r, seeds, args.budget),
        _suite_lf2(n, r, seeds, args.budget),
        _suite_count(n, r, seeds, args.budget),
        _suite_degenerate(n, r, args.budget),
    ]
    passed = all(s.passed for s in suites)
    inputs = {"n": n, "r": r, "seeds": seeds}
    extra = {"suites": [s.to_json_obj() for s in suites]}
    return _result(args, "verify", inputs, extra, passed)


# ---------------------------------------------------------------------------
# Parser and entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gowers",
        description="Uniformity norms, box norms, and inequality verification on Z_N.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", help="uniformity norm of a generated measure")
    _add_measure_args(p)
    _add_common_args(p)
    p.add_argument("--k", type=int, required=True, help="norm order")
    p.add_argument("--mode", choices=("brute", "fast", "both"), default="fast")
    p.add_argument("--centered", action="store_true", help="use the measure minus one")
    p.set_defaults(func=_cmd_norm)

    p = sub.add_parser("boxnorm", help="box norms of the representation edge weights")
    _add_measure_args(p)
    _add_common_args(p)
    p.add_argument("--r", type=int, required=True)
    p.set_defaults(func=_cmd_boxnorm)

    p = sub.add_parser("gcs", help="product-form bound on seeded random tuples")
    _add_common_args(p)
    p.add_argument("--dims", default="3,4", help="comma-separated vertex set sizes")
    p.add_argument("--tuples", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--equal", action="store_true", help="use one function for every slot")
    p.set_defaults(func=_cmd_gcs)

    p = sub.add_parser("represent", help="build the representation and verify it")
    _add_measure_args(p)
    _add_common_args(p)
    p.add_argument("--r", type=int, required=True)
    p.set_defaults(func=_cmd_represent)

    p = sub.add_parser("cube", help="cube expectations and the expansion identity")
    _add_measure_args(p)
    _add_common_args(p)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--j", type=int, default=0, help="edge (omitted vertex) to use")
    p.add_argument("--pattern", default=None, help="bit string over the cube vertices")
    p.set_defaults(func=_cmd_cube)

    p = sub.add_parser("slf", help="centered product expectation and its chain")
    _add_measure_args(p)
    _add_common_args(p)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--caps", choices=("one", "nu", "mixed"), default="mixed")
    p.add_argument("--instance-seed", type=int, default=0)
    p.set_defaults(func=_cmd_slf)

    p = sub.add_parser("slf-single", help="single-copy centered product and chain")
    _add_measure_args(p)
    _add_common_args(p)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--caps", choices=("one", "nu", "mixed"), default="mixed")
    p.add_argument("--instance-seed", type=int, default=0)
    p.set_defaults(func=_cmd_slf_single)

    p = sub.add_parser("nuprime", help="conditional product weight moments")
    _add_measure_args(p)
    _add_common_args(p)
    p.add_argument("--r", type=int, required=True)
    p.set_defaults(func=_cmd_nuprime)

    p = sub.add_parser("lf2", help="doubled-origin telescoping and chains")
    _add_measure_args(p)
    _add_common_args(p)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--j", type=int, default=None, help="restrict the chain to one edge")
    p.add_argument("--exponents", default=None, help="bit string over (edge, copy) slots")
    p.set_defaults(func=_cmd_lf2)

    p = sub.add_parser("count", help="progression density and hypothesis ratios")
    _add_measure_args(p)
    _add_common_args(p)
    p.add_argument("--r", type=int, required=True)
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("experiment", help="density, ratios, and telescoping end to end")
    _add_measure_args(p)
    _add_common_args(p)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--with-chains", action="store_true")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("verify", help="full property suite at fixed sizes")
    _add_common_args(p)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--n", type=int, default=7)
    p.add_argument("--seeds", type=int, default=10)
    p.set_defaults(func=_cmd_verify)

    return parser


def _suggest_n(n: int, power: int, estimated: float, budget: float) -> int | None:
    if n is None or power <= 0 or estimated <= 0 or estimated <= budget:
        return None
    m = int(n * (budget / estimated) ** (1.0 / power))
    while m > 1 and estimated * (m / n) ** power > budget:
        m -= 1
    return max(m, 1)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        budget = exc.budget if exc.budget else resolve_budget(args.budget)
        sys.stderr.write(
            f"budget exceeded: estimated {exc.estimated:.3g} elementary products "
            f"> budget {budget:.3g}"
            + (f" ({exc.what})" if exc.what else "")
            + "\n"
        )
        power_fn = _COST_POWERS.get(args.command)
        n = getattr(args, "n", None)
        if power_fn is not None and n:
            m = _suggest_n(n, power_fn(args), exc.estimated, budget)
            if m is not None and m < n:
                sys.stderr.write(
                    f"suggestion: retry with --n <= {m} (assuming cost ~ n^{power_fn(args)}) "
                    "or raise --budget / GOWERS_BUDGET\n"
                )
        return 2
    except NumericalInconsistency as exc:
        sys.stderr.write(f"numerical inconsistency: {exc}\n")
        return 1
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (GowersError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
