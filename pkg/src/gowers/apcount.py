"""Arithmetic-progression densities on Z_N and the pseudorandomness
experiments built on them.

The density of length-k progressions weighted by functions f_0, ..., f_(k-1)
is E over start a and difference d (d = 0 included) of the product
f_j(a + j*d).  The trivial (d = 0) and nontrivial tuples with nonzero weight
are counted separately; for indicator inputs those are plain progression
counts.

For a represented measure the product of all edge weights over the hypergraph
coordinates sweeps progressions uniformly, which turns the progression
density into a telescoping sum of single-copy centered expectations, one per
edge; ``telescoping_check`` verifies that identity exactly and can attach the
chain bound for each term.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .budget import check_budget
from .cyclic import CyclicFn, Measure
from .errors import ShapeMismatch
from .genmeasure import GeneratorSpec, generate
from .gowersnorm import EdgeFn, u_norm_fast
from .hypersystem import relabel, represent
from .linform import Cap, SingleSlfInstance, single_chain_verify, slf_single_lhs
from .report import VerificationReport, eq_check

CSV_HEADER = "n,k,density,prediction,ratio,trivial_count,nontrivial_count"


@dataclass(frozen=True)
class ApReport:
    """Progression-density summary for one tuple of weight functions."""

    n: int
    k: int
    density: float
    prediction: float
    ratio: float
    trivial_count: int
    nontrivial_count: int

    def to_json_obj(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "density": self.density,
            "prediction": self.prediction,
            "ratio": self.ratio,
            "trivial_count": self.trivial_count,
            "nontrivial_count": self.nontrivial_count,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    def to_csv_row(self) -> str:
        return (
            f"{self.n},{self.k},{self.density!r},{self.prediction!r},"
            f"{self.ratio!r},{self.trivial_count},{self.nontrivial_count}"
        )


def ap_density(fs: list[CyclicFn], budget: float | None = None) -> ApReport:
    """Weighted density of length-k progressions, differences 0..N-1.

    Partial sums are taken per difference and merged with exact compensated
    summation in ascending difference order.
    """
    if not fs:
        raise ShapeMismatch("need at least one weight function")
    n = fs[0].n
    if any(f.n != n for f in fs):
        raise ShapeMismatch("all weight functions must share the modulus")
    k = len(fs)
    check_budget(float(n) ** 2 * k, budget, what=f"progression density (k={k}, n={n})")
    per_diff = []
    trivial = 0
    nontrivial = 0
    for d in range(n):
        prod = fs[0].values.copy()
        for j in range(1, k):
            prod *= np.roll(fs[j].values, -(j * d) % n)
        count = int(np.count_nonzero(prod))
        if d == 0:
            trivial = count
        else:
            nontrivial += count
        per_diff.append(float(np.sum(prod)))
    density = math.fsum(per_diff) / float(n) ** 2
    prediction = math.prod(f.mean() for f in fs)
    ratio = density / prediction if prediction != 0 else float("nan")
    return ApReport(n, k, density, prediction, ratio, trivial, nontrivial)


@dataclass(frozen=True)
class HypothesisRatio:
    """Measured uniformity-norm ratios against the two candidate density
    powers; reported, never asserted."""

    n: int
    r: int
    p: float
    norm: float
    over_p_r: float
    over_p_half_r: float

    def to_json_obj(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "p": self.p,
            "norm": self.norm,
            "over_p_r": self.over_p_r,
            "over_p_half_r": self.over_p_half_r,
        }


def hypothesis_ratio(nu: Measure, r: int) -> HypothesisRatio:
    """Order-r uniformity norm of nu - 1 compared with p^r and p^(r/2)."""
    norm = u_norm_fast(nu.centered(), r)
    return HypothesisRatio(
        nu.n, r, nu.p, norm, norm / nu.p**r, norm / nu.p ** (r / 2.0)
    )


def _transposition(r: int, m: int) -> tuple[int, ...]:
    perm = list(range(r + 1))
    perm[0], perm[m] = perm[m], perm[0]
    return tuple(perm)


def telescoping_check(
    nu: Measure,
    r: int,
    budget: float | None = None,
    tol: float = 1e-9,
    with_chains: bool = False,
) -> VerificationReport:
    """Verify that the progression density minus one equals the sum of the
    single-copy centered terms of the represented hypergraph.

    Term m centers the edge omitting vertex m, keeps the weights of edges
    omitting 0..m-1 and replaces the rest by one; each term is evaluated by
    ``slf_single_lhs`` after relabeling vertex m to the distinguished slot.
    With ``with_chains`` the composed chain bound of each term is attached as
    a measured ratio.
    """
    w = represent(nu, r)
    lam = ap_density([nu.fn] * (r + 1), budget).density
    report = VerificationReport(name="progression-telescoping")
    terms = []
    for m in range(r + 1):
        wm = relabel(w, _transposition(r, m))
        caps: dict[tuple[int, ...], Cap] = {}
        gs = {}
        for j in range(1, r + 1):
            edge = wm.system.edge_omitting(j)
            old = 0 if j == m else j
            if old < m:
                caps[edge] = Cap.NU
                gs[edge] = wm.weights[edge]
            else:
                caps[edge] = Cap.ONE
                gs[edge] = EdgeFn.ones(edge, wm.system.edge_dims(edge))
        inst = SingleSlfInstance(wm, caps, gs)
        term = slf_single_lhs(inst, budget)
        terms.append(term)
        report.ratios[f"term-{m}"] = term
        if with_chains:
            chain = single_chain_verify(inst, budget)
            report.ratios[f"term-{m}-chain-bound"] = chain.ratios["composed-bound"]
            for c in chain.checks:
                if not c.passed:
                    report.add(c)
    total = math.fsum(terms)
    report.add(eq_check("telescoping-count-identity", lam - 1.0, total, tol))
    report.ratios["density"] = lam
    return report


@dataclass(frozen=True)
class RelszConfig:
    """One pseudorandom-density experiment: a generated measure, the
    progression length r+1, and whether to attach per-term chain bounds."""

    spec: GeneratorSpec
    r: int
    with_chains: bool = False
    budget: float | None = None


def relsz_experiment(cfg: RelszConfig) -> tuple[ApReport, VerificationReport]:
    """Measure how far a generated measure is from density one on
    progressions, alongside its uniformity-norm ratios and, for prime moduli,
    the exact telescoping decomposition with optional chain bounds."""
    nu = generate(cfg.spec)
    ap = ap_density([nu.fn] * (cfg.r + 1), cfg.budget)
    ratios = hypothesis_ratio(nu, cfg.r)
    from .hypersystem import is_prime  # local import keeps module load light

    if is_prime(cfg.spec.n) and cfg.spec.n > cfg.r:
        report = telescoping_check(
            nu, cfg.r, budget=cfg.budget, with_chains=cfg.with_chains
        )
    else:
        report = VerificationReport(name="progression-telescoping")
        report.notes.append("modulus not prime above the arity; telescoping skipped")
    report.ratios["norm"] = ratios.norm
    report.ratios["norm-over-p-r"] = ratios.over_p_r
    report.ratios["norm-over-p-half-r"] = ratios.over_p_half_r
    report.ratios["density-minus-one"] = ap.density - 1.0
    return ap, report
