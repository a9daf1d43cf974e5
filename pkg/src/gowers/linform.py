"""Linear-forms expectation engines and their Cauchy-Schwarz chains.

Everything here evaluates exact finite-N expectations of products of edge
weights over partially doubled coordinates, and verifies the inequalities
that connect them:

* cube-pattern expectations over a single edge (products of the edge weight
  over chosen cube vertices) and the binomial expansion that relates raw and
  centered patterns;
* the strong-linear-forms expectation with a centered distinguished edge and
  one minorant per remaining edge and copy, together with the doubling chain
  that bounds it by a box-norm power of the centered edge;
* its single-copy variant, which saves one doubling per step;
* the conditional-product weight (mean over vertex 0 of the product of the
  other edge weights), its second moment, and the telescoped decomposition of
  that second moment into centered terms, each with its own doubling chain.

Every intermediate inequality is checked exactly at finite N with a relative
slack for roundoff; asymptotic statements are never asserted, only reported
as measured ratios.

Free variables are canonically ordered with doubled copies first (vertex
ascending, copy 0 before copy 1) and plain coordinates after (vertex
ascending); evaluation order is fixed by this convention plus unoptimized
einsum, so repeated runs are bit-identical.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

import numpy as np

from .budget import check_budget
from .errors import (
    AllZeroPattern,
    CapViolation,
    InvalidSubset,
    NumericalInconsistency,
    ShapeMismatch,
)
from .gowersnorm import (
    CubeVertex,
    EdgeFn,
    box_norm_brute,
    clamp_cube_average,
    cube_vertices,
)
from .hypersystem import Edge, WeightedHypergraph, sup_norm
from .report import VerificationReport, eq_check, ineq_check

# A free variable is a vertex together with a copy index; copy None means the
# coordinate is not doubled.
Var = tuple[int, int | None]

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _var_order_key(v: Var):
    # Doubled copies outermost (vertex ascending, copy ascending), then the
    # plain coordinates, vertex ascending.  Normative enumeration order.
    vertex, copy = v
    return (copy is None, vertex, 0 if copy is None else copy)


def expect_product(
    factors: list[tuple[np.ndarray, list[Var]]],
    budget: float | None = None,
    what: str = "",
) -> float:
    """E[prod of factors] over all variables that occur, uniformly.

    Each factor is an array plus the variable name of each of its axes.  The
    empty product has expectation one.  Cost is charged as index-space size
    times factor count before any work happens.
    """
    if not factors:
        return 1.0
    sizes: dict[Var, int] = {}
    for arr, axes in factors:
        if arr.ndim != len(axes):
            raise ShapeMismatch("factor axis labels do not match array rank")
        for ax, var in enumerate(axes):
            size = arr.shape[ax]
            if sizes.setdefault(var, size) != size:
                raise ShapeMismatch(f"variable {var} has conflicting sizes")
    order = sorted(sizes, key=_var_order_key)
    if len(order) > len(_LETTERS):
        raise ShapeMismatch("too many free variables")
    letter = {var: _LETTERS[i] for i, var in enumerate(order)}
    npoints = float(math.prod(sizes.values()))
    check_budget(npoints * len(factors), budget, what=what or "product expectation")
    expr = ",".join("".join(letter[v] for v in axes) for _, axes in factors) + "->"
    total = float(np.einsum(expr, *[arr for arr, _ in factors], optimize=False))
    return total / npoints


# ---------------------------------------------------------------------------
# Cube patterns over a single edge


@dataclass(frozen=True)
class CubePattern:
    """0/1 exponents on the vertices of the |e|-dimensional cube, stored in
    the order of ``cube_vertices`` (first coordinate slowest)."""

    k: int
    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if self.k < 1:
            raise ValueError("cube dimension must be >= 1")
        if len(bits) != 2**self.k:
            raise ShapeMismatch(f"need {2 ** self.k} exponents, got {len(bits)}")
        if any(b not in (0, 1) for b in bits):
            raise ValueError("exponents must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_string(cls, text: str) -> "CubePattern":
        k = (len(text)).bit_length() - 1
        return cls(k, tuple(int(ch) for ch in text))

    @classmethod
    def all_ones(cls, k: int) -> "CubePattern":
        return cls(k, (1,) * 2**k)

    @classmethod
    def from_support(cls, k: int, support: Iterable[CubeVertex]) -> "CubePattern":
        support = set(support)
        return cls(k, tuple(1 if om in support else 0 for om in cube_vertices(k)))

    def support(self) -> list[CubeVertex]:
        return [om for om, b in zip(cube_vertices(self.k), self.bits) if b]

    def weight(self) -> int:
        return sum(self.bits)

    def to_string(self) -> str:
        return "".join(str(b) for b in self.bits)


def _cube_factors(g: EdgeFn, support: Iterable[CubeVertex]) -> list[tuple[np.ndarray, list[Var]]]:
    factors = []
    for omega in support:
        axes: list[Var] = [(v, omega[i]) for i, v in enumerate(g.edge)]
        factors.append((g.values, axes))
    return factors


def cube_expectation(
    g: EdgeFn, pat: CubePattern, budget: float | None = None
) -> float:
    """E[prod over active cube vertices of g(x^omega)], both copies uniform."""
    if pat.k != len(g.edge):
        raise ShapeMismatch("pattern dimension does not match edge size")
    return expect_product(
        _cube_factors(g, pat.support()), budget, what="cube expectation"
    )


def cube_centered_expectation(
    g: EdgeFn,
    pat: CubePattern,
    budget: float | None = None,
    check: bool = True,
) -> float:
    """Same as ``cube_expectation`` with g - 1 at the active vertices.

    With ``check`` on, the product-form bound |value| <= boxnorm(g-1)^weight
    is verified (a slack of 1e-9 times the bound absorbs roundoff).
    """
    if pat.k != len(g.edge):
        raise ShapeMismatch("pattern dimension does not match edge size")
    if pat.weight() == 0:
        raise AllZeroPattern("centered cube expectation needs an active vertex")
    centered = g.centered()
    value = expect_product(
        _cube_factors(centered, pat.support()), budget, what="centered cube expectation"
    )
    if check:
        bound = box_norm_brute(centered, budget=budget) ** pat.weight()
        if abs(value) > bound + 1e-9 * max(1.0, bound):
            raise NumericalInconsistency(
                f"centered cube expectation {value} exceeds product bound {bound}"
            )
    return value


def binomial_expansion_identity(
    g: EdgeFn, pat: CubePattern, budget: float | None = None, tol: float = 1e-9
) -> VerificationReport:
    """Check E[prod nu] = sum over sub-supports of E[prod (nu-1)].

    The empty sub-support contributes one.  Exact identity by expanding
    nu = (nu - 1) + 1 at each active vertex.
    """
    lhs = cube_expectation(g, pat, budget)
    support = pat.support()
    terms = [1.0]
    for size in range(1, len(support) + 1):
        for subset in itertools.combinations(support, size):
            sub = CubePattern.from_support(pat.k, subset)
            terms.append(cube_centered_expectation(g, sub, budget, check=False))
    rhs = math.fsum(terms)
    report = VerificationReport(name="cube-binomial-expansion")
    report.add(eq_check("binomial-expansion", lhs, rhs, tol))
    report.ratios["raw"] = lhs
    report.ratios["centered-sum"] = rhs
    return report


# ---------------------------------------------------------------------------
# Strong-linear-forms instances (two minorants per edge, doubled vertex 0)


class Cap(Enum):
    """Which majorant dominates a minorant: the constant one or the edge weight."""

    ONE = "one"
    NU = "nu"


def _cap_fn(w: WeightedHypergraph, edge: Edge, cap: Cap) -> EdgeFn:
    if cap is Cap.NU:
        return w.weights[edge]
    return EdgeFn.ones(edge, w.system.edge_dims(edge))


def _validate_minorant(g: EdgeFn, gbar: EdgeFn, where: str) -> None:
    if not g.same_shape(gbar):
        raise ShapeMismatch(f"minorant at {where} has wrong shape")
    if np.any(g.values < 0):
        raise CapViolation(f"minorant at {where} is negative somewhere")
    if np.any(g.values > gbar.values):
        raise CapViolation(f"minorant at {where} exceeds its cap somewhere")


@dataclass(frozen=True)
class SlfInstance:
    """A weighted hypergraph plus, for every edge other than the one omitting
    vertex 0 and for each of the two copies of vertex 0, a cap and a minorant
    dominated by it."""

    hypergraph: WeightedHypergraph
    caps: dict[tuple[Edge, int], Cap]
    gs: dict[tuple[Edge, int], EdgeFn]

    def __post_init__(self):
        w = self.hypergraph
        keys = {
            (w.system.edge_omitting(j), copy)
            for j in range(1, w.r + 1)
            for copy in (0, 1)
        }
        if set(self.caps.keys()) != keys or set(self.gs.keys()) != keys:
            raise ShapeMismatch(
                "caps and minorants must cover every non-distinguished edge "
                "in both copies"
            )
        for key in sorted(keys):
            edge, copy = key
            _validate_minorant(
                self.gs[key], _cap_fn(w, edge, self.caps[key]), f"{edge} copy {copy}"
            )

    @property
    def r(self) -> int:
        return self.hypergraph.r

    def gbar(self, key: tuple[Edge, int]) -> EdgeFn:
        return _cap_fn(self.hypergraph, key[0], self.caps[key])

    def to_json_obj(self) -> dict:
        return {
            "hypergraph": self.hypergraph.to_json_obj(),
            "gs": [
                {
                    "edge": list(edge),
                    "copy": copy,
                    "cap": self.caps[(edge, copy)].value,
                    "values": [float(v) for v in self.gs[(edge, copy)].values.ravel()],
                }
                for edge, copy in sorted(self.gs.keys())
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json_obj(cls, obj: dict) -> "SlfInstance":
        w = WeightedHypergraph.from_json_obj(obj["hypergraph"])
        caps: dict[tuple[Edge, int], Cap] = {}
        gs: dict[tuple[Edge, int], EdgeFn] = {}
        for entry in obj["gs"]:
            edge = tuple(int(v) for v in entry["edge"])
            copy = int(entry["copy"])
            dims = w.system.edge_dims(edge)
            vals = np.asarray(entry["values"], dtype=np.float64).reshape(dims)
            caps[(edge, copy)] = Cap(entry["cap"])
            gs[(edge, copy)] = EdgeFn(edge, dims, vals)
        return cls(w, caps, gs)

    @classmethod
    def from_json(cls, text: str) -> "SlfInstance":
        return cls.from_json_obj(json.loads(text))


def _distinguished_edge(w: WeightedHypergraph) -> Edge:
    return w.system.edge_omitting(0)


def _normalize_subset(w: WeightedHypergraph, d: Iterable[int]) -> tuple[int, ...]:
    e0 = _distinguished_edge(w)
    dd = tuple(sorted(int(v) for v in d))
    if len(set(dd)) != len(dd) or any(v not in e0 for v in dd):
        raise InvalidSubset(f"{dd} is not a subset of the distinguished edge {e0}")
    return dd


def slf_lhs(inst: SlfInstance, budget: float | None = None) -> float:
    """The strong-linear-forms expectation: centered distinguished weight
    times the product of every minorant, averaged over both copies of vertex
    0 and one copy of each remaining coordinate.

    Evaluated by averaging each copy's minorant product over vertex 0 first;
    this is a different route from ``q_value`` with the empty subset, and the
    two must agree.  Budgeted at the defining sum's cost.
    """
    w = inst.hypergraph
    r = w.r
    n0 = w.system.dims[0]
    e0 = _distinguished_edge(w)
    cost = float(n0) ** 2 * math.prod(w.system.edge_dims(e0)) * (2 * r + 1)
    check_budget(cost, budget, what="strong-linear-forms expectation")

    # Copy products live on (x_0, x_{e0}); axis a+1 belongs to vertex e0[a].
    full_shape = (n0,) + w.system.edge_dims(e0)
    copy_means = []
    for copy in (0, 1):
        prod = np.ones(full_shape)
        for j in range(1, r + 1):
            edge = w.system.edge_omitting(j)
            g = inst.gs[(edge, copy)]
            # Expand g onto (x_0, x_{e0}) by inserting the missing vertex axis.
            expanded = np.expand_dims(g.values, axis=1 + e0.index(j))
            prod = prod * expanded
        copy_means.append(prod.mean(axis=0))
    centered = w.weights[e0].values - 1.0
    total = centered * copy_means[0] * copy_means[1]
    return float(total.mean())


def _slf_factors(
    inst: SlfInstance, d: tuple[int, ...]
) -> list[tuple[np.ndarray, list[Var]]]:
    """Factors of the chain quantity at doubled subset d: the centered
    distinguished weight over every copy pattern of d, and each minorant with
    edge containing d, doubled over d, at its own copy of vertex 0."""
    w = inst.hypergraph
    e0 = _distinguished_edge(w)
    centered = w.weights[e0].values - 1.0
    factors: list[tuple[np.ndarray, list[Var]]] = []
    for omega in itertools.product((0, 1), repeat=len(d)):
        copy_of = dict(zip(d, omega))
        axes: list[Var] = [(v, copy_of.get(v)) for v in e0]
        factors.append((centered, axes))
    for copy in (0, 1):
        for j in range(1, w.r + 1):
            if j in d:
                continue  # edge omitting j does not contain all of d
            edge = w.system.edge_omitting(j)
            g = inst.gs[(edge, copy)]
            for omega in itertools.product((0, 1), repeat=len(d)):
                copy_of = dict(zip(d, omega))
                axes = [
                    (v, copy) if v == 0 else (v, copy_of.get(v)) for v in edge
                ]
                factors.append((g.values, axes))
    return factors


def q_value(
    inst: SlfInstance, d: Iterable[int], budget: float | None = None
) -> float:
    """Chain quantity at doubled subset d of the distinguished edge.

    The empty subset gives the strong-linear-forms expectation; the full edge
    gives the box-norm power of the centered distinguished weight.
    """
    dd = _normalize_subset(inst.hypergraph, d)
    return expect_product(
        _slf_factors(inst, dd), budget, what=f"chain quantity at d={dd}"
    )


@dataclass(frozen=True)
class YbarStats:
    """Moments of the capped leave-one-edge-out product at a chain step."""

    mean_sq: float
    mean: float
    factor_count: int
    sup_power_bound: float


def _ybar_factors(
    inst: "SlfInstance", d: tuple[int, ...], j: int
) -> list[tuple[np.ndarray, list[Var]]]:
    edge = inst.hypergraph.system.edge_omitting(j)
    factors = []
    for copy in (0, 1):
        gbar = inst.gbar((edge, copy))
        for omega in itertools.product((0, 1), repeat=len(d)):
            copy_of = dict(zip(d, omega))
            axes = [(v, copy) if v == 0 else (v, copy_of.get(v)) for v in edge]
            factors.append((gbar.values, axes))
    return factors


def ybar_sq_expectation(
    inst: SlfInstance,
    d: Iterable[int],
    j: int,
    budget: float | None = None,
    sup: float | None = None,
) -> YbarStats:
    """First and second moments of the capped product over the edge omitting
    j (the one edge missing the next doubling vertex) at doubled subset d,
    plus the exact pointwise bound E[Ybar^2] <= E[Ybar] * sup^(factor count).
    """
    w = inst.hypergraph
    dd = _normalize_subset(w, d)
    if j in dd or j == 0 or j > w.r:
        raise InvalidSubset(f"next vertex {j} must lie outside d and the origin")
    factors = _ybar_factors(inst, dd, j)
    mean = expect_product(factors, budget, what="capped product mean")
    mean_sq = expect_product(factors + factors, budget, what="capped product second moment")
    if sup is None:
        sup = sup_norm(w)
    count = len(factors)
    return YbarStats(mean_sq, mean, count, mean * sup**count)


def _root(value: float, denom_log2: int, scale: float = 1.0) -> float:
    """(value)^(1/2^denom_log2) with the nonnegativity clamp."""
    return clamp_cube_average(value, scale) ** (1.0 / 2.0**denom_log2)


def _chain_report(
    name: str,
    r: int,
    sup: float,
    q_at: Mapping[tuple[int, ...], float],
    stats_at: Mapping[tuple[tuple[int, ...], int], YbarStats],
    e0: Edge,
    box_power: float,
    slack_rel: float,
) -> VerificationReport:
    """Shared verification logic for the doubled and single-copy chains."""
    report = VerificationReport(name=name)
    full = tuple(e0)
    for d, j in sorted(stats_at.keys()):
        stats = stats_at[(d, j)]
        d_next = tuple(sorted(d + (j,)))
        lhs = q_at[d] ** 2
        rhs = q_at[d_next] * stats.mean_sq
        slack = slack_rel * max(1.0, abs(lhs), abs(rhs))
        report.add(
            ineq_check(f"cs-step d={list(d)} j={j}", lhs, rhs, slack)
        )
        slack_sup = slack_rel * max(1.0, stats.mean_sq, stats.sup_power_bound)
        report.add(
            ineq_check(
                f"sup-pointwise d={list(d)} j={j}",
                stats.mean_sq,
                stats.sup_power_bound,
                slack_sup,
                note=f"exponent {stats.factor_count}",
            )
        )
    endpoint = q_at[full]
    tol = slack_rel * max(1.0, abs(endpoint), abs(box_power))
    report.add(eq_check("endpoint-box-power", endpoint, box_power, tol))

    # Composed bound along the canonical ascending chain.
    lhs_abs = abs(q_at[()])
    bound = 1.0
    d: tuple[int, ...] = ()
    for t, j in enumerate(full, start=1):
        stats = stats_at[(d, j)]
        bound *= _root(stats.mean_sq, t, scale=max(1.0, abs(stats.mean_sq)))
        d = tuple(sorted(d + (j,)))
    bound *= _root(q_at[full], r, scale=max(1.0, abs(q_at[full])))
    slack = slack_rel * max(1.0, lhs_abs, bound)
    report.add(ineq_check("composed-chain-bound", lhs_abs, bound, slack))

    box_norm = _root(box_power, r, scale=max(1.0, abs(box_power)))
    report.ratios["lhs"] = lhs_abs
    report.ratios["composed-bound"] = bound
    report.ratios["box-norm-centered"] = box_norm
    report.ratios["sup"] = sup
    return report


def chain_verify(
    inst: SlfInstance, budget: float | None = None, slack_rel: float = 1e-9
) -> VerificationReport:
    """Verify every exact Cauchy-Schwarz step, every pointwise sup bound, the
    endpoint identity, and the composed bound for a doubled instance.

    The measured ratio of the expectation to boxnorm * sup^r is reported but
    never asserted; at finite N it stands in for an asymptotic statement.
    """
    w = inst.hypergraph
    r = w.r
    e0 = _distinguished_edge(w)
    sup = sup_norm(w)
    q_at: dict[tuple[int, ...], float] = {}
    for size in range(r + 1):
        for d in itertools.combinations(e0, size):
            q_at[d] = q_value(inst, d, budget)
    stats_at: dict[tuple[tuple[int, ...], int], YbarStats] = {}
    for d in list(q_at.keys()):
        if len(d) == r:
            continue
        for j in e0:
            if j not in d:
                stats_at[(d, j)] = ybar_sq_expectation(inst, d, j, budget, sup=sup)
    box_power = box_norm_brute(w.weights[e0].centered(), budget=budget) ** (2.0**r)
    report = _chain_report(
        "strong-linear-forms-chain", r, sup, q_at, stats_at, e0, box_power, slack_rel
    )
    lhs = abs(q_at[()])
    denom = report.ratios["box-norm-centered"] * sup**r
    if denom > 0:
        report.ratios["lhs-over-boxnorm-times-sup-power"] = lhs / denom
    return report


def random_slf_instance(
    w: WeightedHypergraph, seed: int, caps_mode: str = "mixed"
) -> SlfInstance:
    """Seeded random instance: each slot draws a cap (or uses the forced
    mode) and a minorant that is the cap times i.i.d. uniforms on [0, 1]."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    caps: dict[tuple[Edge, int], Cap] = {}
    gs: dict[tuple[Edge, int], EdgeFn] = {}
    for j in range(1, w.r + 1):
        edge = w.system.edge_omitting(j)
        dims = w.system.edge_dims(edge)
        for copy in (0, 1):
            if caps_mode == "mixed":
                cap = Cap.NU if rng.random() < 0.5 else Cap.ONE
            else:
                cap = Cap(caps_mode)
            caps[(edge, copy)] = cap
            base = _cap_fn(w, edge, cap).values
            gs[(edge, copy)] = EdgeFn(edge, dims, base * rng.random(dims))
    return SlfInstance(w, caps, gs)


# ---------------------------------------------------------------------------
# Single-copy variant (one minorant per edge, vertex 0 never doubled)


@dataclass(frozen=True)
class SingleSlfInstance:
    """Single-copy variant: one cap and one minorant per non-distinguished
    edge; vertex 0 is never doubled, so each chain step needs half the
    factors of the doubled version."""

    hypergraph: WeightedHypergraph
    caps: dict[Edge, Cap]
    gs: dict[Edge, EdgeFn]

    def __post_init__(self):
        w = self.hypergraph
        keys = {w.system.edge_omitting(j) for j in range(1, w.r + 1)}
        if set(self.caps.keys()) != keys or set(self.gs.keys()) != keys:
            raise ShapeMismatch(
                "caps and minorants must cover every non-distinguished edge"
            )
        for edge in sorted(keys):
            _validate_minorant(
                self.gs[edge], _cap_fn(w, edge, self.caps[edge]), f"{edge}"
            )

    @property
    def r(self) -> int:
        return self.hypergraph.r

    def gbar(self, edge: Edge) -> EdgeFn:
        return _cap_fn(self.hypergraph, edge, self.caps[edge])

    def to_json_obj(self) -> dict:
        return {
            "hypergraph": self.hypergraph.to_json_obj(),
            "gs": [
                {
                    "edge": list(edge),
                    "cap": self.caps[edge].value,
                    "values": [float(v) for v in self.gs[edge].values.ravel()],
                }
                for edge in sorted(self.gs.keys())
            ],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "SingleSlfInstance":
        w = WeightedHypergraph.from_json_obj(obj["hypergraph"])
        caps: dict[Edge, Cap] = {}
        gs: dict[Edge, EdgeFn] = {}
        for entry in obj["gs"]:
            edge = tuple(int(v) for v in entry["edge"])
            dims = w.system.edge_dims(edge)
            caps[edge] = Cap(entry["cap"])
            gs[edge] = EdgeFn(
                edge, dims, np.asarray(entry["values"], dtype=np.float64).reshape(dims)
            )
        return cls(w, caps, gs)


def slf_single_lhs(inst: SingleSlfInstance, budget: float | None = None) -> float:
    """Single-copy strong-linear-forms expectation over one copy of every
    coordinate: centered distinguished weight times one minorant per edge."""
    w = inst.hypergraph
    e0 = _distinguished_edge(w)
    factors: list[tuple[np.ndarray, list[Var]]] = [
        (w.weights[e0].values - 1.0, [(v, None) for v in e0])
    ]
    for j in range(1, w.r + 1):
        edge = w.system.edge_omitting(j)
        factors.append((inst.gs[edge].values, [(v, None) for v in edge]))
    return expect_product(factors, budget, what="single-copy expectation")


def _single_factors(
    inst: SingleSlfInstance, d: tuple[int, ...]
) -> list[tuple[np.ndarray, list[Var]]]:
    w = inst.hypergraph
    e0 = _distinguished_edge(w)
    centered = w.weights[e0].values - 1.0
    factors: list[tuple[np.ndarray, list[Var]]] = []
    for omega in itertools.product((0, 1), repeat=len(d)):
        copy_of = dict(zip(d, omega))
        factors.append((centered, [(v, copy_of.get(v)) for v in e0]))
    for j in range(1, w.r + 1):
        if j in d:
            continue
        edge = w.system.edge_omitting(j)
        g = inst.gs[edge]
        for omega in itertools.product((0, 1), repeat=len(d)):
            copy_of = dict(zip(d, omega))
            factors.append((g.values, [(v, copy_of.get(v)) for v in edge]))
    return factors


def q_single_value(
    inst: SingleSlfInstance, d: Iterable[int], budget: float | None = None
) -> float:
    dd = _normalize_subset(inst.hypergraph, d)
    return expect_product(
        _single_factors(inst, dd), budget, what=f"single-copy chain quantity d={dd}"
    )


def ybar_single_sq_expectation(
    inst: SingleSlfInstance,
    d: Iterable[int],
    j: int,
    budget: float | None = None,
    sup: float | None = None,
) -> YbarStats:
    w = inst.hypergraph
    dd = _normalize_subset(w, d)
    if j in dd or j == 0 or j > w.r:
        raise InvalidSubset(f"next vertex {j} must lie outside d and the origin")
    edge = w.system.edge_omitting(j)
    gbar = inst.gbar(edge)
    factors = []
    for omega in itertools.product((0, 1), repeat=len(dd)):
        copy_of = dict(zip(dd, omega))
        factors.append((gbar.values, [(v, copy_of.get(v)) for v in edge]))
    mean = expect_product(factors, budget, what="capped product mean")
    mean_sq = expect_product(
        factors + factors, budget, what="capped product second moment"
    )
    if sup is None:
        sup = sup_norm(w)
    count = len(factors)
    return YbarStats(mean_sq, mean, count, mean * sup**count)


def single_chain_verify(
    inst: SingleSlfInstance, budget: float | None = None, slack_rel: float = 1e-9
) -> VerificationReport:
    """Chain verification for the single-copy variant; each step's capped
    product has at most 2^|d| factors instead of 2^(|d|+1)."""
    w = inst.hypergraph
    r = w.r
    e0 = _distinguished_edge(w)
    sup = sup_norm(w)
    q_at: dict[tuple[int, ...], float] = {}
    for size in range(r + 1):
        for d in itertools.combinations(e0, size):
            q_at[d] = q_single_value(inst, d, budget)
    stats_at: dict[tuple[tuple[int, ...], int], YbarStats] = {}
    for d in list(q_at.keys()):
        if len(d) == r:
            continue
        for j in e0:
            if j not in d:
                stats_at[(d, j)] = ybar_single_sq_expectation(
                    inst, d, j, budget, sup=sup
                )
    box_power = box_norm_brute(w.weights[e0].centered(), budget=budget) ** (2.0**r)
    report = _chain_report(
        "single-copy-chain", r, sup, q_at, stats_at, e0, box_power, slack_rel
    )
    lhs = abs(q_at[()])
    denom = report.ratios["box-norm-centered"] * sup ** (r / 2.0)
    if denom > 0:
        report.ratios["lhs-over-boxnorm-times-sup-half-power"] = lhs / denom
    return report


def random_single_instance(
    w: WeightedHypergraph, seed: int, caps_mode: str = "mixed"
) -> SingleSlfInstance:
    """Single-copy analogue of ``random_slf_instance``."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    caps: dict[Edge, Cap] = {}
    gs: dict[Edge, EdgeFn] = {}
    for j in range(1, w.r + 1):
        edge = w.system.edge_omitting(j)
        dims = w.system.edge_dims(edge)
        if caps_mode == "mixed":
            cap = Cap.NU if rng.random() < 0.5 else Cap.ONE
        else:
            cap = Cap(caps_mode)
        caps[edge] = cap
        base = _cap_fn(w, edge, cap).values
        gs[edge] = EdgeFn(edge, dims, base * rng.random(dims))
    return SingleSlfInstance(w, caps, gs)


# ---------------------------------------------------------------------------
# Conditional-product weight and its second moment


def nu_prime(w: WeightedHypergraph, budget: float | None = None) -> EdgeFn:
    """Mean over vertex 0 of the product of all non-distinguished edge
    weights, as a function on the distinguished edge's coordinates."""
    r = w.r
    e0 = _distinguished_edge(w)
    n0 = w.system.dims[0]
    cost = float(n0) * math.prod(w.system.edge_dims(e0)) * r
    check_budget(cost, budget, what="conditional product weight")
    vertices = [0] + list(e0)
    letter = {v: _LETTERS[i] for i, v in enumerate(vertices)}
    subs = []
    operands = []
    for j in range(1, r + 1):
        fn = w.weight_omitting(j)
        subs.append("".join(letter[v] for v in fn.edge))
        operands.append(fn.values)
    out = "".join(letter[v] for v in e0)
    vals = np.einsum(",".join(subs) + "->" + out, *operands, optimize=False) / n0
    return EdgeFn(e0, w.system.edge_dims(e0), vals)


def nu_prime_l2_dev(w: WeightedHypergraph, budget: float | None = None) -> float:
    """E[(nu' - 1)^2], with the expansion through the first two moments
    checked internally to 1e-9."""
    fn = nu_prime(w, budget)
    flat = fn.values.ravel().tolist()
    npts = fn.npoints
    dev = math.fsum((v - 1.0) ** 2 for v in flat) / npts
    m1 = math.fsum(flat) / npts
    m2 = math.fsum(v * v for v in flat) / npts
    expanded = m2 - 2.0 * m1 + 1.0
    if abs(dev - expanded) > 1e-9 * max(1.0, abs(m2)):
        raise NumericalInconsistency(
            f"second-moment expansion mismatch: {dev} vs {expanded}"
        )
    return dev


# ---------------------------------------------------------------------------
# Doubled-origin linear-forms expectations (second-moment engine)


@dataclass(frozen=True)
class Lf2Exponents:
    """0/1 exponents indexed by (non-distinguished edge, copy of vertex 0),
    in the slot order: edges by their omitted vertex ascending, copy 0 then 1."""

    r: int
    table: dict[tuple[Edge, int], int]

    def __post_init__(self):
        expected = {
            (tuple(v for v in range(self.r + 1) if v != j), copy)
            for j in range(1, self.r + 1)
            for copy in (0, 1)
        }
        if set(self.table.keys()) != expected:
            raise ShapeMismatch("exponent table must cover every (edge, copy) slot")
        if any(n not in (0, 1) for n in self.table.values()):
            raise ValueError("exponents must be 0 or 1")

    @classmethod
    def all_ones(cls, r: int) -> "Lf2Exponents":
        table = {
            (tuple(v for v in range(r + 1) if v != j), copy): 1
            for j in range(1, r + 1)
            for copy in (0, 1)
        }
        return cls(r, table)

    @classmethod
    def from_bits(cls, r: int, bits: Iterable[int]) -> "Lf2Exponents":
        bits = list(int(b) for b in bits)
        slots = [
            (tuple(v for v in range(r + 1) if v != j), copy)
            for j in range(1, r + 1)
            for copy in (0, 1)
        ]
        if len(bits) != len(slots):
            raise ShapeMismatch(f"need {len(slots)} exponent bits, got {len(bits)}")
        return cls(r, dict(zip(slots, bits)))

    def swapped_copies(self) -> "Lf2Exponents":
        table = {(edge, 1 - copy): n for (edge, copy), n in self.table.items()}
        return Lf2Exponents(self.r, table)

    def with_slot(self, edge: Edge, copy: int, n: int) -> "Lf2Exponents":
        table = dict(self.table)
        table[(edge, copy)] = n
        return Lf2Exponents(self.r, table)

    def active_slots(self) -> list[tuple[Edge, int]]:
        return [key for key in sorted(self.table.keys()) if self.table[key] == 1]

    def to_json_obj(self) -> dict:
        return {
            "r": self.r,
            "exponents": [
                {"edge": list(edge), "copy": copy, "n": self.table[(edge, copy)]}
                for edge, copy in sorted(self.table.keys())
            ],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Lf2Exponents":
        table = {
            (tuple(int(v) for v in entry["edge"]), int(entry["copy"])): int(entry["n"])
            for entry in obj["exponents"]
        }
        return cls(int(obj["r"]), table)


def lf2_expectation(
    w: WeightedHypergraph, exps: Lf2Exponents, budget: float | None = None
) -> float:
    """E over two copies of vertex 0 and one copy of the rest of the product
    of the active edge weights, each reading its own copy of vertex 0."""
    if exps.r != w.r:
        raise ShapeMismatch("exponent arity does not match hypergraph")
    factors: list[tuple[np.ndarray, list[Var]]] = []
    for edge, copy in exps.active_slots():
        fn = w.weights[edge]
        factors.append(
            (fn.values, [(v, copy) if v == 0 else (v, None) for v in edge])
        )
    return expect_product(factors, budget, what="doubled-origin expectation")


def lf2_term(
    w: WeightedHypergraph, j: int, exps: Lf2Exponents, budget: float | None = None
) -> float:
    """Centered term: the edge omitting j, read at copy 0 of vertex 0, is
    replaced by (weight - 1); its own copy-0 exponent is ignored, every other
    active slot contributes its weight unchanged."""
    if not (1 <= j <= w.r):
        raise InvalidSubset(f"edge index {j} must be in 1..{w.r}")
    if exps.r != w.r:
        raise ShapeMismatch("exponent arity does not match hypergraph")
    ej = w.system.edge_omitting(j)
    centered = w.weights[ej].values - 1.0
    factors: list[tuple[np.ndarray, list[Var]]] = [
        (centered, [(v, 0) if v == 0 else (v, None) for v in ej])
    ]
    for edge, copy in exps.active_slots():
        if (edge, copy) == (ej, 0):
            continue
        fn = w.weights[edge]
        factors.append(
            (fn.values, [(v, copy) if v == 0 else (v, None) for v in edge])
        )
    return expect_product(factors, budget, what="centered doubled-origin term")


def lf2_telescoping(
    w: WeightedHypergraph,
    exps: Lf2Exponents,
    budget: float | None = None,
    tol: float = 1e-9,
) -> VerificationReport:
    """Peel active slots one at a time (canonical slot order); each step's
    centered term comes from ``lf2_term``, with the two copies of vertex 0
    relabeled when the peeled slot reads copy 1.  The terms must sum to the
    full expectation minus one."""
    full = lf2_expectation(w, exps, budget)
    report = VerificationReport(name="doubled-origin-telescoping")
    current = exps
    terms = []
    for edge, copy in exps.active_slots():
        j = next(v for v in range(w.r + 1) if v not in edge)
        if copy == 0:
            term = lf2_term(w, j, current, budget)
        else:
            term = lf2_term(w, j, current.swapped_copies(), budget)
        terms.append(term)
        report.ratios[f"term-edge-{j}-copy-{copy}"] = term
        current = current.with_slot(edge, copy, 0)
    total = math.fsum(terms)
    scale = max(1.0, abs(full))
    report.add(eq_check("telescoping-sum", full - 1.0, total, tol * scale))
    report.ratios["expectation"] = full
    return report


def lf2_chain_verify(
    w: WeightedHypergraph,
    j: int,
    exps: Lf2Exponents,
    budget: float | None = None,
    slack_rel: float = 1e-9,
) -> VerificationReport:
    """Doubling chain for a centered term: double the coordinates of the
    centered edge other than vertex 0 one at a time (ascending), splitting
    off the one edge that misses the new vertex at each step, then split the
    final two-copy average into the centered box power and the raw cube
    expectation.

    The surviving raw factor applies the centered edge's copy-1 exponent
    uniformly across the final cube; this literal reading is recorded as a
    report note.
    """
    if not (1 <= j <= w.r):
        raise InvalidSubset(f"edge index {j} must be in 1..{w.r}")
    r = w.r
    ej = w.system.edge_omitting(j)
    others = tuple(v for v in ej if v != 0)
    sup = sup_norm(w)
    centered = w.weights[ej].values - 1.0
    n_final = exps.table[(ej, 1)]

    def chain_factors(c: tuple[int, ...]) -> list[tuple[np.ndarray, list[Var]]]:
        factors: list[tuple[np.ndarray, list[Var]]] = []
        for omega in itertools.product((0, 1), repeat=len(c)):
            copy_of = dict(zip(c, omega))
            factors.append(
                (centered, [(0, 0) if v == 0 else (v, copy_of.get(v)) for v in ej])
            )
        for edge, copy in exps.active_slots():
            if (edge, copy) == (ej, 0):
                continue
            if any(v not in edge for v in c):
                continue  # this edge was split off when its missing vertex doubled
            fn = w.weights[edge]
            for omega in itertools.product((0, 1), repeat=len(c)):
                copy_of = dict(zip(c, omega))
                factors.append(
                    (fn.values, [(v, copy) if v == 0 else (v, copy_of.get(v)) for v in edge])
                )
        return factors

    report = VerificationReport(name="centered-term-chain")
    report.notes.append(
        "final raw cube factor applies the centered edge's copy-1 exponent "
        f"uniformly (value {n_final})"
    )
    q_at: dict[tuple[int, ...], float] = {}
    prefixes = [others[:t] for t in range(len(others) + 1)]
    for c in prefixes:
        q_at[c] = expect_product(
            chain_factors(c), budget, what=f"centered-term chain at c={c}"
        )

    bound = 1.0
    for t in range(len(others)):
        c, v_next = prefixes[t], others[t]
        edge_out = w.system.edge_omitting(v_next)
        out_factors = []
        for copy in (0, 1):
            if exps.table[(edge_out, copy)] != 1 or (edge_out, copy) == (ej, 0):
                continue
            fn = w.weights[edge_out]
            for omega in itertools.product((0, 1), repeat=len(c)):
                copy_of = dict(zip(c, omega))
                out_factors.append(
                    (fn.values, [(vv, copy) if vv == 0 else (vv, copy_of.get(vv)) for vv in edge_out])
                )
        mean = expect_product(out_factors, budget, what="split-off mean")
        mean_sq = expect_product(
            out_factors + out_factors, budget, what="split-off second moment"
        )
        count = len(out_factors)
        lhs = q_at[c] ** 2
        rhs = q_at[prefixes[t + 1]] * mean_sq
        slack = slack_rel * max(1.0, abs(lhs), abs(rhs))
        report.add(ineq_check(f"cs-step c={list(c)} v={v_next}", lhs, rhs, slack))
        sup_bound = mean * sup**count
        slack_sup = slack_rel * max(1.0, mean_sq, sup_bound)
        report.add(
            ineq_check(
                f"sup-pointwise c={list(c)} v={v_next}",
                mean_sq,
                sup_bound,
                slack_sup,
                note=f"exponent {count}",
            )
        )
        bound *= _root(mean_sq, t + 1, scale=max(1.0, abs(mean_sq)))

    # Final split: double vertex 0 separately in the centered and raw halves.
    c_star = prefixes[-1]
    box_factors = []
    for omega in itertools.product((0, 1), repeat=len(ej)):
        copy_of = dict(zip(ej, omega))
        box_factors.append((centered, [(v, copy_of[v]) for v in ej]))
    box_power = expect_product(box_factors, budget, what="centered box power")
    if n_final == 1:
        cube_power = cube_expectation(
            w.weights[ej], CubePattern.all_ones(len(ej)), budget
        )
    else:
        cube_power = 1.0
    lhs = q_at[c_star] ** 2
    rhs = box_power * cube_power
    slack = slack_rel * max(1.0, abs(lhs), abs(rhs))
    report.add(ineq_check("final-split", lhs, rhs, slack))

    box_norm = _root(box_power, r, scale=max(1.0, abs(box_power)))
    bound *= box_norm
    bound *= _root(cube_power, r, scale=max(1.0, abs(cube_power)))
    lhs_abs = abs(q_at[()])
    slack = slack_rel * max(1.0, lhs_abs, bound)
    report.add(ineq_check("composed-chain-bound", lhs_abs, bound, slack))
    report.ratios["lhs"] = lhs_abs
    report.ratios["composed-bound"] = bound
    report.ratios["box-norm-centered"] = box_norm
    report.ratios["sup"] = sup
    denom = box_norm * sup ** (r - 1)
    if denom > 0:
        report.ratios["lhs-over-boxnorm-times-sup-power"] = lhs_abs / denom
    return report
