"""Gowers uniformity norms on Z_N and box norms on finite product spaces.

Two independent routes are kept deliberately separate:

* ``u_norm_brute`` evaluates the defining cube average term by term over the
  full (k+1)-dimensional index space.
* ``u_norm_fast`` uses the recursion through multiplicative differences with
  a Fourier base case at order two.

``box_norm_brute`` evaluates the box-norm cube average of a function on a
product of finite vertex sets, again by direct enumeration, and
``gcs_verify`` checks the product-form Cauchy-Schwarz bound for a full
assignment of functions to cube vertices.

Determinism: brute-force sums run in C-order chunks whose partial sums are
merged with Kahan compensation in a fixed order; einsum contractions are
performed unoptimized, which fixes their traversal order.  Repeated runs give
bit-identical results.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .budget import check_budget
from .cyclic import CyclicFn
from .errors import NumericalInconsistency, ShapeMismatch
from .report import VerificationReport, ineq_check

# Absolute clamp tolerance for cube averages that are squares analytically
# but may round slightly negative.
CLAMP_TOL = 1e-9

# Target number of elements per brute-force chunk.
_CHUNK_ELEMS = 1 << 22

CubeVertex = tuple[int, ...]


def cube_vertices(k: int) -> list[CubeVertex]:
    """All 0/1 assignments of length k, first coordinate slowest."""
    return list(itertools.product((0, 1), repeat=k))


def clamp_cube_average(avg: float, scale: float = 1.0) -> float:
    """Clamp a slightly negative cube average to zero.

    Averages of gradient-square type are nonnegative in exact arithmetic.
    A value in [-CLAMP_TOL * scale, 0) is treated as roundoff; anything more
    negative means a real inconsistency and raises.
    """
    if avg >= 0.0:
        return avg
    if avg >= -CLAMP_TOL * max(1.0, scale):
        return 0.0
    raise NumericalInconsistency(
        f"cube average {avg} is negative beyond the clamp tolerance"
    )


def _kahan_add(total: float, comp: float, term: float) -> tuple[float, float]:
    y = term - comp
    t = total + y
    comp = (t - total) - y
    return t, comp


def u_norm_brute(f: CyclicFn, k: int, budget: float | None = None) -> float:
    """Order-k uniformity norm by direct enumeration of the cube average.

    Every one of the N^(k+1) terms (a product of 2^k samples of f) is formed
    explicitly; cost N^(k+1) * 2^k elementary products, guarded by the budget.
    """
    if k < 1:
        raise ValueError(f"order must be >= 1, got {k}")
    n = f.n
    cost = float(n) ** (k + 1) * (2.0**k)
    check_budget(cost, budget, what=f"u_norm_brute(k={k}, n={n})")
    vals = f.values
    doubled = np.concatenate([vals, vals])

    # Grid over (x_1, ..., x_k), flattened in C order; x_0 is the fast axis.
    grid = np.indices((n,) * k).reshape(k, -1)
    offsets = []
    for omega in cube_vertices(k):
        s = np.zeros(grid.shape[1], dtype=np.int64)
        for j, bit in enumerate(omega):
            if bit:
                s += grid[j]
        offsets.append(np.mod(s, n))
    del grid

    x0 = np.arange(n)
    rows_per_chunk = max(1, _CHUNK_ELEMS // n)
    total, comp = 0.0, 0.0
    npoints = offsets[0].size
    for start in range(0, npoints, rows_per_chunk):
        stop = min(start + rows_per_chunk, npoints)
        prod = doubled[offsets[0][start:stop, None] + x0[None, :]]
        for s in offsets[1:]:
            prod = prod * doubled[s[start:stop, None] + x0[None, :]]
        total, comp = _kahan_add(total, comp, float(np.sum(prod)))
    avg = total / float(n) ** (k + 1)
    scale = float(np.max(np.abs(vals))) ** (2.0**k)
    return clamp_cube_average(avg, scale) ** (1.0 / 2.0**k)


def _shift_matrix(vals: np.ndarray) -> np.ndarray:
    """Row h is x -> f(x + h), materialized as strided views of two periods."""
    n = vals.size
    doubled = np.concatenate([vals, vals])
    stride = doubled.strides[0]
    return np.lib.stride_tricks.as_strided(
        doubled, shape=(n, n), strides=(stride, stride), writeable=False
    )


def _u_pow_fast(vals: np.ndarray, k: int) -> float:
    """The 2^k-th power of the order-k norm, via the difference recursion."""
    n = vals.size
    if k == 1:
        m = math.fsum(vals.tolist()) / n
        return m * m
    if k == 2:
        coeffs = np.fft.fft(vals) / n
        mag4 = (coeffs.real**2 + coeffs.imag**2) ** 2
        return math.fsum(mag4.tolist())
    diffs = vals[None, :] * _shift_matrix(vals)
    if k == 3:
        # Batched order-2 base case across all difference parameters h.
        coeffs = np.fft.fft(diffs, axis=1) / n
        per_h = np.sum((coeffs.real**2 + coeffs.imag**2) ** 2, axis=1)
        return math.fsum(per_h.tolist()) / n
    return math.fsum(_u_pow_fast(diffs[h], k - 1) for h in range(n)) / n


def u_norm_fast(f: CyclicFn, k: int) -> float:
    """Order-k uniformity norm via E_h of the order-(k-1) power of f * f(.+h),
    with the spectral identity as the order-2 base case."""
    if k < 1:
        raise ValueError(f"order must be >= 1, got {k}")
    if k == 1:
        return abs(math.fsum(f.values.tolist()) / f.n)
    power = _u_pow_fast(f.values, k)
    scale = float(np.max(np.abs(f.values))) ** (2.0**k)
    return clamp_cube_average(power, scale) ** (1.0 / 2.0**k)


@dataclass(frozen=True)
class EdgeFn:
    """A real function on a product of finite vertex sets.

    ``edge`` lists the vertex labels in strictly ascending order and ``dims``
    gives the matching set sizes; ``values`` is indexed with one axis per
    vertex in that order (row-major flattening is the serialization order).
    """

    edge: tuple[int, ...]
    dims: tuple[int, ...]
    values: np.ndarray

    def __post_init__(self):
        edge = tuple(int(v) for v in self.edge)
        dims = tuple(int(d) for d in self.dims)
        if list(edge) != sorted(set(edge)):
            raise ShapeMismatch(f"edge must be strictly ascending, got {edge}")
        if len(edge) != len(dims):
            raise ShapeMismatch("edge and dims must have equal length")
        if not edge:
            raise ShapeMismatch("edge must be nonempty")
        if any(d <= 0 for d in dims):
            raise ShapeMismatch(f"dims must be positive, got {dims}")
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != dims:
            raise ShapeMismatch(f"values shape {vals.shape} does not match dims {dims}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "edge", edge)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "values", vals)

    @property
    def npoints(self) -> int:
        return int(np.prod(self.dims))

    def mean(self) -> float:
        return math.fsum(self.values.ravel().tolist()) / self.npoints

    def centered(self) -> "EdgeFn":
        return EdgeFn(self.edge, self.dims, self.values - 1.0)

    def same_shape(self, other: "EdgeFn") -> bool:
        return self.edge == other.edge and self.dims == other.dims

    def to_json_obj(self) -> dict:
        return {
            "edge": list(self.edge),
            "dims": list(self.dims),
            "values": [float(v) for v in self.values.ravel()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json_obj(cls, obj: dict) -> "EdgeFn":
        dims = tuple(int(d) for d in obj["dims"])
        vals = np.asarray(obj["values"], dtype=np.float64).reshape(dims)
        return cls(tuple(int(v) for v in obj["edge"]), dims, vals)

    @classmethod
    def from_json(cls, text: str) -> "EdgeFn":
        return cls.from_json_obj(json.loads(text))

    @classmethod
    def ones(cls, edge: tuple[int, ...], dims: tuple[int, ...]) -> "EdgeFn":
        return cls(tuple(edge), tuple(dims), np.ones(tuple(dims)))


_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _box_einsum(gs: Mapping[CubeVertex, EdgeFn]) -> float:
    """Sum over both copies of every coordinate of prod_omega g_omega(x^omega).

    Coordinate i of the edge gets two einsum letters (copy 0 and copy 1);
    the operand for omega picks letter 2*i + omega_i on axis i.  Unoptimized
    einsum fixes the traversal order, so results are reproducible.
    """
    some = next(iter(gs.values()))
    kk = len(some.edge)
    operands = []
    subs = []
    for omega in cube_vertices(kk):
        g = gs[omega]
        subs.append("".join(_LETTERS[2 * i + omega[i]] for i in range(kk)))
        operands.append(g.values)
    expr = ",".join(subs) + "->"
    return float(np.einsum(expr, *operands, optimize=False))


def _validate_cube_assignment(gs: Mapping[CubeVertex, EdgeFn]) -> EdgeFn:
    if not gs:
        raise ShapeMismatch("empty cube assignment")
    some = next(iter(gs.values()))
    kk = len(some.edge)
    expected = set(cube_vertices(kk))
    if set(gs.keys()) != expected:
        raise ShapeMismatch(
            f"cube assignment must cover exactly the {2**kk} vertices of the "
            f"{kk}-cube"
        )
    for g in gs.values():
        if not g.same_shape(some):
            raise ShapeMismatch("all cube functions must share edge and dims")
    return some


def mixed_cube_expectation(
    gs: Mapping[CubeVertex, EdgeFn], budget: float | None = None
) -> float:
    """E[prod_omega g_omega(x^omega)] over two independent copies of each
    coordinate; the signed average, not a norm."""
    some = _validate_cube_assignment(gs)
    kk = len(some.edge)
    npts = float(some.npoints)
    cost = npts**2 * (2.0**kk)
    check_budget(cost, budget, what=f"cube expectation on edge {some.edge}")
    return _box_einsum(gs) / npts**2


def box_norm_brute(g: EdgeFn, budget: float | None = None) -> float:
    """Box norm by direct enumeration: the 2^|e|-th root of the cube average
    with g at every cube vertex.  For a single vertex this is |E g|."""
    kk = len(g.edge)
    npts = float(g.npoints)
    cost = npts**2 * (2.0**kk)
    check_budget(cost, budget, what=f"box norm on edge {g.edge}")
    avg = _box_einsum({omega: g for omega in cube_vertices(kk)}) / npts**2
    scale = float(np.max(np.abs(g.values))) ** (2.0**kk)
    return clamp_cube_average(avg, scale) ** (1.0 / 2.0**kk)


def gcs_verify(
    gs: Mapping[CubeVertex, EdgeFn],
    budget: float | None = None,
    slack_rel: float = 1e-9,
) -> VerificationReport:
    """Check |E prod_omega g_omega(x^omega)| <= prod_omega boxnorm(g_omega).

    Passes when RHS - LHS >= -slack_rel * max(1, RHS), so the equality case
    (all functions identical) is accepted up to roundoff.
    """
    some = _validate_cube_assignment(gs)
    kk = len(some.edge)
    npts = float(some.npoints)
    cost = (2.0**kk + 1.0) * npts**2 * (2.0**kk)
    check_budget(cost, budget, what=f"product-form bound on edge {some.edge}")
    lhs = abs(mixed_cube_expectation(gs, budget=budget))
    rhs = 1.0
    for omega in cube_vertices(kk):
        rhs *= box_norm_brute(gs[omega], budget=budget)
    report = VerificationReport(name="box-norm-product-bound")
    report.add(
        ineq_check(
            "gowers-cauchy-schwarz",
            lhs,
            rhs,
            slack=slack_rel * max(1.0, rhs),
        )
    )
    report.ratios["lhs"] = lhs
    report.ratios["rhs"] = rhs
    return report
