"""Partition-norm engines.

The family score of f against a disjoint-interior cube family is

    sum_i |Q_i| ** (1 - p*alpha - p/q) * ||f||_{L^q(Q_i)} ** p

and the partition norm is the supremum of score ** (1/p) over all such
families.  Exact suprema over uncountable cube families are not
computable; the optimizer returns certified lower bounds over (shifted)
dyadic grids, with the achieving family attached as a certificate, while
analytic upper bounds live in the analysis module.  NormEstimate.kind
makes the gap explicit.
"""

from __future__ import annotations

import math
from itertools import product as iter_product
from typing import Sequence

import numpy as np

from .estimate import LOWER_BOUND, NormEstimate
from .funcrep import FunctionLike, ParamSpace, StepFunction, lq_norm_on_cube
from .geometry import Cube, CubeFamily, Domain, dyadic_children, interiors_pairwise_disjoint

__all__ = [
    "rm_score",
    "rm_norm_dyadic",
    "rm_norm_bruteforce_1d",
    "rm_norm_estimate",
    "riesz_norm",
    "morrey_norm_estimate",
    "DEFAULT_OFFSETS",
    "MAX_DP_DEPTH",
    "MAX_BRUTEFORCE_CELLS",
]

DEFAULT_OFFSETS: tuple[float, ...] = (0.0, 1.0 / 3.0, 2.0 / 3.0)
MAX_DP_DEPTH = {1: 24, 2: 12, 3: 8}
MAX_BRUTEFORCE_CELLS = 14


def rm_score(
    f: FunctionLike,
    family: CubeFamily | Sequence[Cube],
    params: ParamSpace,
    domain: Domain | None = None,
    check: bool = True,
) -> float:
    """Exact family score sum_i |Q_i|**(1-p*alpha-p/q) * ||f||_{L^q(Q_i)}**p.

    Zero-mass cubes contribute zero regardless of the volume exponent.
    Raises if the family has overlapping interiors or leaves the domain.
    """
    if math.isinf(params.p):
        raise ValueError("family scores need finite p; use the single-cube norm for p = inf")
    cubes = tuple(family)
    if check and not interiors_pairwise_disjoint(cubes):
        raise ValueError("family interiors overlap")
    if domain is not None:
        for c in cubes:
            if not domain.contains_cube(c):
                raise ValueError(f"cube {c} is not inside the domain")
    e = params.score_exponent
    total = 0.0
    for c in cubes:
        norm_q = lq_norm_on_cube(f, c, params.q)
        if norm_q > 0.0:
            total += c.volume ** e * norm_q ** params.p
    return total


# ---------------------------------------------------------------------------
# dyadic dynamic program
# ---------------------------------------------------------------------------

class _StepMass1D:
    """Prefix-integral table for fast interval mass queries on a 1-D step function.

    prefix(x) = integral over (-inf, x] of |f|**q is piecewise linear with
    breakpoints at the piece endpoints; a query is two searchsorted lookups.
    """

    def __init__(self, f: StepFunction, q: float):
        lows, sides, heights = f._arrays
        lo = lows[:, 0]
        order = np.argsort(lo)
        self.lo = lo[order]
        self.side = sides[order]
        self.hq = heights[order] ** q
        seg = self.hq * self.side
        self.prefix_at_lo = np.concatenate(([0.0], np.cumsum(seg)))[:-1]

    def prefix(self, x: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.lo, x, side="right") - 1
        out = np.zeros_like(np.asarray(x, dtype=float))
        valid = idx >= 0
        iv = idx[valid]
        # clamp(x - lo, 0, side) keeps pieces far smaller than the ulp of
        # their position from being absorbed by endpoint arithmetic
        inside = np.minimum(np.maximum(x[valid] - self.lo[iv], 0.0), self.side[iv])
        out[valid] = self.prefix_at_lo[iv] + self.hq[iv] * inside
        # pieces are interior-disjoint, so at most one piece covers x and
        # all earlier pieces are fully counted by the running prefix
        return out

    def mass(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.prefix(b) - self.prefix(a)


def _cell_scores_1d(mass: np.ndarray, width: float, params: ParamSpace) -> np.ndarray:
    e = params.score_exponent
    r = params.p if math.isinf(params.q) else params.p / params.q
    out = np.zeros_like(mass)
    pos = mass > 0.0
    out[pos] = width ** e * mass[pos] ** r
    return out


def _dp_grid_1d(
    table: _StepMass1D, origin: float, side: float, depth: int, params: ParamSpace
) -> tuple[list[float], list[np.ndarray], list[np.ndarray]]:
    """Bottom-up dyadic DP on one shifted grid.

    Returns per-horizon best root values plus, for the full horizon, the
    per-depth score and keep-whole-cell decision arrays used to read the
    achieving family back out.
    """
    scores: list[np.ndarray] = []
    for d in range(depth + 1):
        cells = 1 << d
        w = side / cells
        edges = origin + w * np.arange(cells + 1, dtype=float)
        mass = table.mass(edges[:-1], edges[1:])
        scores.append(_cell_scores_1d(mass, w, params))

    values: list[float] = []
    keep_full: list[np.ndarray] = []
    for horizon in range(depth + 1):
        best = scores[horizon].copy()
        keeps = [np.ones(1 << horizon, dtype=bool)]
        for d in range(horizon - 1, -1, -1):
            child_sum = best[0::2] + best[1::2]
            keep = scores[d] >= child_sum
            best = np.where(keep, scores[d], child_sum)
            keeps.append(keep)
        keeps.reverse()
        values.append(float(best[0]))
        if horizon == depth:
            keep_full = keeps
    return values, scores, keep_full


def _read_family_1d(
    origin: float, side: float, depth: int, scores: list[np.ndarray], keep: list[np.ndarray]
) -> CubeFamily:
    cells: list[Cube] = []
    stack = [(0, 0)]  # (depth, index)
    while stack:
        d, j = stack.pop()
        if keep[d][j] or d == depth:
            if scores[d][j] > 0.0:
                w = side / (1 << d)
                cells.append(Cube((origin + j * w,), w))
        else:
            stack.append((d + 1, 2 * j))
            stack.append((d + 1, 2 * j + 1))
    return CubeFamily(tuple(cells))


def _dp_generic(
    f: FunctionLike, cube: Cube, depth: int, params: ParamSpace
) -> tuple[float, list[Cube]]:
    """Recursive DP for any dimension / function class (small depths)."""
    norm_q = lq_norm_on_cube(f, cube, params.q)
    score = cube.volume ** params.score_exponent * norm_q ** params.p if norm_q > 0.0 else 0.0
    if depth == 0:
        return score, ([cube] if score > 0.0 else [])
    child_total = 0.0
    child_cells: list[Cube] = []
    for child in dyadic_children(cube):
        v, cells = _dp_generic(f, child, depth - 1, params)
        child_total += v
        child_cells.extend(cells)
    if score >= child_total:
        return score, ([cube] if score > 0.0 else [])
    return child_total, child_cells


def rm_norm_dyadic(
    f: FunctionLike,
    root: Cube,
    depth: int,
    params: ParamSpace,
    offsets: Sequence[float] | None = None,
) -> NormEstimate:
    """Certified lower bound on the partition norm via shifted dyadic grids.

    Each offset vector translates the grid origin by that fraction of the
    root side per axis; within one grid the optimizer picks, for every
    cell, either the cell itself or the best split into its dyadic
    children.  The result is the max over grids, reported as the p-th
    root, with the achieving family as certificate and the per-depth
    running maxima as trace.
    """
    if math.isinf(params.p):
        raise ValueError("p = inf routes to morrey_norm_estimate")
    n = root.dim
    cap = MAX_DP_DEPTH.get(n)
    if cap is not None and depth > cap:
        raise ValueError(f"depth {depth} exceeds the cap {cap} for dimension {n}")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    offset_list = tuple(DEFAULT_OFFSETS if offsets is None else offsets)
    if any(not 0.0 <= o < 1.0 for o in offset_list):
        raise ValueError("offsets must lie in [0, 1)")

    fast = isinstance(f, StepFunction) and n == 1 and not math.isinf(params.q) and len(f) > 0
    best_by_depth = [0.0] * (depth + 1)
    best_value = -1.0
    best_family: CubeFamily = CubeFamily(())

    if fast:
        table = _StepMass1D(f, params.q)
        for o in offset_list:
            origin = root.lower[0] + o * root.side
            values, scores, keep = _dp_grid_1d(table, origin, root.side, depth, params)
            for d, v in enumerate(values):
                best_by_depth[d] = max(best_by_depth[d], v)
            if values[depth] > best_value:
                best_value = values[depth]
                best_family = _read_family_1d(origin, root.side, depth, scores, keep)
    else:
        for vec in iter_product(offset_list, repeat=n):
            shifted = root.translate(tuple(o * root.side for o in vec))
            for d in range(depth + 1):
                v, cells = _dp_generic(f, shifted, d, params)
                best_by_depth[d] = max(best_by_depth[d], v)
                if d == depth and v > best_value:
                    best_value = v
                    best_family = CubeFamily(tuple(cells))

    running = 0.0
    trace = []
    for d, v in enumerate(best_by_depth):
        running = max(running, v)
        trace.append((float(d), running ** (1.0 / params.p)))
    value = max(best_value, 0.0) ** (1.0 / params.p)
    return NormEstimate(value, LOWER_BOUND, certificate=best_family, trace=tuple(trace))


# ---------------------------------------------------------------------------
# brute-force oracle over interval compositions
# ---------------------------------------------------------------------------

def rm_norm_bruteforce_1d(
    f: FunctionLike,
    root: Cube,
    grid_cells: int,
    params: ParamSpace,
) -> NormEstimate:
    """Exact maximum of the family score over every composition of a uniform
    1-D grid into contiguous intervals.

    A grid with m cells has 2**(m-1) compositions (every internal boundary
    is either cut or not); all are enumerated, so this is an independent
    oracle for grid-aligned optimizers.  Covering compositions are optimal
    because scores are nonnegative, so gaps are never needed.
    """
    if root.dim != 1:
        raise ValueError("brute force oracle is one-dimensional")
    if math.isinf(params.p):
        raise ValueError("brute force oracle needs finite p")
    if not 1 <= grid_cells <= MAX_BRUTEFORCE_CELLS:
        raise ValueError(f"grid_cells must be in 1..{MAX_BRUTEFORCE_CELLS}")
    m = grid_cells
    w = root.side / m
    lo = root.lower[0]
    edges = lo + w * np.arange(m + 1, dtype=float)

    e = params.score_exponent
    score = np.zeros((m + 1, m + 1))
    for i in range(m):
        for j in range(i + 1, m + 1):
            cell = Cube((edges[i],), edges[j] - edges[i])
            nq = lq_norm_on_cube(f, cell, params.q)
            score[i][j] = (edges[j] - edges[i]) ** e * nq ** params.p if nq > 0.0 else 0.0

    best = -1.0
    best_cuts = 0
    for mask in range(1 << (m - 1)):
        total = 0.0
        start = 0
        for b in range(m - 1):
            if mask >> b & 1:
                total += score[start][b + 1]
                start = b + 1
        total += score[start][m]
        if total > best:
            best = total
            best_cuts = mask
    cells = []
    start = 0
    for b in range(m - 1):
        if best_cuts >> b & 1:
            if score[start][b + 1] > 0.0:
                cells.append(Cube((edges[start],), edges[b + 1] - edges[start]))
            start = b + 1
    if score[start][m] > 0.0:
        cells.append(Cube((edges[start],), edges[m] - edges[start]))
    value = max(best, 0.0) ** (1.0 / params.p)
    return NormEstimate(
        value,
        LOWER_BOUND,
        certificate=CubeFamily(tuple(cells)),
        trace=((float(m), value),),
    )


# ---------------------------------------------------------------------------
# specializations and dispatch
# ---------------------------------------------------------------------------

def riesz_norm(
    f: FunctionLike, root: Cube, p: float, depth: int, offsets: Sequence[float] = (0.0,)
) -> NormEstimate:
    """Partition norm at (p, q=1, alpha=0): sum |Q_i| (average |f| on Q_i)**p.

    At a depth resolving the constancy scale of a step function this equals
    the L^p norm on the root.  Offsets default to the aligned grid so the
    certificate stays inside the root cube.
    """
    if not 1.0 < p < math.inf:
        raise ValueError("Riesz norm needs p in (1, inf)")
    return rm_norm_dyadic(f, root, depth, ParamSpace(p, 1.0, 0.0), offsets=offsets)


def morrey_norm_estimate(
    f: FunctionLike,
    domain: Domain,
    q: float,
    alpha: float,
    dyadic_depth: int = 6,
    include_merges: bool = True,
    root: Cube | None = None,
) -> NormEstimate:
    """Lower bound for sup over single cubes of |Q|**(-alpha-1/q) ||f||_{L^q(Q)}.

    Candidates: every support cube of f, dyadic subcubes of a root cube
    (the domain cube, or a bounding cube of the support on the whole
    space), and smallest enclosing cubes of runs of adjacent supports.
    """
    if math.isinf(q):
        raise ValueError("Morrey estimate needs q < inf")
    if not -1.0 / q <= alpha <= 0.0:
        raise ValueError(f"alpha must lie in [-1/q, 0], got {alpha}")
    candidates: list[Cube] = []
    supports: list[Cube] = []
    if isinstance(f, StepFunction) and len(f) > 0:
        supports = [c for c, h in f.pieces if h > 0.0]
    candidates.extend(supports)

    if root is None:
        if domain.kind == "cube":
            assert domain.cube is not None
            root = domain.cube
        elif supports:
            lows = np.min(np.array([c.lower for c in supports]), axis=0)
            highs = np.max(np.array([c.upper for c in supports]), axis=0)
            side = float(np.max(highs - lows))
            root = Cube(tuple(lows), side)
    if root is not None:
        frontier = [root]
        for _ in range(dyadic_depth + 1):
            candidates.extend(frontier)
            if len(frontier) > 4096:
                break
            frontier = [kid for c in frontier for kid in dyadic_children(c)]

    if include_merges and supports:
        order = sorted(supports, key=lambda c: c.lower)
        for i in range(len(order)):
            for j in range(i + 1, min(i + 9, len(order) + 1)):
                group = order[i:j]
                lows = np.min(np.array([c.lower for c in group]), axis=0)
                highs = np.max(np.array([c.upper for c in group]), axis=0)
                side = float(np.max(highs - lows))
                candidates.append(Cube(tuple(lows), side))

    if domain.kind == "cube":
        candidates = [c for c in candidates if domain.contains_cube(c)]

    e = -alpha - 1.0 / q
    best = 0.0
    best_cube: Cube | None = None
    for c in candidates:
        nq = lq_norm_on_cube(f, c, q)
        if nq == 0.0:
            continue
        val = c.volume ** e * nq
        if val > best:
            best = val
            best_cube = c
    cert = CubeFamily((best_cube,) if best_cube is not None else ())
    return NormEstimate(best, LOWER_BOUND, certificate=cert, trace=((float(len(candidates)), best),))


def rm_norm_estimate(
    f: FunctionLike,
    params: ParamSpace,
    root: Cube,
    depth: int,
    offsets: Sequence[float] | None = None,
    domain: Domain | None = None,
) -> NormEstimate:
    """Partition-norm lower bound; p = inf routes to the single-cube branch."""
    if math.isinf(params.p):
        dom = domain if domain is not None else Domain.of_cube(root)
        return morrey_norm_estimate(f, dom, params.q, params.alpha, dyadic_depth=min(depth, 8), root=root)
    return rm_norm_dyadic(f, root, depth, params, offsets=offsets)
