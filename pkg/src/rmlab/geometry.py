"""Axis-aligned cube geometry.

Cubes are closed boxes with all sides equal; families compare open
interiors, so cubes that share a face do not count as overlapping.
Everything here is immutable and pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "Cube",
    "CubeFamily",
    "Domain",
    "DimensionMismatchError",
    "volume",
    "interiors_disjoint",
    "box_distance",
    "dyadic_children",
    "ring_subdivision",
    "shell_partition_1d",
    "interiors_pairwise_disjoint",
    "overlap_volume",
]


class DimensionMismatchError(ValueError):
    """Operands live in different ambient dimensions."""


@dataclass(frozen=True)
class Cube:
    """Closed axis-aligned cube given by its lower corner and side length."""

    lower: tuple[float, ...]
    side: float

    def __post_init__(self) -> None:
        lower = tuple(float(c) for c in self.lower)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "side", float(self.side))
        if not lower:
            raise ValueError("cube needs at least one coordinate")
        if not all(math.isfinite(c) for c in lower) or not math.isfinite(self.side):
            raise ValueError("cube coordinates must be finite")
        if self.side <= 0.0:
            raise ValueError(f"cube side must be positive, got {self.side}")

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def upper(self) -> tuple[float, ...]:
        return tuple(c + self.side for c in self.lower)

    @property
    def center(self) -> tuple[float, ...]:
        return tuple(c + 0.5 * self.side for c in self.lower)

    @property
    def volume(self) -> float:
        return self.side ** self.dim

    def contains_point(self, x: Sequence[float]) -> bool:
        """Membership in the closed cube."""
        if len(x) != self.dim:
            raise DimensionMismatchError(f"point dim {len(x)} != cube dim {self.dim}")
        return all(lo <= xi <= lo + self.side for lo, xi in zip(self.lower, x))

    def contains_cube(self, other: "Cube") -> bool:
        _require_same_dim(self, other)
        return all(
            sl <= ol and ol + other.side <= sl + self.side
            for sl, ol in zip(self.lower, other.lower)
        )

    def translate(self, shift: Sequence[float]) -> "Cube":
        if len(shift) != self.dim:
            raise DimensionMismatchError("shift dim mismatch")
        return Cube(tuple(c + s for c, s in zip(self.lower, shift)), self.side)


def _require_same_dim(a: Cube, b: Cube) -> None:
    if a.dim != b.dim:
        raise DimensionMismatchError(f"cube dims differ: {a.dim} vs {b.dim}")


@dataclass(frozen=True)
class CubeFamily:
    """Ordered collection of same-dimension cubes.

    The disjoint-interior invariant is checked by
    :func:`interiors_pairwise_disjoint` (and enforced by norm scoring),
    not at construction time, so that large families stay cheap to build.
    """

    cubes: tuple[Cube, ...]

    def __post_init__(self) -> None:
        cubes = tuple(self.cubes)
        object.__setattr__(self, "cubes", cubes)
        if cubes:
            d = cubes[0].dim
            if any(c.dim != d for c in cubes):
                raise DimensionMismatchError("family mixes cube dimensions")

    @property
    def dim(self) -> int:
        if not self.cubes:
            raise ValueError("empty family has no dimension")
        return self.cubes[0].dim

    def __len__(self) -> int:
        return len(self.cubes)

    def __iter__(self) -> Iterator[Cube]:
        return iter(self.cubes)

    def __getitem__(self, i: int) -> Cube:
        return self.cubes[i]

    @cached_property
    def _arrays(self) -> tuple[np.ndarray, np.ndarray]:
        lows = np.array([c.lower for c in self.cubes], dtype=float)
        highs = lows + np.array([c.side for c in self.cubes], dtype=float)[:, None]
        return lows, highs

    def total_volume(self) -> float:
        return float(sum(c.volume for c in self.cubes))


@dataclass(frozen=True)
class Domain:
    """Either all of n-space or one fixed cube."""

    kind: str  # "whole-space" | "cube"
    dim: int
    cube: Cube | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("whole-space", "cube"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if (self.kind == "cube") != (self.cube is not None):
            raise ValueError("cube present exactly when kind == 'cube'")
        if self.cube is not None and self.cube.dim != self.dim:
            raise DimensionMismatchError("domain cube dim mismatch")

    @classmethod
    def whole_space(cls, dim: int) -> "Domain":
        return cls("whole-space", dim)

    @classmethod
    def of_cube(cls, cube: Cube) -> "Domain":
        return cls("cube", cube.dim, cube)

    def contains_cube(self, c: Cube) -> bool:
        if c.dim != self.dim:
            raise DimensionMismatchError("cube dim != domain dim")
        if self.kind == "whole-space":
            return True
        assert self.cube is not None
        return self.cube.contains_cube(c)


def volume(c: Cube) -> float:
    """Lebesgue measure side**dim."""
    return c.volume


# Coordinates are doubles, so cells meant to share a face can land a few
# ulps apart; per-axis overlaps below this relative slack count as touching.
_FACE_SLACK = 8.0 * np.finfo(float).eps


def interiors_disjoint(a: Cube, b: Cube) -> bool:
    """True iff the open boxes do not intersect (shared faces allowed).

    Overlaps within a few ulps of the coordinate scale are treated as
    shared faces, so grid cells built from edge arithmetic test disjoint.
    """
    _require_same_dim(a, b)
    for lo_a, lo_b in zip(a.lower, b.lower):
        lo = max(lo_a, lo_b)
        hi = min(lo_a + a.side, lo_b + b.side)
        if hi - lo <= _FACE_SLACK * max(abs(lo), abs(hi)):
            return True
    return False


def box_distance(a: Cube, b: Cube) -> float:
    """Euclidean distance between the closed boxes (0 iff closures meet)."""
    _require_same_dim(a, b)
    acc = 0.0
    for lo_a, lo_b in zip(a.lower, b.lower):
        gap = max(0.0, lo_a - (lo_b + b.side), lo_b - (lo_a + a.side))
        acc += gap * gap
    return math.sqrt(acc)


def _axis_overlap(lo_a: float, side_a: float, lo_b: float, side_b: float) -> float:
    """Overlap width of [lo_a, lo_a+side_a] and [lo_b, lo_b+side_b].

    Arranged so that a side much smaller than the ulp of its position is
    never absorbed: min(lo+side, ...) - max(lo, ...) is rewritten to keep
    each small side as an explicit term.
    """
    if lo_a >= lo_b:
        return min(side_a, (lo_b - lo_a) + side_b)
    return min(side_b, (lo_a - lo_b) + side_a)


def overlap_volume(a: Cube, b: Cube) -> float:
    """Volume of the (closed) intersection box."""
    _require_same_dim(a, b)
    vol = 1.0
    for lo_a, lo_b in zip(a.lower, b.lower):
        w = _axis_overlap(lo_a, a.side, lo_b, b.side)
        if w <= 0.0:
            return 0.0
        vol *= w
    return vol


def dyadic_children(c: Cube) -> CubeFamily:
    """The 2**dim half-side subcubes tiling c."""
    half = 0.5 * c.side
    kids = []
    for bits in product((0, 1), repeat=c.dim):
        kids.append(Cube(tuple(lo + half * b for lo, b in zip(c.lower, bits)), half))
    return CubeFamily(tuple(kids))


def ring_subdivision(i: int, N: int, n: int) -> CubeFamily:
    """Tile the grid ring (0, N**(i+1)]^n minus (0, N**i]^n with N**n - 1 cubes.

    The outer block is cut into the N**n grid cells of side N**i and the
    cell at the origin corner (which is exactly the inner block) is dropped.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if N < 2 or N * N <= n:
        raise ValueError(f"grid base must satisfy N >= 2 and N > sqrt(n), got N={N}, n={n}")
    side = float(N) ** i
    cells = []
    for k in product(range(N), repeat=n):
        if all(kj == 0 for kj in k):
            continue
        cells.append(Cube(tuple(kj * side for kj in k), side))
    return CubeFamily(tuple(cells))


def shell_partition_1d(t_outer: float, t_inner: float, parts_per_side: int) -> CubeFamily:
    """Split [-t_outer, -t_inner] and [t_inner, t_outer] into equal intervals.

    One-dimensional helper for shell families around [-1, 1]; each of the
    two symmetric pieces is divided into `parts_per_side` intervals.
    """
    if not 0.0 < t_inner < t_outer:
        raise ValueError(f"need 0 < t_inner < t_outer, got {t_inner}, {t_outer}")
    if parts_per_side < 1:
        raise ValueError("parts_per_side must be >= 1")
    w = (t_outer - t_inner) / parts_per_side
    cells = []
    for j in range(parts_per_side):
        cells.append(Cube((-t_outer + j * w,), w))
    for j in range(parts_per_side):
        cells.append(Cube((t_inner + j * w,), w))
    return CubeFamily(tuple(cells))


def interiors_pairwise_disjoint(cubes: Sequence[Cube] | CubeFamily, chunk: int = 512) -> bool:
    """Exhaustive pairwise open-box disjointness, chunk-vectorized.

    Handles thousands of cubes without materializing the full m x m
    overlap matrix at once.
    """
    seq = tuple(cubes)
    m = len(seq)
    if m < 2:
        return True
    d = seq[0].dim
    if any(c.dim != d for c in seq):
        raise DimensionMismatchError("family mixes cube dimensions")
    lows = np.array([c.lower for c in seq], dtype=float)
    highs = lows + np.array([c.side for c in seq], dtype=float)[:, None]
    for start in range(0, m, chunk):
        stop = min(start + chunk, m)
        lo_blk = lows[start:stop, None, :]
        hi_blk = highs[start:stop, None, :]
        over_lo = np.maximum(lo_blk, lows[None, :, :])
        over_hi = np.minimum(hi_blk, highs[None, :, :])
        slack = _FACE_SLACK * np.maximum(np.abs(over_lo), np.abs(over_hi))
        inter = np.all(over_hi - over_lo > slack, axis=-1)
        # ignore self-pairs and count each unordered pair once
        rows = np.arange(start, stop)[:, None]
        cols = np.arange(m)[None, :]
        if np.any(inter & (cols > rows)):
            return False
    return True
