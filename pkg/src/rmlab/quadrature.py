"""Adaptive quadrature of radial power integrands over axis-aligned boxes.

Integrates |x|**t over box-intersect-positive-orthant regions.  Away from
the origin the integrand is smooth, so tensor Gauss-Legendre with
bisection refinement converges quickly.  Boxes whose closure touches the
origin are peeled geometrically toward the corner: each bisection splits
off 2**n - 1 regular children and recurses into the corner child, whose
contribution shrinks like h**(t+n).
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

__all__ = ["power_integral_on_box", "QuadratureBudgetError"]

_GL_ORDER_COARSE = 5
_GL_ORDER_FINE = 8


class QuadratureBudgetError(RuntimeError):
    """Subdivision budget exhausted before the tolerance was met."""

    def __init__(self, message: str, value: float, error_estimate: float):
        super().__init__(f"{message} (achieved value {value!r}, error estimate {error_estimate!r})")
        self.value = value
        self.error_estimate = error_estimate


@lru_cache(maxsize=None)
def _gl_nodes(order: int, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor Gauss-Legendre nodes/weights on [0, 1]**dim."""
    x, w = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    grids = np.meshgrid(*([x] * dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    wgrids = np.meshgrid(*([w] * dim), indexing="ij")
    wts = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    return pts, wts


def _gl_box(t: float, lo: np.ndarray, hi: np.ndarray, order: int) -> float:
    dim = lo.size
    pts, wts = _gl_nodes(order, dim)
    widths = hi - lo
    x = lo[None, :] + pts * widths[None, :]
    r2 = np.sum(x * x, axis=1)
    vals = r2 ** (0.5 * t)
    return float(np.prod(widths) * np.dot(wts, vals))


def _adaptive(t: float, lo: np.ndarray, hi: np.ndarray, tol_abs: float, budget: list[int]) -> float:
    """Refine by bisecting the widest axis until coarse/fine estimates agree."""
    stack = [(lo, hi, tol_abs)]
    total = 0.0
    while stack:
        lo_c, hi_c, tol_c = stack.pop()
        if budget[0] <= 0:
            raise QuadratureBudgetError("quadrature budget exceeded", total, tol_abs)
        budget[0] -= 1
        coarse = _gl_box(t, lo_c, hi_c, _GL_ORDER_COARSE)
        fine = _gl_box(t, lo_c, hi_c, _GL_ORDER_FINE)
        if abs(fine - coarse) <= tol_c:
            total += fine
            continue
        axis = int(np.argmax(hi_c - lo_c))
        mid = 0.5 * (lo_c[axis] + hi_c[axis])
        lo_r = lo_c.copy()
        lo_r[axis] = mid
        hi_l = hi_c.copy()
        hi_l[axis] = mid
        stack.append((lo_c, hi_l, 0.5 * tol_c))
        stack.append((lo_r, hi_c, 0.5 * tol_c))
    return total


def power_integral_on_box(
    t: float,
    lower: tuple[float, ...],
    side: float | tuple[float, ...],
    rel_tol: float = 1e-8,
    budget: int = 50_000,
) -> float:
    """Integral of |x|**t over (box intersect (0, inf)**n).

    `side` may be a scalar (cube) or per-axis widths.  Raises
    QuadratureBudgetError when the subdivision budget runs out, and
    ValueError when the integral diverges at the origin (t + n <= 0 with
    the box touching the corner).
    """
    lo = np.array(lower, dtype=float)
    n = lo.size
    widths = np.full(n, float(side)) if np.isscalar(side) else np.array(side, dtype=float)
    hi = lo + widths
    lo = np.maximum(lo, 0.0)
    if np.any(hi <= lo):
        return 0.0

    # exact antiderivative in one dimension
    if n == 1:
        a, b = float(lo[0]), float(hi[0])
        if a == 0.0 and t <= -1.0:
            raise ValueError(f"integral of x**{t} diverges at 0")
        if t == -1.0:
            return math.log(b / a)
        return (b ** (t + 1.0) - a ** (t + 1.0)) / (t + 1.0)

    budget_box = [budget]
    if np.all(lo == 0.0):
        return _corner_integral(t, hi, rel_tol, budget_box)
    rough = abs(_gl_box(t, lo, hi, _GL_ORDER_FINE))
    tol_abs = rel_tol * max(rough, 1e-300)
    return _adaptive(t, lo, hi, tol_abs, budget_box)


def _corner_integral(t: float, hi: np.ndarray, rel_tol: float, budget: list[int]) -> float:
    """Peel the origin corner geometrically; converges iff t + n > 0."""
    n = hi.size
    if t + n <= 0.0:
        raise ValueError(f"integral of |x|**{t} diverges at the origin corner in dim {n}")
    total = 0.0
    cur_hi = hi.astype(float)
    zero = np.zeros(n)
    for _ in range(4000):
        mid = 0.5 * cur_hi
        # the 2**n - 1 children away from the corner are regular boxes
        ring = 0.0
        for bits in np.ndindex(*(2,) * n):
            if not any(bits):
                continue
            lo_c = np.where(np.array(bits, dtype=bool), mid, zero)
            hi_c = np.where(np.array(bits, dtype=bool), cur_hi, mid)
            rough = abs(_gl_box(t, lo_c, hi_c, _GL_ORDER_FINE))
            ring += _adaptive(t, lo_c, hi_c, rel_tol * max(rough, 1e-300), budget)
        total += ring
        cur_hi = mid
        # remaining corner mass over (0, h]^n: for t < 0 dominate |x|**t by
        # max_j(x_j)**t, for t >= 0 by the far-corner value (sqrt(n) h)**t
        h = float(np.max(cur_hi))
        if t >= 0.0:
            corner_bound = n ** (0.5 * t) * h ** (t + n)
        else:
            corner_bound = n * h ** (t + n) / (t + n)
        if corner_bound <= rel_tol * max(abs(total), 1e-300):
            return total
    raise QuadratureBudgetError("corner peeling did not converge", total, corner_bound)
