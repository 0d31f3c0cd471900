"""Domain types and grid utilities shared by all modules.

Conventions used throughout the package:

- A grid on a d-dimensional rectangle [a, b] is indexed by multi-indices
  i = 1..n (componentwise) in lexicographic order, the last component
  varying fastest.  The uniform grid point at multi-index i is
  a + i*(b - a)/n; note that it excludes the face x = a and includes x = b.
- Multisets keep their values in insertion order.  Operations that need a
  sorted view return permutations instead of mutating anything.
- Symbols evaluate vectorized: ``eval`` receives one numpy array per
  coordinate and must return an array of values of the same shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Rect",
    "AUGrid",
    "RealMultiset",
    "ScalarSymbol",
    "MatrixSymbol",
    "IntervalUnion",
    "make_uniform_grid",
    "grid_deviation",
    "restrict_indices",
    "count_grid_in_interval",
    "as_values",
]


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Rect:
    """Closed d-dimensional rectangle [a_1,b_1] x ... x [a_d,b_d]."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = _readonly(np.atleast_1d(self.a))
        b = _readonly(np.atleast_1d(self.b))
        if a.ndim != 1 or a.shape != b.shape or a.size < 1:
            raise ValueError("rectangle endpoints must be 1-d vectors of equal length")
        if np.any(a > b):
            raise ValueError("rectangle requires a <= b componentwise")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def d(self) -> int:
        return self.a.size

    @property
    def lengths(self) -> np.ndarray:
        return self.b - self.a


@dataclass(frozen=True)
class AUGrid:
    """A family of N(n) points in R^d indexed lexicographically by i = 1..n.

    ``points`` has shape (N, d) with N = prod(dims); row order follows the
    lexicographic order of the multi-indices.  The grid need not be contained
    in ``rect``; the rectangle only fixes the uniform grid the deviation is
    measured against.
    """

    rect: Rect
    dims: tuple[int, ...]
    points: np.ndarray

    def __post_init__(self):
        dims = tuple(int(n) for n in np.atleast_1d(np.asarray(self.dims)))
        if len(dims) != self.rect.d or any(n < 1 for n in dims):
            raise ValueError("dims must be positive integers, one per dimension")
        pts = _readonly(np.asarray(self.points, dtype=float).reshape(-1, self.rect.d))
        if pts.shape[0] != int(np.prod(dims)):
            raise ValueError(
                f"grid has {pts.shape[0]} points but dims {dims} require {int(np.prod(dims))}"
            )
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "points", pts)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def multi_indices(self) -> np.ndarray:
        """All multi-indices 1..n in lexicographic order, shape (N, d)."""
        grids = np.meshgrid(*[np.arange(1, n + 1) for n in self.dims], indexing="ij")
        return np.stack(grids, axis=-1).reshape(-1, len(self.dims))

    def uniform_points(self) -> np.ndarray:
        """Points of the uniform grid a + i*(b-a)/n in the same index order."""
        idx = self.multi_indices().astype(float)
        n = np.asarray(self.dims, dtype=float)
        return self.rect.a + idx * (self.rect.b - self.rect.a) / n

    def flatten_index(self, i: Sequence[int]) -> int:
        """Position of multi-index i (1-based components) in the row order."""
        zero_based = tuple(int(c) - 1 for c in i)
        return int(np.ravel_multi_index(zero_based, self.dims))

    def unflatten_index(self, flat: int) -> tuple[int, ...]:
        return tuple(int(c) + 1 for c in np.unravel_index(int(flat), self.dims))


def make_uniform_grid(rect: Rect, dims) -> AUGrid:
    """Uniform grid {a + i*(b-a)/n : i = 1..n} on ``rect``, deviation zero."""
    dims = tuple(int(n) for n in np.atleast_1d(np.asarray(dims)))
    if any(n < 1 for n in dims):
        raise ValueError(f"dims must be >= 1 componentwise, got {dims}")
    grids = np.meshgrid(*[np.arange(1, n + 1) for n in dims], indexing="ij")
    idx = np.stack(grids, axis=-1).reshape(-1, len(dims)).astype(float)
    pts = rect.a + idx * (rect.b - rect.a) / np.asarray(dims, dtype=float)
    return AUGrid(rect=rect, dims=dims, points=pts)


def grid_deviation(g: AUGrid) -> float:
    """Max infinity-norm distance of the grid from the uniform grid of its rect."""
    diff = np.abs(g.points - g.uniform_points())
    return float(diff.max(axis=1).max()) if g.size else 0.0


def restrict_indices(g: AUGrid, membership: Callable | None) -> list[tuple[int, ...]]:
    """Multi-indices (lexicographic order) whose grid points lie in Omega.

    ``membership`` receives one array per coordinate and returns a boolean
    array; ``None`` selects every point.
    """
    if membership is None:
        mask = np.ones(g.size, dtype=bool)
    else:
        coords = [g.points[:, j] for j in range(g.rect.d)]
        mask = np.asarray(membership(*coords), dtype=bool).reshape(-1)
    idx = g.multi_indices()
    return [tuple(int(c) for c in row) for row in idx[mask]]


def restrict_mask(g: AUGrid, membership: Callable | None) -> np.ndarray:
    """Boolean mask version of :func:`restrict_indices` (same row order)."""
    if membership is None:
        return np.ones(g.size, dtype=bool)
    coords = [g.points[:, j] for j in range(g.rect.d)]
    return np.asarray(membership(*coords), dtype=bool).reshape(-1)


def count_grid_in_interval(x0: float, h: float, alpha: float, beta: float) -> int:
    """Upper bound floor((beta-alpha)/h) + 1 for |{x0 + i*h} ∩ [alpha, beta]|.

    The actual number of points of a stepsize-h grid inside [alpha, beta]
    never exceeds this bound; used as a test oracle throughout.
    """
    if h <= 0:
        raise ValueError(f"stepsize must be positive, got {h}")
    if alpha > beta:
        raise ValueError("interval requires alpha <= beta")
    return int(math.floor((beta - alpha) / h)) + 1


@dataclass(frozen=True)
class RealMultiset:
    """Finite multiset of real numbers, stored in insertion order."""

    values: np.ndarray

    def __post_init__(self):
        v = _readonly(np.asarray(self.values, dtype=float).reshape(-1))
        if v.size < 1:
            raise ValueError("multiset must contain at least one value")
        if not np.all(np.isfinite(v)):
            raise ValueError("multiset values must be finite")
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size

    def sorted_values(self) -> np.ndarray:
        return np.sort(self.values, kind="stable")


def as_values(x) -> np.ndarray:
    """Coerce a RealMultiset or array-like into a 1-d float array."""
    if isinstance(x, RealMultiset):
        return x.values
    return np.asarray(x, dtype=float).reshape(-1)


@dataclass(frozen=True)
class ScalarSymbol:
    """Real-valued function on a rectangle (or a subdomain of it).

    ``eval`` must be vectorized over one array per coordinate.  ``membership``
    selects the subdomain Omega (default: the whole rectangle); whether Omega
    is regular enough (negligible boundary) is the caller's responsibility and
    is not checked here.  ``discontinuities`` lists breakpoints (1-d symbols)
    used to split quadrature panels and monotone pieces.
    """

    domain: Rect
    eval: Callable
    declared_inf: float
    declared_sup: float
    membership: Callable | None = None
    discontinuities: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.declared_inf <= self.declared_sup:
            raise ValueError("declared_inf must not exceed declared_sup")
        object.__setattr__(self, "discontinuities", tuple(float(t) for t in self.discontinuities))

    def sample(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at points of shape (N, d) (or (N,) when d = 1)."""
        pts = np.asarray(points, dtype=float)
        if self.domain.d == 1:
            return np.asarray(self.eval(pts.reshape(-1)), dtype=float)
        pts = pts.reshape(-1, self.domain.d)
        return np.asarray(self.eval(*(pts[:, j] for j in range(self.domain.d))), dtype=float)


@dataclass(frozen=True)
class MatrixSymbol:
    """Hermitian k x k matrix-valued function on an interval.

    ``eval`` maps a scalar angle to a (k, k) complex array.  Branches are the
    ascending eigenvalue functions of the matrix at each point.
    """

    interval: tuple[float, float]
    k: int
    eval: Callable[[float], np.ndarray]
    hermitian_tol: float = 1e-12

    def __post_init__(self):
        a, b = float(self.interval[0]), float(self.interval[1])
        if not (a < b and self.k >= 1):
            raise ValueError("need a nonempty interval and k >= 1")
        object.__setattr__(self, "interval", (a, b))

    def matrix(self, theta: float) -> np.ndarray:
        m = np.asarray(self.eval(float(theta)), dtype=complex)
        if m.shape != (self.k, self.k):
            raise ValueError(f"symbol returned shape {m.shape}, expected {(self.k, self.k)}")
        if np.max(np.abs(m - m.conj().T)) > self.hermitian_tol:
            raise ValueError(f"symbol is not Hermitian at theta={theta!r}")
        return m

    def branch_values(self, theta: float) -> np.ndarray:
        """Ascending eigenvalues lambda_1 <= ... <= lambda_k at ``theta``."""
        return np.linalg.eigvalsh(self.matrix(theta))

    def branch_samples(self, thetas) -> np.ndarray:
        """Branch values over an array of angles, shape (len(thetas), k)."""
        thetas = np.asarray(thetas, dtype=float).reshape(-1)
        out = np.empty((thetas.size, self.k))
        for i, t in enumerate(thetas):
            out[i] = self.branch_values(t)
        return out


@dataclass(frozen=True)
class IntervalUnion:
    """Disjoint union of closed intervals [lo_1,hi_1] ∪ ... with hi_i < lo_{i+1}.

    Represents essential ranges and their eps-expansions.  Membership uses
    closed endpoints; the open/closed distinction of an expansion only differs
    on a measure-zero set and is irrelevant for the finite diagnostics here.
    """

    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        ivs = tuple((float(lo), float(hi)) for lo, hi in self.intervals)
        for lo, hi in ivs:
            if lo > hi:
                raise ValueError(f"empty interval [{lo}, {hi}]")
        for (lo0, hi0), (lo1, hi1) in zip(ivs, ivs[1:]):
            if not hi0 < lo1:
                raise ValueError("intervals must be sorted and disjoint")
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def from_pairs(cls, pairs) -> "IntervalUnion":
        """Build from possibly unsorted/overlapping pairs, merging as needed."""
        pairs = sorted((float(lo), float(hi)) for lo, hi in pairs)
        merged: list[list[float]] = []
        for lo, hi in pairs:
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return cls(tuple((lo, hi) for lo, hi in merged))

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for lo, hi in self.intervals:
            out |= (x >= lo) & (x <= hi)
        return out

    def expand(self, eps: float) -> "IntervalUnion":
        """The eps-expansion: every interval widened by eps, overlaps merged."""
        if eps < 0:
            raise ValueError("expansion radius must be nonnegative")
        return IntervalUnion.from_pairs((lo - eps, hi + eps) for lo, hi in self.intervals)

    @property
    def lo(self) -> float:
        return self.intervals[0][0]

    @property
    def hi(self) -> float:
        return self.intervals[-1][1]
