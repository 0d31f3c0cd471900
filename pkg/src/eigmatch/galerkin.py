"""Discretization matrix builders and the spline symbol/grid machinery.

Covers three matrix families used by the experiments:

- variable-coefficient second-order finite differences (tridiagonal),
- the tensor-product biquadratic Galerkin matrix K (x) M + M (x) K,
- stiffness/mass matrices of degree-p, smoothness-C^k spline spaces on [0, 1],
  together with their (p-k) x (p-k) block symbols and the uniform grids on
  which the scaled matrices have exactly the branch samples as eigenvalues.

B-splines are evaluated with the knot-span table recursion; all Galerkin
integrals use Gauss-Legendre with p+1 nodes per knot span, which is exact for
the degree <= 2p piecewise-polynomial integrands, so the assembled matrices
agree with the symbolic ones to rounding error.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .eig import Spectrum
from .match import sorted_match

__all__ = [
    "BSplineBasis",
    "ReferenceBlocks",
    "GridKind",
    "make_basis",
    "bspline_eval",
    "bspline_deriv",
    "reference_blocks",
    "symbol_f",
    "symbol_h",
    "symbol_e_branches",
    "assemble_KM",
    "fd_matrix",
    "iga_2d_matrix",
    "seq_a",
    "alpha",
    "grid_points",
    "grid_size",
    "grid_assign_M",
    "grid_assign_L",
    "verify_eig_formula",
    "infer_grid_assignment",
]


# ---------------------------------------------------------------------------
# B-spline evaluation (knot-span table algorithm)
# ---------------------------------------------------------------------------

def _find_span(knots: np.ndarray, p: int, x: float) -> int:
    """Index s with knots[s] <= x < knots[s+1], clamped into the basis domain."""
    nf = knots.size - p - 1
    if x >= knots[nf]:
        return nf - 1
    s = int(np.searchsorted(knots, x, side="right")) - 1
    return max(s, p)


def _basis_and_deriv(knots: np.ndarray, p: int, span: int, x: float) -> tuple[np.ndarray, np.ndarray]:
    """Values and first derivatives of the p+1 B-splines alive on the span."""
    left = np.zeros(p + 1)
    right = np.zeros(p + 1)
    ndu = np.zeros((p + 1, p + 1))
    ndu[0, 0] = 1.0
    for j in range(1, p + 1):
        left[j] = x - knots[span + 1 - j]
        right[j] = knots[span + j] - x
        saved = 0.0
        for r in range(j):
            ndu[j, r] = right[r + 1] + left[j - r]
            temp = ndu[r, j - 1] / ndu[j, r]
            ndu[r, j] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        ndu[j, j] = saved
    values = ndu[:, p].copy()
    derivs = np.zeros(p + 1)
    if p > 0:
        for r in range(p + 1):
            d = 0.0
            if r >= 1:
                d += ndu[r - 1, p - 1] / ndu[p, r - 1]
            if r <= p - 1:
                d -= ndu[r, p - 1] / ndu[p, r]
            derivs[r] = p * d
    return values, derivs


@dataclass(frozen=True)
class BSplineBasis:
    """Degree-p, smoothness-C^k spline space data on [0, 1].

    The open knot vector has boundary knots of multiplicity p+1 and interior
    knots i/n of multiplicity p-k.  The full basis holds n(p-k)+k+1 functions;
    Galerkin assembly drops the first and last (they do not vanish at the
    boundary), leaving dim = n(p-k)+k-1.
    """

    p: int
    k: int
    n: int
    knots: np.ndarray
    dim: int

    @property
    def dim_full(self) -> int:
        return self.knots.size - self.p - 1


def make_basis(n: int, p: int, k: int) -> BSplineBasis:
    if p < 1 or not 0 <= k <= p - 1:
        raise ValueError(f"need p >= 1 and 0 <= k <= p-1, got p={p}, k={k}")
    if n < 1:
        raise ValueError("n must be >= 1")
    knots = np.concatenate(
        [np.zeros(p + 1), np.repeat(np.arange(1, n) / n, p - k), np.ones(p + 1)]
    )
    knots.setflags(write=False)
    return BSplineBasis(p=p, k=k, n=n, knots=knots, dim=n * (p - k) + k - 1)


def _eval_one(knots: np.ndarray, p: int, i: int, x: float, deriv: bool) -> float:
    span = _find_span(knots, p, x)
    if not span - p <= i <= span:
        return 0.0
    values, derivs = _basis_and_deriv(knots, p, span, x)
    return float((derivs if deriv else values)[i - span + p])


def bspline_eval(basis: BSplineBasis, i: int, x: float) -> float:
    """Value of the i-th full-basis function (0-based, boundary included)."""
    if not 0 <= i < basis.dim_full:
        raise ValueError(f"basis index {i} out of range [0, {basis.dim_full})")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    return _eval_one(basis.knots, basis.p, i, x, deriv=False)


def bspline_deriv(basis: BSplineBasis, i: int, x: float) -> float:
    """First derivative of the i-th full-basis function at x."""
    if not 0 <= i < basis.dim_full:
        raise ValueError(f"basis index {i} out of range [0, {basis.dim_full})")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    return _eval_one(basis.knots, basis.p, i, x, deriv=True)


# ---------------------------------------------------------------------------
# Reference basis on [0, eta] and its stiffness/mass blocks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReferenceBlocks:
    """Blocks of the interior (block Toeplitz) pattern of the spline matrices.

    ``Kblocks[l]`` and ``Mblocks[l]`` hold the (p-k) x (p-k) integrals of the
    reference basis derivatives/values against their shift by l, l = 0..eta-1.
    The l = 0 mass block is symmetric positive definite and the l = 0
    stiffness block symmetric positive semidefinite.
    """

    p: int
    k: int
    eta: int
    Kblocks: tuple[np.ndarray, ...]
    Mblocks: tuple[np.ndarray, ...]


def _reference_knots(p: int, k: int) -> tuple[np.ndarray, int, int]:
    """Padded knot vector of the reference basis plus (first index, eta).

    The reference functions live on integers 0..eta with every knot of
    multiplicity p-k; padding both ends up to multiplicity p+1 clamps the
    vector without changing the p-k functions of interest, whose padded
    indices start at k+1.
    """
    eta = math.ceil((p + 1) / (p - k))
    ref = np.repeat(np.arange(eta + 1), p - k).astype(float)
    padded = np.concatenate([np.zeros(k + 1), ref, np.full(k + 1, float(eta))])
    return padded, k + 1, eta


def _reference_values(p: int, k: int, ts: np.ndarray, deriv: bool) -> np.ndarray:
    """Matrix beta_r(t) (or derivative) for r = 1..p-k, shape (len(ts), p-k)."""
    knots, first, eta = _reference_knots(p, k)
    out = np.zeros((ts.size, p - k))
    for row, t in enumerate(ts):
        if t < 0.0 or t > eta:
            continue
        span = _find_span(knots, p, float(t))
        values, derivs = _basis_and_deriv(knots, p, span, float(t))
        chosen = derivs if deriv else values
        for r in range(p - k):
            i = first + r
            if span - p <= i <= span:
                out[row, r] = chosen[i - span + p]
    return out


@lru_cache(maxsize=None)
def reference_blocks(p: int, k: int) -> ReferenceBlocks:
    """Stiffness and mass blocks of the reference basis, exactly integrated."""
    if p < 1 or not 0 <= k <= p - 1:
        raise ValueError(f"need p >= 1 and 0 <= k <= p-1, got p={p}, k={k}")
    _, _, eta = _reference_knots(p, k)
    gx, gw = np.polynomial.legendre.leggauss(p + 1)
    Kblocks, Mblocks = [], []
    for ell in range(eta):
        K = np.zeros((p - k, p - k))
        M = np.zeros((p - k, p - k))
        for span in range(ell, eta):  # beta(t - ell) vanishes for t < ell
            ts = span + 0.5 + 0.5 * gx
            w = 0.5 * gw
            V = _reference_values(p, k, ts, deriv=False)
            D = _reference_values(p, k, ts, deriv=True)
            Vs = _reference_values(p, k, ts - ell, deriv=False)
            Ds = _reference_values(p, k, ts - ell, deriv=True)
            # entry (r, s) integrates beta_s(t) * beta_r(t - ell)
            K += np.einsum("q,qs,qr->rs", w, D, Ds)
            M += np.einsum("q,qs,qr->rs", w, V, Vs)
        Kblocks.append(K)
        Mblocks.append(M)
    return ReferenceBlocks(p=p, k=k, eta=eta, Kblocks=tuple(Kblocks), Mblocks=tuple(Mblocks))


def _trig_block_sum(blocks: Sequence[np.ndarray], theta: float) -> np.ndarray:
    out = np.asarray(blocks[0], dtype=complex).copy()
    for ell in range(1, len(blocks)):
        phase = np.exp(1j * ell * theta)
        out += blocks[ell] * phase + blocks[ell].T * np.conj(phase)
    return out


def symbol_f(p: int, k: int, theta: float) -> np.ndarray:
    """Stiffness symbol: Hermitian (p-k) x (p-k) trigonometric block sum."""
    rb = reference_blocks(p, k)
    return _trig_block_sum(rb.Kblocks, theta)


def symbol_h(p: int, k: int, theta: float) -> np.ndarray:
    """Mass symbol: Hermitian positive definite block sum."""
    rb = reference_blocks(p, k)
    return _trig_block_sum(rb.Mblocks, theta)


def symbol_e_branches(p: int, k: int, theta: float) -> np.ndarray:
    """Ascending generalized eigenvalues of (stiffness, mass) symbols at theta."""
    F = symbol_f(p, k, theta)
    H = symbol_h(p, k, theta)
    try:
        return scipy.linalg.eigh(F, H, eigvals_only=True)
    except scipy.linalg.LinAlgError as exc:  # mass symbol is PD by construction
        raise RuntimeError(f"mass symbol not positive definite at theta={theta}") from exc


# ---------------------------------------------------------------------------
# Galerkin assembly on [0, 1]
# ---------------------------------------------------------------------------

def assemble_KM(n: int, p: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Stiffness and mass matrices of the boundary-vanishing spline basis.

    Element-wise Gauss-Legendre assembly with p+1 nodes per element; both
    matrices are symmetric and positive definite of size n(p-k)+k-1.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    basis = make_basis(n, p, k)
    dim = basis.dim
    K = np.zeros((dim, dim))
    M = np.zeros((dim, dim))
    gx, gw = np.polynomial.legendre.leggauss(p + 1)
    h = 1.0 / n
    for e in range(n):
        span = p + e * (p - k)
        xs = (e + 0.5 + 0.5 * gx) * h
        ws = 0.5 * h * gw
        local = np.arange(span - p, span + 1) - 1  # kept (matrix) indices
        keep = (local >= 0) & (local < dim)
        for x, w in zip(xs, ws):
            values, derivs = _basis_and_deriv(basis.knots, p, span, x)
            v = values[keep]
            d = derivs[keep]
            rows = local[keep]
            K[np.ix_(rows, rows)] += w * np.outer(d, d)
            M[np.ix_(rows, rows)] += w * np.outer(v, v)
    return K, M


# ---------------------------------------------------------------------------
# Finite differences and the tensor-product biquadratic matrix
# ---------------------------------------------------------------------------

def fd_matrix(a: Callable, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Central finite-difference matrix for -(a(x) u')' on the grid i/(n+1).

    Returns (diag, offdiag) of the symmetric tridiagonal matrix:
    diag_i = a_{i-1/2} + a_{i+1/2} and offdiag_i = -a_{i+1/2}, where
    a_t = a(t/(n+1)).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    half = (np.arange(n + 1) + 0.5) / (n + 1)  # t = 1/2, 3/2, ..., n+1/2
    av = np.asarray(a(half), dtype=float)
    diag = av[:-1] + av[1:]
    offdiag = -av[1:-1]
    return diag, offdiag


def _banded_symmetric(n: int, stencil: Sequence[float], corners: Sequence[tuple[int, int, float]]):
    A = np.zeros((n, n))
    for offset, value in enumerate(stencil):
        idx = np.arange(n - offset)
        A[idx, idx + offset] = value
        A[idx + offset, idx] = value
    for i, j, value in corners:
        A[i, j] = value
        A[j, i] = value
        A[n - 1 - i, n - 1 - j] = value
        A[n - 1 - j, n - 1 - i] = value
    return A


def iga_2d_matrix(n: int) -> np.ndarray:
    """Tensor-product biquadratic Galerkin matrix K (x) M + M (x) K, size n^2.

    The factors are the C^1 quadratic stiffness/mass stencils with their
    boundary rows (8,-1,-1)/6 and (40,25,1)/120.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    K = _banded_symmetric(n, np.array([6.0, -2.0, -1.0]) / 6.0,
                          [(0, 0, 8.0 / 6.0), (0, 1, -1.0 / 6.0)])
    M = _banded_symmetric(n, np.array([66.0, 26.0, 1.0]) / 120.0,
                          [(0, 0, 40.0 / 120.0), (0, 1, 25.0 / 120.0)])
    return np.kron(K, M) + np.kron(M, K)


# ---------------------------------------------------------------------------
# Integer sequence and eigenvalue grid taxonomy
# ---------------------------------------------------------------------------

def seq_a(m: int) -> int:
    """a(m) = m + floor(sqrt(8m)), computed with integer square roots."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return m + math.isqrt(8 * m)


def alpha(p: int) -> int:
    """Index of the first partial sum of seq_a reaching p - 2.

    Direct scan: the smallest a >= 1 with seq_a(1) + ... + seq_a(a) >= p - 2.
    Steps at p = 6, 12, 19, ... (the gap between consecutive steps is the next
    sequence term), which places the full-grid branch of the mass-family
    eigenvalue formulas; validated against the assembled matrices for every
    p <= 16 in the test suite.
    """
    if p < 3:
        raise ValueError("alpha is defined for p >= 3")
    total = 0
    a = 0
    while total < p - 2:
        a += 1
        total += seq_a(a)
    return max(a, 1)


class GridKind(Enum):
    """The four uniform grids {i*pi/n} with endpoints optionally removed."""

    FULL = "full"
    NO_ZERO = "no_zero"
    NO_PI = "no_pi"
    INTERIOR = "interior"


def grid_points(kind: GridKind, n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    base = np.arange(n + 1) * math.pi / n
    if kind is GridKind.FULL:
        return base
    if kind is GridKind.NO_ZERO:
        return base[1:]
    if kind is GridKind.NO_PI:
        return base[:-1]
    return base[1:-1]


def grid_size(kind: GridKind, n: int) -> int:
    return {GridKind.FULL: n + 1, GridKind.NO_ZERO: n,
            GridKind.NO_PI: n, GridKind.INTERIOR: n - 1}[kind]


def _check_branch_index(p: int, k: int, j: int):
    if not 0 <= k <= min(1, p - 1):
        raise ValueError(f"grid assignments cover k in {{0, 1}}, got k={k}")
    if not 1 <= j <= p - k:
        raise ValueError(f"branch index j={j} out of range 1..{p - k}")


def grid_assign_M(p: int, k: int, j: int) -> GridKind:
    """Grid on which branch j of the mass symbol matches eig(n*M) exactly."""
    _check_branch_index(p, k, j)
    if k == 0:
        if j == p:
            return GridKind.INTERIOR
        return GridKind.NO_ZERO if (p + j) % 2 == 1 else GridKind.NO_PI
    if p == 2:
        return GridKind.NO_ZERO
    pivot = p - alpha(p) - 1
    if j == pivot:
        return GridKind.FULL
    if j == p - 1:
        return GridKind.INTERIOR
    odd = (p + j) % 2 == 1
    if j < pivot:
        return GridKind.NO_ZERO if odd else GridKind.NO_PI
    return GridKind.NO_PI if odd else GridKind.NO_ZERO


def grid_assign_L(p: int, k: int, j: int) -> GridKind:
    """Grid for branch j of the pencil symbol against eig(n^-2 M^-1 K)."""
    _check_branch_index(p, k, j)
    if (p + j) % 2 == 1:
        return GridKind.NO_ZERO if j == 1 else GridKind.FULL
    return GridKind.INTERIOR


# ---------------------------------------------------------------------------
# Exact-eigenvalue verification
# ---------------------------------------------------------------------------

def _branch_table(branches: Callable[[float], np.ndarray], n: int) -> np.ndarray:
    """branches(theta) over the full grid, shape (n+1, number of branches)."""
    thetas = grid_points(GridKind.FULL, n)
    rows = [np.atleast_1d(np.asarray(branches(t), dtype=float)) for t in thetas]
    return np.stack(rows, axis=0)


_ROW_SLICES = {
    GridKind.FULL: slice(None),
    GridKind.NO_ZERO: slice(1, None),
    GridKind.NO_PI: slice(None, -1),
    GridKind.INTERIOR: slice(1, -1),
}


def _assignment_values(table: np.ndarray, assignment: Sequence[GridKind]) -> np.ndarray:
    return np.concatenate([table[_ROW_SLICES[kind], j] for j, kind in enumerate(assignment)])


def verify_eig_formula(
    spectrum: Spectrum,
    branches: Callable[[float], np.ndarray],
    assignment: Sequence[GridKind],
    n: int,
    tol: float,
) -> tuple[bool, float]:
    """Check that a spectrum equals branch samples on the assigned grids.

    Forms the multiset {lambda_j(theta) : theta in grid(assignment[j])},
    sorted-matches it against the spectrum, and reports (max_error <= tol,
    max_error).
    """
    table = _branch_table(branches, n)
    if len(assignment) != table.shape[1]:
        raise ValueError(f"{table.shape[1]} branches but {len(assignment)} grid kinds")
    total = sum(grid_size(kind, n) for kind in assignment)
    if total != spectrum.n:
        raise ValueError(f"assigned grids hold {total} points, spectrum has {spectrum.n}")
    values = _assignment_values(table, assignment)
    err = sorted_match(values, spectrum.values).m_n
    return err <= tol, err


_KIND_ORDER = (GridKind.FULL, GridKind.NO_ZERO, GridKind.NO_PI, GridKind.INTERIOR)


def infer_grid_assignment(
    spectrum: Spectrum,
    branches: Callable[[float], np.ndarray],
    p: int,
    k: int,
    n: int,
    tol: float,
) -> tuple[GridKind, ...] | None:
    """Search the 4^(p-k) grid assignments for one matching the spectrum.

    Candidates whose total point count differs from the spectrum size are
    discarded before any eigenvalue comparison; the first assignment (in
    lexicographic FULL < NO_ZERO < NO_PI < INTERIOR order per branch) passing
    at ``tol`` is returned, or None when none passes.  The reconstruction is
    empirical: it recovers a figure-encoded table, not a closed formula.
    """
    table = _branch_table(branches, n)
    m = table.shape[1]
    if m != p - k:
        raise ValueError(f"branch function returns {m} values, expected {p - k}")
    target = spectrum.n
    sorted_spec = np.sort(spectrum.values, kind="stable")
    for assignment in itertools.product(_KIND_ORDER, repeat=m):
        if sum(grid_size(kind, n) for kind in assignment) != target:
            continue
        values = np.sort(_assignment_values(table, assignment), kind="stable")
        if float(np.max(np.abs(values - sorted_spec))) <= tol:
            return assignment
    return None
