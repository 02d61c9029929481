"""Uniformly-bounded-cosine enforcement for unitary elementary block
transforms: singular-value lower bounds, QR with column pivoting over the top
block row, and the crossing-swap permutation filter.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

try:
    from numba import njit as _njit
except ImportError:  # pragma: no cover - numba is normally available
    def _njit(*args, **kwargs):
        def wrap(f):
            return f
        return wrap

from .matcore import ElementaryBlockTransform

__all__ = [
    "SwapSequence",
    "RankDeficiencyError",
    "UbcPostconditionError",
    "gamma_ij",
    "gamma_tilde",
    "qr_column_pivoting",
    "attribute_R_filter",
    "pivoting_permutation",
    "check_ubc_bound",
    "enforce_ubc",
]


class RankDeficiencyError(ValueError):
    pass


class UbcPostconditionError(RuntimeError):
    """The sigma_min bound failed after enforcement; indicates a bug."""


@dataclass(frozen=True)
class SwapSequence:
    """Ordered column transpositions (r, r'), applied left to right; the
    product I_{11'} I_{22'} ... I_{ni ni'} is the pivoting permutation."""

    swaps: tuple[tuple[int, int], ...]
    dim: int
    ni: int

    def __post_init__(self):
        for r, rp in self.swaps:
            if not (1 <= r <= rp <= self.dim):
                raise ValueError(f"swap ({r}, {rp}) out of range for dim {self.dim}")

    def permutation_matrix(self) -> np.ndarray:
        p = np.eye(self.dim)
        for r, rp in self.swaps:
            p[:, [r - 1, rp - 1]] = p[:, [rp - 1, r - 1]]
        return p

    def permutation_indices(self) -> np.ndarray:
        """Index array with apply_columns(a) == a[:, indices]."""
        idx = np.arange(self.dim)
        for r, rp in self.swaps:
            idx[[r - 1, rp - 1]] = idx[[rp - 1, r - 1]]
        return idx

    def apply_columns(self, a: np.ndarray) -> np.ndarray:
        out = np.array(a, copy=True)
        for r, rp in self.swaps:
            out[:, [r - 1, rp - 1]] = out[:, [rp - 1, r - 1]]
        return out


def gamma_ij(n_i: int, n_j: int) -> float:
    """Lower bound for sigma_min of the diagonal blocks of a column-pivoted
    unitary elementary block transform with block sizes (n_i, n_j)."""
    if n_i < 1 or n_j < 1:
        raise ValueError("block sizes must be >= 1")
    first = 3.0 / math.sqrt((n_j + 1) * (4.0 ** n_i + 6 * n_j - 1))
    second = math.sqrt(1.0 / math.comb(n_i + n_j, n_i))
    return max(first, second)


def gamma_tilde(n: int) -> float:
    """Dimension-only lower bound 3*sqrt(2) / (4^n + 26)."""
    if n < 2:
        raise ValueError("need n >= 2")
    return 3.0 * math.sqrt(2.0) / (4.0 ** n + 26.0)


@_njit(cache=True)
def _qrcp_swaps(b: np.ndarray, chosen: np.ndarray) -> int:
    """Greedy column-pivoted elimination of the wide block row `b`
    (overwritten).  `chosen[r]` receives the 0-based column swapped into
    position r; returns the step index of a rank breakdown, or -1."""
    ni, w = b.shape
    for r in range(ni):
        best = r
        best_sq = -1.0
        for col in range(r, w):
            s = 0.0
            for row in range(r, ni):
                v = b[row, col]
                s += v.real * v.real + v.imag * v.imag
            if s > best_sq:
                best_sq = s
                best = col
        if best_sq <= 0.0:
            return r
        chosen[r] = best
        if best != r:
            for row in range(ni):
                tmp = b[row, r]
                b[row, r] = b[row, best]
                b[row, best] = tmp
        # unitary diagonal factor: make the pivot column real nonnegative,
        # then eliminate with the real Householder reflector
        for row in range(r, ni):
            x = b[row, r]
            m = abs(x)
            if m > 0.0:
                ph = np.conj(x) / m
                for col in range(r, w):
                    b[row, col] = ph * b[row, col]
        v = np.empty(ni - r, dtype=np.float64)
        ynorm = 0.0
        for row in range(r, ni):
            yv = b[row, r].real
            v[row - r] = yv
            ynorm += yv * yv
        ynorm = math.sqrt(ynorm)
        v[0] += ynorm
        vnorm2 = 0.0
        for row in range(ni - r):
            vnorm2 += v[row] * v[row]
        if vnorm2 > 0.0:
            coef = 2.0 / vnorm2
            for col in range(r, w):
                acc = 0.0 + 0.0j
                for row in range(r, ni):
                    acc += v[row - r] * b[row, col]
                acc *= coef
                for row in range(r, ni):
                    b[row, col] = b[row, col] - v[row - r] * acc
    return -1


def qr_column_pivoting(b: np.ndarray) -> SwapSequence:
    """Column-pivoted QR of the n_i x (n_i + n_j) top block row.

    Each step swaps in the remaining column of maximal Euclidean norm
    (lowest index wins ties) and eliminates with a complex Householder
    matrix written as a unitary diagonal times a real reflector.  Returns
    the swap sequence; the R factor is discarded.
    """
    b = np.array(b, dtype=np.complex128, copy=True)
    ni, w = b.shape
    if w < ni:
        raise ValueError("expected at least as many columns as rows")
    chosen = np.zeros(ni, dtype=np.int64)
    bad = _qrcp_swaps(b, chosen)
    if bad >= 0:
        raise RankDeficiencyError(f"zero remaining columns at step {bad + 1}")
    swaps = tuple((r + 1, int(chosen[r]) + 1) for r in range(ni))
    return SwapSequence(swaps, w, ni)


def attribute_R_filter(p: SwapSequence) -> SwapSequence:
    """Keep only the tail of the swap sequence starting at the first swap
    that crosses the block boundary (r' > n_i); identity if none crosses."""
    crossing = [k for k, (_, rp) in enumerate(p.swaps) if rp > p.ni]
    if not crossing:
        return SwapSequence((), p.dim, p.ni)
    return SwapSequence(p.swaps[crossing[0]:], p.dim, p.ni)


def _sigma_min(a: np.ndarray) -> float:
    return float(np.linalg.svd(a, compute_uv=False)[-1])


def check_ubc_bound(t: ElementaryBlockTransform, rho: float = 1.0) -> float:
    """Assert sigma_min(U_ii) >= rho * gamma_ij for a (permuted) transform;
    returns the sigma_min.  Failure signals an implementation bug."""
    ni = t.split
    nj = t.dim - ni
    bound = rho * gamma_ij(ni, nj)
    smin = _sigma_min(t.block(0, 0))
    if smin < bound:
        raise UbcPostconditionError(
            f"sigma_min {smin:.6e} < bound {bound:.6e} for sizes ({ni}, {nj})"
        )
    return smin


def pivoting_permutation(u: np.ndarray, ni: int, use_attr_R: bool) -> tuple[SwapSequence, bool]:
    """Swap sequence for the top block row, optionally crossing-swap filtered.

    The flag reports whether the sigma_min bound is guaranteed for the
    permuted transform.  It always is for the unfiltered permutation; with
    the filter it still is when nothing was dropped, or when no swap crosses
    the block boundary (then the full permutation only reorders the leading
    columns, which leaves sigma_min unchanged).  Dropping leading
    within-block swaps ahead of a crossing swap changes the selected column
    set and forfeits the bound.
    """
    swaps = qr_column_pivoting(u[:ni, :])
    if not use_attr_R:
        return swaps, True
    filtered = attribute_R_filter(swaps)
    guaranteed = filtered.swaps == swaps.swaps or not filtered.swaps
    return filtered, guaranteed


def enforce_ubc(t: ElementaryBlockTransform, rho: float = 1.0,
                use_attr_R: bool = False) -> ElementaryBlockTransform:
    """Right-multiply the pivot submatrix by the pivoting permutation so that
    sigma_min of its diagonal blocks is at least rho * gamma_ij.

    The bound is checked whenever it is guaranteed (see
    pivoting_permutation); a failure then signals an implementation bug.
    """
    if t.kind != "unitary":
        raise ValueError("UBC enforcement applies to unitary transforms")
    ni = t.split
    u = t.pivot_submatrix
    swaps, guaranteed = pivoting_permutation(u, ni, use_attr_R)
    out = ElementaryBlockTransform(t.i, t.j, swaps.apply_columns(u), ni, kind="unitary")
    if guaranteed:
        check_ubc_bound(out, rho)
    return out
