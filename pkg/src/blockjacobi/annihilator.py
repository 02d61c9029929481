"""Stacked off-diagonal-block vectors, block Jacobi annihilators and the
cycle operators built from them, plus the empirical contraction-factor sweep.

The stacked vector lists the strictly-upper blocks column-stacked, block
column by block column, followed by the strictly-lower blocks row-stacked,
block row by block row.  For a Hermitian matrix the lower half is the
conjugate of the upper half.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matcore import BlockPartition, ElementaryBlockTransform, apply_similarity_raw
from .pivot import PivotOrdering
from .ubc import enforce_ubc

__all__ = [
    "tau",
    "VecIndexer",
    "vec_pi",
    "vec0_inverse",
    "AnnihilatorMatrix",
    "build_annihilator_oracle",
    "build_annihilator_structured",
    "apply_annihilator",
    "build_operator",
    "spectral_norm",
    "empirical_mu",
]

DENSE_DIM_LIMIT = 12  # materialize 2K x 2K matrices only for n <= this


def tau(i: int, j: int, m: int) -> int:
    """Position (1-based) of block (i, j) in the stacked block vector."""
    if not (1 <= i <= m and 1 <= j <= m):
        raise ValueError(f"indices ({i}, {j}) out of range for m={m}")
    if i == j:
        raise ValueError("diagonal positions have no vector slot")
    if i < j:
        return (j - 1) * (j - 2) // 2 + i
    return tau(j, i, m) + m * (m - 1) // 2


@dataclass(frozen=True)
class VecIndexer:
    """Segment table for the length-2K stacked off-diagonal block vector."""

    partition: BlockPartition
    K: int
    seg_start: tuple[int, ...]  # by tau position, 1-based tau -> 0-based offset
    seg_len: tuple[int, ...]

    @classmethod
    def build(cls, p: BlockPartition) -> "VecIndexer":
        m = p.m
        big_m = m * (m - 1) // 2
        n_big = p.n * (p.n - 1) // 2
        k = n_big - sum(s * (s - 1) // 2 for s in p.sizes)
        lengths = [0] * (2 * big_m + 1)
        for i in range(1, m + 1):
            for j in range(1, m + 1):
                if i != j:
                    lengths[tau(i, j, m)] = p.size(i) * p.size(j)
        starts = [0] * (2 * big_m + 1)
        acc = 0
        for t in range(1, 2 * big_m + 1):
            starts[t] = acc
            acc += lengths[t]
        assert acc == 2 * k
        return cls(p, k, tuple(starts), tuple(lengths))

    def segment(self, i: int, j: int) -> slice:
        t = tau(i, j, self.partition.m)
        return slice(self.seg_start[t], self.seg_start[t] + self.seg_len[t])

    @property
    def length(self) -> int:
        return 2 * self.K


def _seg_vector(block: np.ndarray, lower: bool) -> np.ndarray:
    # upper blocks are column-stacked, lower blocks row-stacked
    return block.flatten(order="C" if lower else "F")


def _seg_matrix(v: np.ndarray, shape: tuple[int, int], lower: bool) -> np.ndarray:
    return v.reshape(shape, order="C" if lower else "F")


def vec_pi(a: np.ndarray, p: BlockPartition) -> np.ndarray:
    """Stack all off-diagonal blocks of a into the length-2K vector."""
    a = np.asarray(a, dtype=np.complex128)
    if a.shape != (p.n, p.n):
        raise ValueError(f"matrix shape {a.shape} does not match partition n={p.n}")
    ix = VecIndexer.build(p)
    out = np.zeros(ix.length, dtype=np.complex128)
    for i in range(1, p.m + 1):
        for j in range(1, p.m + 1):
            if i == j:
                continue
            block = a[p.block_slice(i), p.block_slice(j)]
            out[ix.segment(i, j)] = _seg_vector(block, lower=i > j)
    return out


def vec0_inverse(v: np.ndarray, p: BlockPartition) -> np.ndarray:
    """Inverse of vec_pi onto matrices with zero diagonal blocks."""
    ix = VecIndexer.build(p)
    v = np.asarray(v, dtype=np.complex128)
    if v.shape != (ix.length,):
        raise ValueError(f"vector length {v.shape} != {ix.length}")
    out = np.zeros((p.n, p.n), dtype=np.complex128)
    for i in range(1, p.m + 1):
        for j in range(1, p.m + 1):
            if i == j:
                continue
            seg = v[ix.segment(i, j)]
            out[p.block_slice(i), p.block_slice(j)] = _seg_matrix(
                seg, (p.size(i), p.size(j)), lower=i > j
            )
    return out


@dataclass(frozen=True)
class AnnihilatorMatrix:
    entries: np.ndarray
    i: int
    j: int
    pivot_submatrix: np.ndarray


def _zero_pivot_blocks(a: np.ndarray, p: BlockPartition, i: int, j: int) -> np.ndarray:
    out = np.array(a, copy=True)
    out[p.block_slice(i), p.block_slice(j)] = 0.0
    out[p.block_slice(j), p.block_slice(i)] = 0.0
    return out


def _check_dense_ok(p: BlockPartition):
    if p.n > DENSE_DIM_LIMIT:
        raise ValueError(
            f"dense annihilators are limited to n <= {DENSE_DIM_LIMIT}; "
            "use apply_annihilator for larger sizes"
        )


def _pivot_transform(p: BlockPartition, i: int, j: int, u_hat: np.ndarray) -> ElementaryBlockTransform:
    return ElementaryBlockTransform(i, j, np.asarray(u_hat, dtype=np.complex128),
                                    p.size(i), kind="unitary")


def apply_annihilator(p: BlockPartition, i: int, j: int, u_hat: np.ndarray,
                      v: np.ndarray) -> np.ndarray:
    """Matrix-free application: unstack, transform, zero the pivot blocks,
    restack."""
    t = _pivot_transform(p, i, j, u_hat)
    a = vec0_inverse(v, p)
    a2 = apply_similarity_raw(a, p, t)
    return vec_pi(_zero_pivot_blocks(a2, p, i, j), p)


def build_annihilator_oracle(p: BlockPartition, i: int, j: int, u_hat: np.ndarray) -> AnnihilatorMatrix:
    """Column-by-column assembly straight from the definition."""
    _check_dense_ok(p)
    ix = VecIndexer.build(p)
    t = _pivot_transform(p, i, j, u_hat)
    cols = np.zeros((ix.length, ix.length), dtype=np.complex128)
    eye = np.eye(ix.length, dtype=np.complex128)
    for col in range(ix.length):
        a = vec0_inverse(eye[:, col], p)
        a2 = apply_similarity_raw(a, p, t)
        cols[:, col] = vec_pi(_zero_pivot_blocks(a2, p, i, j), p)
    return AnnihilatorMatrix(cols, i, j, t.pivot_submatrix)


def _vec_perm(rows: int, cols: int) -> np.ndarray:
    """Index map with vec_row(X)[a] = vec_col(X)[perm[a]] for X rows x cols."""
    a = np.arange(rows * cols)
    return (a % cols) * rows + a // cols


def _block_map(left: np.ndarray, right: np.ndarray, in_shape: tuple[int, int],
               in_lower: bool, out_lower: bool) -> np.ndarray:
    """Matrix of X -> left @ X @ right between stacked segments.

    Segments store vec_col for upper blocks and vec_row for lower ones, so
    the Kronecker core (right^T kron left) picks up a perfect-shuffle row or
    column reindexing for row-stacked ends.
    """
    p, q = in_shape
    out_shape = (left.shape[0], right.shape[1])
    core = np.kron(right.T, left)
    rows = _vec_perm(*out_shape) if out_lower else np.arange(core.shape[0])
    cols = _vec_perm(p, q) if in_lower else np.arange(core.shape[1])
    return core[np.ix_(rows, cols)]


def build_annihilator_structured(p: BlockPartition, i: int, j: int,
                                 u_hat: np.ndarray) -> AnnihilatorMatrix:
    """Direct assembly from the Kronecker block structure: identity outside
    the pivot row/column couplings, zero on the pivot segments, and for every
    other block index r a unitary 2x2-block coupling built from the pivot
    submatrix blocks."""
    _check_dense_ok(p)
    t = _pivot_transform(p, i, j, u_hat)
    ix = VecIndexer.build(p)
    m = p.m
    ni, nj = p.size(i), p.size(j)
    u_ii, u_ij = t.block(0, 0), t.block(0, 1)
    u_ji, u_jj = t.block(1, 0), t.block(1, 1)
    out = np.eye(ix.length, dtype=np.complex128)
    out[ix.segment(i, j), ix.segment(i, j)] = 0.0
    out[ix.segment(j, i), ix.segment(j, i)] = 0.0
    eyes = {s: np.eye(s, dtype=np.complex128) for s in set(p.sizes)}
    for r in range(1, m + 1):
        if r in (i, j):
            continue
        nr = p.size(r)
        idr = eyes[nr]
        # blocks (r, i), (r, j): right-multiplication by the pivot blocks
        for (oi, oy), (ii_, iy), upart in (
            ((r, i), (r, i), u_ii), ((r, i), (r, j), u_ji),
            ((r, j), (r, i), u_ij), ((r, j), (r, j), u_jj),
        ):
            out[ix.segment(*((oi, oy))), ix.segment(*((ii_, iy)))] = _block_map(
                idr, upart, (nr, p.size(iy)), in_lower=ii_ > iy, out_lower=oi > oy
            )
        # blocks (i, r), (j, r): left-multiplication by the conjugated blocks
        for (oi, oy), (ii_, iy), upart in (
            ((i, r), (i, r), u_ii), ((i, r), (j, r), u_ji),
            ((j, r), (i, r), u_ij), ((j, r), (j, r), u_jj),
        ):
            out[ix.segment(*((oi, oy))), ix.segment(*((ii_, iy)))] = _block_map(
                upart.conj().T, idr, (p.size(ii_), nr), in_lower=ii_ > iy, out_lower=oi > oy
            )
    return AnnihilatorMatrix(out, i, j, t.pivot_submatrix)


def build_operator(p: BlockPartition, ordering: PivotOrdering, transforms) -> np.ndarray:
    """Product of the cycle's annihilators, rightmost factor acting first."""
    transforms = list(transforms)
    if len(transforms) != len(ordering.pairs):
        raise ValueError(
            f"need {len(ordering.pairs)} transforms, got {len(transforms)}"
        )
    ix = VecIndexer.build(p)
    out = np.eye(ix.length, dtype=np.complex128)
    for (i, j), u_hat in zip(ordering.pairs, transforms):
        r = build_annihilator_structured(p, i, j, u_hat)
        out = r.entries @ out
    return out


def spectral_norm(a: np.ndarray, tol: float = 1e-12, max_iter: int = 10000,
                  seed: int = 0) -> float:
    """Largest singular value by power iteration on A* A."""
    a = np.asarray(a)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(a.shape[1]) + 1j * rng.standard_normal(a.shape[1])
    nv = np.linalg.norm(v)
    if nv == 0 or a.shape[0] == 0:
        return 0.0
    v /= nv
    prev = 0.0
    est = 0.0
    for _ in range(max_iter):
        w = a.conj().T @ (a @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        est = nw  # rayleigh quotient of A*A since ||v|| = 1
        v = w / nw
        if abs(est - prev) <= tol * max(est, 1e-300):
            break
        prev = est
    return float(np.sqrt(est))


def _random_unitary(dim: int, rng) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def empirical_mu(p: BlockPartition, ordering: PivotOrdering, rho: float = 1.0,
                 trials: int = 10, seed: int = 0) -> float:
    """Max over trials of the spectral norm of d+1 chained cycle operators
    built from UBC-enforced random unitary transforms, d the ordering's
    tracked shift count."""
    if trials < 1:
        raise ValueError("need trials >= 1")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed))
    ix = VecIndexer.build(p)
    d = ordering.shift_count_d
    worst = 0.0
    for trial in range(trials):
        chained = np.eye(ix.length, dtype=np.complex128)
        for _ in range(d + 1):
            transforms = []
            for (i, j) in ordering.pairs:
                dim = p.size(i) + p.size(j)
                t = ElementaryBlockTransform(i, j, _random_unitary(dim, rng), p.size(i))
                transforms.append(enforce_ubc(t, rho=rho, use_attr_R=False).pivot_submatrix)
            chained = build_operator(p, ordering, transforms) @ chained
        worst = max(worst, spectral_norm(chained, seed=seed + trial + 1))
    return worst
