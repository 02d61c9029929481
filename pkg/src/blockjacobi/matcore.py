"""Block partitions, dense complex Hermitian containers, off-norms and
elementary block transforms.

Block indices are 1-based throughout (blocks 1..m), matching the usual
pivot-pair notation (r, s) with r < s.  Entry indices are plain 0-based
numpy indices.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

__all__ = [
    "PartitionError",
    "DimensionError",
    "BlockPartition",
    "make_partition",
    "PartitionedHermitian",
    "ElementaryBlockTransform",
    "off_norm",
    "block_off_norm",
    "embed_transform",
    "apply_similarity",
    "apply_similarity_raw",
    "write_matrix_text",
    "read_matrix_text",
]


class PartitionError(ValueError):
    pass


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class BlockPartition:
    """Integer partition (n_1, ..., n_m) of n with precomputed block offsets."""

    sizes: tuple[int, ...]
    offsets: tuple[int, ...]
    n: int
    m: int

    def size(self, r: int) -> int:
        return self.sizes[r - 1]

    def span(self, r: int) -> tuple[int, int]:
        """Half-open index range [start, stop) of block r (1-based)."""
        start = self.offsets[r - 1]
        return start, start + self.sizes[r - 1]

    def block_slice(self, r: int) -> slice:
        start, stop = self.span(r)
        return slice(start, stop)

    def pair_indices(self, i: int, j: int) -> np.ndarray:
        """Row/column indices covered by blocks i and j, concatenated."""
        si, ei = self.span(i)
        sj, ej = self.span(j)
        return np.concatenate([np.arange(si, ei), np.arange(sj, ej)])


def make_partition(sizes) -> BlockPartition:
    """Build a BlockPartition from a sequence of positive block sizes."""
    sizes = tuple(int(s) for s in sizes)
    if not sizes:
        raise PartitionError("partition needs at least one block")
    if any(s < 1 for s in sizes):
        raise PartitionError(f"block sizes must be >= 1, got {sizes}")
    offsets = (0,) + tuple(np.cumsum(sizes[:-1]).tolist())
    return BlockPartition(sizes=sizes, offsets=offsets, n=sum(sizes), m=len(sizes))


def _as_square_array(a) -> np.ndarray:
    arr = np.asarray(a.entries if isinstance(a, PartitionedHermitian) else a)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def off_norm(a) -> float:
    """Frobenius norm of A minus its diagonal."""
    arr = _as_square_array(a)
    b = arr.copy()
    np.fill_diagonal(b, 0.0)
    return float(np.linalg.norm(b))


def block_off_norm(a, partition: BlockPartition | None = None) -> float:
    """Frobenius norm of A with all diagonal blocks zeroed."""
    if isinstance(a, PartitionedHermitian):
        arr, p = a.entries, a.partition
    else:
        arr, p = _as_square_array(a), partition
    if p is None:
        raise PartitionError("block_off_norm needs a partition")
    b = np.array(arr, copy=True)
    for r in range(1, p.m + 1):
        sl = p.block_slice(r)
        b[sl, sl] = 0.0
    return float(np.linalg.norm(b))


@dataclass(frozen=True)
class PartitionedHermitian:
    """Dense complex Hermitian matrix bound to a block partition.

    The constructor symmetrizes via (A + A*)/2, so the stored entries are
    exactly Hermitian.
    """

    entries: np.ndarray
    partition: BlockPartition

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
        if arr.shape[0] != self.partition.n:
            raise DimensionError(
                f"matrix dimension {arr.shape[0]} != partition total {self.partition.n}"
            )
        object.__setattr__(self, "entries", (arr + arr.conj().T) / 2.0)

    @property
    def n(self) -> int:
        return self.partition.n

    def block(self, r: int, s: int) -> np.ndarray:
        return self.entries[self.partition.block_slice(r), self.partition.block_slice(s)]

    def pivot_submatrix(self, i: int, j: int) -> np.ndarray:
        idx = self.partition.pair_indices(i, j)
        return self.entries[np.ix_(idx, idx)]


_TRANSFORM_KINDS = ("unitary", "j_unitary", "general")


@dataclass(frozen=True)
class ElementaryBlockTransform:
    """Pivot pair (i, j) plus the (n_i+n_j)-dimensional pivot submatrix of an
    elementary block matrix.  `split` is n_i, the row count of block i inside
    the pivot submatrix."""

    i: int
    j: int
    pivot_submatrix: np.ndarray
    split: int
    kind: str = "unitary"

    def __post_init__(self):
        if not 1 <= self.i < self.j:
            raise DimensionError(f"need 1 <= i < j, got ({self.i}, {self.j})")
        if self.kind not in _TRANSFORM_KINDS:
            raise ValueError(f"unknown transform kind {self.kind!r}")
        mat = np.asarray(self.pivot_submatrix, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionError("pivot submatrix must be square")
        d = mat.shape[0]
        if not 1 <= self.split < d:
            raise DimensionError(f"split {self.split} out of range for dimension {d}")
        object.__setattr__(self, "pivot_submatrix", mat)
        if self.kind == "unitary":
            resid = np.linalg.norm(mat.conj().T @ mat - np.eye(d))
            if resid > 1e-13 * d:
                raise ValueError(f"pivot submatrix not unitary, residual {resid:.3e}")
        elif self.kind == "j_unitary":
            jhat = np.diag(np.concatenate([np.ones(self.split), -np.ones(d - self.split)]))
            resid = np.linalg.norm(mat.conj().T @ jhat @ mat - jhat)
            if resid > 1e-12 * d * max(1.0, np.linalg.norm(mat) ** 2):
                raise ValueError(f"pivot submatrix not J-unitary, residual {resid:.3e}")

    @property
    def dim(self) -> int:
        return self.pivot_submatrix.shape[0]

    def block(self, a: int, b: int) -> np.ndarray:
        """Sub-blocks of the pivot submatrix; a, b in {0, 1} select (i, j)."""
        k = self.split
        rows = slice(0, k) if a == 0 else slice(k, self.dim)
        cols = slice(0, k) if b == 0 else slice(k, self.dim)
        return self.pivot_submatrix[rows, cols]


def embed_transform(t: ElementaryBlockTransform, p: BlockPartition) -> np.ndarray:
    """Embed the pivot submatrix into the identity I_n at blocks (i, j)."""
    if t.j > p.m:
        raise DimensionError(f"pivot index {t.j} exceeds block count {p.m}")
    ni, nj = p.size(t.i), p.size(t.j)
    if t.dim != ni + nj or t.split != ni:
        raise DimensionError(
            f"pivot submatrix of dim {t.dim}/split {t.split} does not match "
            f"blocks of sizes ({ni}, {nj})"
        )
    out = np.eye(p.n, dtype=np.complex128)
    idx = p.pair_indices(t.i, t.j)
    out[np.ix_(idx, idx)] = t.pivot_submatrix
    return out


def apply_similarity_raw(a: np.ndarray, p: BlockPartition, t: ElementaryBlockTransform) -> np.ndarray:
    """T* A T for the embedded transform, touching only block rows/columns
    i and j.  Returns a new array; no symmetrization."""
    ni, nj = p.size(t.i), p.size(t.j)
    if t.dim != ni + nj or t.split != ni:
        raise DimensionError("transform does not match the partition blocks")
    if a.shape != (p.n, p.n):
        raise DimensionError("matrix does not match the partition")
    idx = p.pair_indices(t.i, t.j)
    u = t.pivot_submatrix
    out = np.array(a, dtype=np.complex128, copy=True)
    out[:, idx] = out[:, idx] @ u
    out[idx, :] = u.conj().T @ out[idx, :]
    return out


def apply_similarity(a: PartitionedHermitian, t: ElementaryBlockTransform) -> PartitionedHermitian:
    """T* A T on a Hermitian matrix; the result is re-symmetrized."""
    out = apply_similarity_raw(a.entries, a.partition, t)
    return PartitionedHermitian(out, a.partition)


def _format_complex(z: complex) -> str:
    return f"{z.real:.17g}:{z.imag:.17g}"


def _parse_complex(tok: str) -> complex:
    re_s, im_s = tok.split(":")
    return complex(float(re_s), float(im_s))


def write_matrix_text(path, a, partition: BlockPartition | None = None) -> None:
    """Matrix text format: "n m" line, partition sizes line, then n rows of
    n "re:im" entries."""
    if isinstance(a, PartitionedHermitian):
        arr, p = a.entries, a.partition
    else:
        arr, p = np.asarray(a, dtype=np.complex128), partition
    if p is None:
        raise PartitionError("write_matrix_text needs a partition")
    if arr.shape != (p.n, p.n):
        raise DimensionError("matrix does not match the partition")
    with open(path, "w") as fh:
        fh.write(f"{p.n} {p.m}\n")
        fh.write(" ".join(str(s) for s in p.sizes) + "\n")
        for row in arr:
            fh.write(" ".join(_format_complex(z) for z in row) + "\n")


def read_matrix_text(path) -> tuple[BlockPartition, np.ndarray]:
    """Read the matrix text format; returns the partition and the raw
    (unsymmetrized) complex array."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if len(lines) < 2:
        raise ValueError(f"{path}: truncated matrix file")
    n, m = (int(tok) for tok in lines[0].split())
    sizes = [int(tok) for tok in lines[1].split()]
    if len(sizes) != m or sum(sizes) != n:
        raise PartitionError(f"{path}: partition line does not match header")
    p = make_partition(sizes)
    if len(lines) != 2 + n:
        raise ValueError(f"{path}: expected {n} matrix rows, found {len(lines) - 2}")
    rows = []
    for ln in lines[2:]:
        row = [_parse_complex(tok) for tok in ln.split()]
        if len(row) != n:
            raise ValueError(f"{path}: row with {len(row)} entries, expected {n}")
        rows.append(row)
    return p, np.array(rows, dtype=np.complex128)
