"""Block Jacobi drivers: preprocessing, the UBC-enforced block step, and the
Hermitian / normal / J-Hermitian solvers plus the perturbed-process variant.

Each block step diagonalizes the pivot submatrix with an element-wise core,
sorts the local eigenvalues (descending; within each signature side for
hyperbolic steps), applies the column-pivoting permutation that enforces the
uniform singular-value bound on the diagonal blocks, and updates only the two
affected block rows/columns.  The transformed pivot submatrix is written back
from the core's output rather than recomputed, which is what preserves the
relative accuracy of graded matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .matcore import (
    BlockPartition,
    ElementaryBlockTransform,
    PartitionedHermitian,
    off_norm,
)
from .pivot import PivotOrdering, random_generalized_serial
from .rotations import _scaled_ok, elementwise_jacobi, elementwise_j_jacobi
from .ubc import check_ubc_bound, pivoting_permutation

__all__ = [
    "SolverConfig",
    "ConvergenceTrace",
    "SolveResult",
    "PerturbationSpec",
    "CoreConvergenceError",
    "preprocess_diagonal_blocks",
    "block_step",
    "solve_hermitian",
    "solve_normal",
    "solve_j_hermitian",
    "solve_perturbed",
]


class CoreConvergenceError(RuntimeError):
    """Element-wise core failed on a pivot submatrix; carries a snapshot."""

    def __init__(self, message: str, submatrix: np.ndarray):
        super().__init__(message)
        self.submatrix = submatrix


@dataclass(frozen=True)
class SolverConfig:
    ordering: PivotOrdering | None = None
    rho: float = 1.0
    tol: float = 1e-13
    max_cycles: int = 30
    use_attr_R: bool = True
    preprocess: bool = True
    core: str = "random_serial"  # or "classical"
    seed: int = 0
    core_tol: float = 1e-14
    core_max_sweeps: int = 60
    # scaled stopping (max |a_rs|/sqrt(a_rr a_ss)) for positive definite
    # inputs; None keeps the plain off-norm criteria.  Needed to reach full
    # relative accuracy on graded matrices.
    scaled_tol: float | None = None
    core_scaled_tol: float | None = None

    def __post_init__(self):
        if not 0.0 < self.rho <= 1.0:
            raise ValueError(f"rho must be in (0, 1], got {self.rho}")
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")
        if self.max_cycles < 1:
            raise ValueError("max_cycles must be >= 1")
        if self.core not in ("random_serial", "classical"):
            raise ValueError(f"unknown core {self.core!r}")


@dataclass
class ConvergenceTrace:
    per_step_off: list[float] = field(default_factory=list)
    per_cycle_off: list[float] = field(default_factory=list)
    cycles_used: int = 0
    converged: bool = False
    per_step_drop: list[float] = field(default_factory=list)
    block_sizes: tuple[int, ...] = ()
    strategy_d: int = 0
    seed: int = 0
    commutation_residuals: list[float] | None = None
    limcrs_max: list[float] | None = None
    j_unitarity_residuals: list[float] | None = None
    fro_norms: list[float] | None = None


@dataclass
class SolveResult:
    eigenvalues: np.ndarray
    transform: np.ndarray
    trace: ConvergenceTrace
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class PerturbationSpec:
    """Seeded Hermitian step perturbations; `scale` is relative to ||A||_F.
    mode: full | zero_diag_blocks | diag_blocks_only."""

    seed: int = 0
    scale: float = 1e-2
    mode: str = "full"

    def __post_init__(self):
        if self.mode not in ("full", "zero_diag_blocks", "diag_blocks_only"):
            raise ValueError(f"unknown perturbation mode {self.mode!r}")


def _core_seed_stream(seed: int):
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0xC0,)))
    while True:
        yield int(rng.integers(0, 2**63 - 1))


def _run_core(sub: np.ndarray, config: SolverConfig, core_seed: int):
    ordering = "classical" if config.core == "classical" else None
    lam, u, trace = elementwise_jacobi(
        sub, ordering, tol=config.core_tol, max_sweeps=config.core_max_sweeps,
        seed=core_seed, scaled_tol=config.core_scaled_tol,
    )
    if not trace.converged:
        raise CoreConvergenceError("element-wise core did not converge on pivot submatrix", sub)
    return lam, u, trace.final_matrix


def _run_core_j(sub: np.ndarray, nu_local: int, config: SolverConfig, core_seed: int):
    ordering = "classical" if config.core == "classical" else None
    lam, t, trace = elementwise_j_jacobi(
        sub, nu_local, ordering, tol=config.core_tol, max_sweeps=config.core_max_sweeps,
        seed=core_seed, scaled_tol=config.core_scaled_tol,
    )
    if not trace.converged:
        raise CoreConvergenceError("J-Jacobi core did not converge on pivot submatrix", sub)
    return lam, t, trace.final_matrix


def _pivot_drop(a: np.ndarray, p: BlockPartition, i: int, j: int) -> float:
    """Off-norm-squared contribution removed by diagonalizing pivot (i, j)."""
    aij = a[p.block_slice(i), p.block_slice(j)]
    return (
        2.0 * float(np.linalg.norm(aij)) ** 2
        + off_norm(a[p.block_slice(i), p.block_slice(i)]) ** 2
        + off_norm(a[p.block_slice(j), p.block_slice(j)]) ** 2
    )


def _strip_similarity(a: np.ndarray, idx: np.ndarray, u: np.ndarray) -> None:
    """In-place U* A U on the block rows/columns selected by idx."""
    a[:, idx] = a[:, idx] @ u
    a[idx, :] = u.conj().T @ a[idx, :]


def _hermitize(a: np.ndarray) -> None:
    a += a.conj().T
    a *= 0.5


def _hermitize_strips(a: np.ndarray, idx: np.ndarray) -> None:
    """Re-symmetrize only the block rows/columns touched by a step."""
    a[:, idx] = (a[:, idx] + a[idx, :].conj().T) / 2.0
    a[idx, :] = a[:, idx].conj().T


def _sorted_ubc_transform(i: int, j: int, ni: int, u: np.ndarray, final: np.ndarray,
                          config: SolverConfig, rho: float):
    """Sort the diagonalized pivot descending, then apply the UBC pivoting
    permutation; the transformed pivot submatrix is permuted alongside."""
    order = np.argsort(-np.diagonal(final).real, kind="stable")
    u = u[:, order]
    final = final[np.ix_(order, order)]
    swaps, guaranteed = pivoting_permutation(u, ni, config.use_attr_R)
    perm = swaps.permutation_indices()
    u = u[:, perm]
    final = final[np.ix_(perm, perm)]
    t = ElementaryBlockTransform(i, j, u, ni, kind="unitary")
    if guaranteed:
        check_ubc_bound(t, rho)
    return t, final


def _block_step_raw(a: np.ndarray, p: BlockPartition, i: int, j: int,
                    config: SolverConfig, core_seed: int):
    """One Hermitian block step on the raw array; returns the transform."""
    idx = p.pair_indices(i, j)
    sub = a[np.ix_(idx, idx)]
    lam, u, final = _run_core(sub, config, core_seed)
    t, final = _sorted_ubc_transform(i, j, p.size(i), u, final, config, config.rho)
    _strip_similarity(a, idx, t.pivot_submatrix)
    a[np.ix_(idx, idx)] = final
    _hermitize_strips(a, idx)
    return t


def block_step(a: PartitionedHermitian, pair: tuple[int, int], config: SolverConfig):
    """One UBC-enforced block Jacobi step; returns (A', transform)."""
    i, j = pair
    out = a.entries.copy()
    t = _block_step_raw(out, a.partition, i, j, config, core_seed=config.seed)
    return PartitionedHermitian(out, a.partition), t


def preprocess_diagonal_blocks(a: PartitionedHermitian, tol: float = 1e-14,
                               max_sweeps: int = 60, seed: int = 0):
    """Diagonalize every diagonal block; returns (A0, block-diagonal U0)."""
    p = a.partition
    out = a.entries.copy()
    u0 = np.eye(p.n, dtype=np.complex128)
    blocks = []
    seeds = _core_seed_stream(seed)
    for r in range(1, p.m + 1):
        sl = p.block_slice(r)
        if p.size(r) == 1:
            blocks.append(None)
            continue
        sub = out[sl, sl]
        lam, u, trace = elementwise_jacobi(sub, None, tol=tol, max_sweeps=max_sweeps,
                                           seed=next(seeds))
        if not trace.converged:
            raise CoreConvergenceError("preprocessing core did not converge", sub)
        order = np.argsort(-np.diagonal(trace.final_matrix).real, kind="stable")
        blocks.append((sl, u[:, order], trace.final_matrix[np.ix_(order, order)]))
    for item in blocks:
        if item is None:
            continue
        sl, u, _ = item
        out[:, sl] = out[:, sl] @ u
        u0[sl, sl] = u
    for item in blocks:
        if item is None:
            continue
        sl, u, final = item
        out[sl, :] = u.conj().T @ out[sl, :]
    for item in blocks:
        if item is None:
            continue
        sl, _, final = item
        out[sl, sl] = final
    _hermitize(out)
    return PartitionedHermitian(out, p), u0


def _resolve_ordering(p: BlockPartition, config: SolverConfig) -> PivotOrdering | None:
    if config.ordering is not None:
        if config.ordering.m != p.m:
            raise ValueError(
                f"ordering over m={config.ordering.m} does not match partition m={p.m}"
            )
        return config.ordering
    if p.m == 1:
        # single-block partition: no pivot pairs, preprocessing does all work
        return None
    return random_generalized_serial(p.m, seed=config.seed)


def _perturbation_stream(pert: PerturbationSpec, p: BlockPartition, scale_abs: float):
    rng = np.random.default_rng(np.random.SeedSequence(entropy=pert.seed))

    def draw() -> np.ndarray:
        h = rng.standard_normal((p.n, p.n)) + 1j * rng.standard_normal((p.n, p.n))
        h = (h + h.conj().T) / 2.0
        if pert.mode == "diag_blocks_only":
            masked = np.zeros_like(h)
            for r in range(1, p.m + 1):
                sl = p.block_slice(r)
                masked[sl, sl] = h[sl, sl]
            h = masked
        elif pert.mode == "zero_diag_blocks":
            for r in range(1, p.m + 1):
                sl = p.block_slice(r)
                h[sl, sl] = 0.0
        nrm = float(np.linalg.norm(h))
        return (scale_abs / nrm) * h if nrm > 0 else h

    return draw


def _solve_hermitian_impl(a0: PartitionedHermitian, config: SolverConfig,
                          perturbation: PerturbationSpec | None = None,
                          decay: float = 0.0) -> SolveResult:
    p = a0.partition
    normf = float(np.linalg.norm(a0.entries))
    trace = ConvergenceTrace(block_sizes=p.sizes, seed=config.seed)
    a = a0.entries.copy()
    u_total = np.eye(p.n, dtype=np.complex128)
    if config.preprocess:
        pre, u0 = preprocess_diagonal_blocks(a0, tol=config.core_tol,
                                             max_sweeps=config.core_max_sweeps,
                                             seed=config.seed)
        a = pre.entries.copy()
        u_total = u0
    ordering = _resolve_ordering(p, config)
    pairs = ordering.pairs if ordering is not None else ()
    trace.strategy_d = ordering.shift_count_d if ordering is not None else 0
    seeds = _core_seed_stream(config.seed + 1)
    perturb = None
    if perturbation is not None and decay != 0.0:
        perturb = _perturbation_stream(perturbation, p, perturbation.scale * normf)
    threshold = config.tol * normf
    current = off_norm(a)
    trace.per_cycle_off.append(current)
    step_k = 0
    for _ in range(config.max_cycles):
        if current <= threshold and _scaled_ok(a, config.scaled_tol):
            trace.converged = True
            break
        if not pairs:
            break
        for (i, j) in pairs:
            trace.per_step_drop.append(_pivot_drop(a, p, i, j))
            t = _block_step_raw(a, p, i, j, config, core_seed=next(seeds))
            idx = p.pair_indices(i, j)
            u_total[:, idx] = u_total[:, idx] @ t.pivot_submatrix
            if perturb is not None:
                a += (decay ** step_k) * perturb()
            step_k += 1
            trace.per_step_off.append(off_norm(a))
        trace.cycles_used += 1
        current = trace.per_step_off[-1]
        trace.per_cycle_off.append(current)
    else:
        trace.converged = current <= threshold and _scaled_ok(a, config.scaled_tol)
    if not trace.per_step_off:
        trace.converged = current <= threshold and _scaled_ok(a, config.scaled_tol)
    return SolveResult(np.diagonal(a).real.copy(), u_total, trace)


def solve_hermitian(a: PartitionedHermitian, config: SolverConfig) -> SolveResult:
    """Cyclic block Jacobi diagonalization of a Hermitian matrix."""
    return _solve_hermitian_impl(a, config)


def solve_perturbed(a: PartitionedHermitian, config: SolverConfig,
                    perturbation: PerturbationSpec, decay: float) -> SolveResult:
    """Hermitian block process with an additive step perturbation
    decay^k * E_k.  decay = 0 reproduces solve_hermitian exactly."""
    if not 0.0 <= decay < 1.0:
        raise ValueError("decay must be in [0, 1)")
    return _solve_hermitian_impl(a, config, perturbation=perturbation, decay=decay)


def _gap_clustered(values: np.ndarray) -> bool:
    v = np.sort(values)
    spread = float(v[-1] - v[0])
    if spread == 0.0:
        return True
    return bool(np.min(np.diff(v)) < 1e-8 * spread)


def solve_normal(a: np.ndarray, partition: BlockPartition, config: SolverConfig,
                 driver: str = "auto") -> SolveResult:
    """Block Jacobi eigensolver for a normal matrix via its Hermitian /
    skew-Hermitian split A = B + iC.

    Each step diagonalizes the pivot submatrix of the driver part (B for
    "hermitian_part", C for "skew_part") and applies the unitary similarity
    to both parts; the eigenvalues are diag(B) + i diag(C) in the limit.
    """
    a = np.asarray(a, dtype=np.complex128)
    p = partition
    if a.shape != (p.n, p.n):
        raise ValueError("matrix does not match the partition")
    if driver not in ("auto", "hermitian_part", "skew_part"):
        raise ValueError(f"unknown driver {driver!r}")
    norm_a = float(np.linalg.norm(a))
    comm = float(np.linalg.norm(a.conj().T @ a - a @ a.conj().T))
    if comm > 1e-12 * norm_a**2:
        raise ValueError(
            f"matrix is not normal: ||A*A - AA*|| = {comm:.3e} > 1e-12 ||A||^2"
        )
    b = (a + a.conj().T) / 2.0
    c = (a.conj().T - a) * 1j / 2.0
    warnings: list[str] = []
    b_clustered = _gap_clustered(np.linalg.eigvalsh(b))
    c_clustered = _gap_clustered(np.linalg.eigvalsh(c))
    if driver == "auto":
        driver = "hermitian_part"
        if b_clustered and not c_clustered:
            driver = "skew_part"
            warnings.append("hermitian part has clustered eigenvalues; driving with skew part")
    drv_clustered = b_clustered if driver == "hermitian_part" else c_clustered
    if drv_clustered:
        warnings.append(
            "driver part has clustered eigenvalues; convergence is not guaranteed"
        )
    if driver == "skew_part":
        b, c = c, b  # iterate with the driver first; swap back at the end
    trace = ConvergenceTrace(block_sizes=p.sizes, seed=config.seed,
                             commutation_residuals=[], limcrs_max=[])
    u_total = np.eye(p.n, dtype=np.complex128)

    # preprocess the driver's diagonal blocks, applied to both parts
    seeds = _core_seed_stream(config.seed + 2)
    if config.preprocess:
        pre, u0 = preprocess_diagonal_blocks(
            PartitionedHermitian(b, p), tol=config.core_tol,
            max_sweeps=config.core_max_sweeps, seed=config.seed,
        )
        b = pre.entries.copy()
        for r in range(1, p.m + 1):
            sl = p.block_slice(r)
            c[:, sl] = c[:, sl] @ u0[sl, sl]
        for r in range(1, p.m + 1):
            sl = p.block_slice(r)
            c[sl, :] = u0[sl, sl].conj().T @ c[sl, :]
        _hermitize(c)
        u_total = u0

    ordering = _resolve_ordering(p, config)
    pairs = ordering.pairs if ordering is not None else ()
    trace.strategy_d = ordering.shift_count_d if ordering is not None else 0

    def off_total() -> float:
        return float(np.hypot(off_norm(b), off_norm(c)))

    def record_diagnostics():
        trace.commutation_residuals.append(
            float(np.linalg.norm(b @ c - c @ b)) / norm_a**2
        )
        beta = np.diagonal(b).real
        gaps = beta[:, None] - beta[None, :]
        trace.limcrs_max.append(float(np.max(np.abs(c * gaps))))

    threshold = config.tol * norm_a
    current = off_total()
    trace.per_cycle_off.append(current)
    record_diagnostics()
    for _ in range(config.max_cycles):
        if current <= threshold:
            trace.converged = True
            break
        if not pairs:
            break
        for (i, j) in pairs:
            idx = p.pair_indices(i, j)
            sub = b[np.ix_(idx, idx)]
            lam, u, final = _run_core(sub, config, next(seeds))
            t, final = _sorted_ubc_transform(i, j, p.size(i), u, final, config, config.rho)
            _strip_similarity(b, idx, t.pivot_submatrix)
            b[np.ix_(idx, idx)] = final
            _hermitize_strips(b, idx)
            _strip_similarity(c, idx, t.pivot_submatrix)
            _hermitize_strips(c, idx)
            u_total[:, idx] = u_total[:, idx] @ t.pivot_submatrix
            trace.per_step_off.append(off_total())
        trace.cycles_used += 1
        current = trace.per_step_off[-1]
        trace.per_cycle_off.append(current)
        record_diagnostics()
    else:
        trace.converged = current <= threshold
    if driver == "skew_part":
        b, c = c, b
    lam = np.diagonal(b).real + 1j * np.diagonal(c).real
    return SolveResult(lam, u_total, trace, warnings=tuple(warnings))


def solve_j_hermitian(a: PartitionedHermitian, nu: int, config: SolverConfig) -> SolveResult:
    """Block J-Jacobi for the pencil (A, J), A Hermitian positive definite,
    J = diag(I_nu, -I_{n-nu}); the partition must split at nu.

    Unitary block steps act within a signature side (UBC-enforced with
    rho = 1), hyperbolic block steps across it; the accumulated transform is
    J-unitary and the pencil eigenvalues are J * diag of the limit.
    """
    p = a.partition
    boundary = [k for k in range(1, p.m + 1) if sum(p.sizes[:k]) == nu]
    if not boundary:
        raise ValueError(
            f"partition {p.sizes} is not a subpartition of ({nu}, {p.n - nu})"
        )
    split_block = boundary[0]
    sign = np.concatenate([np.ones(nu), -np.ones(p.n - nu)])
    trace = ConvergenceTrace(block_sizes=p.sizes, seed=config.seed,
                             j_unitarity_residuals=[], fro_norms=[])
    a_mat = a.entries.copy()
    t_total = np.eye(p.n, dtype=np.complex128)
    seeds = _core_seed_stream(config.seed + 3)
    if config.preprocess:
        pre, u0 = preprocess_diagonal_blocks(a, tol=config.core_tol,
                                             max_sweeps=config.core_max_sweeps,
                                             seed=config.seed)
        a_mat = pre.entries.copy()
        t_total = u0
    ordering = _resolve_ordering(p, config)
    trace.strategy_d = ordering.shift_count_d

    def record_diagnostics():
        trace.fro_norms.append(float(np.linalg.norm(a_mat)))
        trace.j_unitarity_residuals.append(
            float(np.linalg.norm((t_total.conj().T * sign) @ t_total - np.diag(sign)))
        )

    current = off_norm(a_mat)
    trace.per_cycle_off.append(current)
    record_diagnostics()
    for _ in range(config.max_cycles):
        if (current <= config.tol * float(np.linalg.norm(a_mat))
                and _scaled_ok(a_mat, config.scaled_tol)):
            trace.converged = True
            break
        for (i, j) in ordering.pairs:
            idx = p.pair_indices(i, j)
            ni = p.size(i)
            sub = a_mat[np.ix_(idx, idx)]
            hyperbolic = i <= split_block < j
            if not hyperbolic:
                lam, u, final = _run_core(sub, config, next(seeds))
                t, final = _sorted_ubc_transform(i, j, ni, u, final, config, 1.0)
            else:
                lam, u, final = _run_core_j(sub, ni, config, next(seeds))
                # signature-preserving descending sort within each side
                order = np.concatenate([
                    np.argsort(-np.diagonal(final)[:ni].real, kind="stable"),
                    ni + np.argsort(-np.diagonal(final)[ni:].real, kind="stable"),
                ])
                u = u[:, order]
                final = final[np.ix_(order, order)]
                t = ElementaryBlockTransform(i, j, u, ni, kind="j_unitary")
            _strip_similarity(a_mat, idx, t.pivot_submatrix)
            a_mat[np.ix_(idx, idx)] = final
            _hermitize_strips(a_mat, idx)
            t_total[:, idx] = t_total[:, idx] @ t.pivot_submatrix
            trace.per_step_off.append(off_norm(a_mat))
        trace.cycles_used += 1
        current = trace.per_step_off[-1]
        trace.per_cycle_off.append(current)
        record_diagnostics()
    else:
        trace.converged = (current <= config.tol * float(np.linalg.norm(a_mat))
                           and _scaled_ok(a_mat, config.scaled_tol))
    lam = np.diagonal(a_mat).real.copy()
    return SolveResult(lam, t_total, trace)
