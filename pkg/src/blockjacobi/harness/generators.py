"""Seeded random test-matrix generators."""

from __future__ import annotations

import numpy as np

from ..matcore import BlockPartition, PartitionedHermitian, make_partition

__all__ = [
    "gen_random_hermitian",
    "gen_ill_conditioned",
    "gen_random_normal",
    "gen_spd",
]


def _partition_for(n: int, sizes) -> BlockPartition:
    if sizes is None:
        return make_partition([1] * n)
    p = make_partition(sizes)
    if p.n != n:
        raise ValueError(f"partition totals {p.n}, expected {n}")
    return p


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed))


def _complex_gaussian(rng, n: int) -> np.ndarray:
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def gen_random_hermitian(n: int, seed: int, sizes=None) -> PartitionedHermitian:
    """Standard complex Gaussian entries, symmetrized."""
    if n < 2:
        raise ValueError("need n >= 2")
    g = _complex_gaussian(_rng(seed), n)
    return PartitionedHermitian(g, _partition_for(n, sizes))


def gen_ill_conditioned(n: int, seed: int, cond_exp: float, sizes=None) -> PartitionedHermitian:
    """Graded positive definite A = D M D: M is a well-conditioned shifted
    Gram matrix (kappa <= 100), D has diagonal 10^(-cond_exp*(r-1)/(n-1))."""
    if cond_exp < 0:
        raise ValueError("cond_exp must be >= 0")
    if 10.0 ** (-float(cond_exp)) == 0.0:
        raise ValueError(f"cond_exp {cond_exp} underflows the scaling diagonal")
    rng = _rng(seed)
    g = _complex_gaussian(rng, n)
    h = g.conj().T @ g
    h = (h + h.conj().T) / 2.0
    lam_max = float(np.linalg.eigvalsh(h)[-1])
    m_mat = h + (lam_max / 99.0) * np.eye(n)
    expo = -float(cond_exp) * np.arange(n) / max(n - 1, 1)
    d = 10.0 ** expo
    a = d[:, None] * m_mat * d[None, :]
    return PartitionedHermitian(a, _partition_for(n, sizes))


def gen_random_normal(n: int, seed: int, min_real_gap: float, sizes=None):
    """Normal matrix U diag(lambda) U* with real parts separated by at least
    min_real_gap.  Returns (matrix, partition, lambda)."""
    if min_real_gap <= 0:
        raise ValueError("min_real_gap must be > 0")
    rng = _rng(seed)
    if n == 1:
        lam = np.array([rng.standard_normal() + 1j * rng.standard_normal()])
        return lam.reshape(1, 1).astype(np.complex128), _partition_for(1, sizes), lam
    g = _complex_gaussian(rng, n)
    q, r = np.linalg.qr(g)
    q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    gaps = min_real_gap * (1.0 + rng.uniform(0.0, 1.0, size=n))
    beta = np.cumsum(gaps)
    beta -= beta.mean()
    gamma = rng.standard_normal(n)
    lam = beta + 1j * gamma
    a = (q * lam) @ q.conj().T
    return a, _partition_for(n, sizes), lam


def gen_spd(n: int, nu: int, seed: int, sizes=None) -> tuple[PartitionedHermitian, int]:
    """Positive definite G* G plus a small ridge; nu is passed through as the
    signature split for J-Hermitian solves."""
    if not 1 <= nu < n:
        raise ValueError(f"need 1 <= nu < n, got nu={nu}")
    rng = _rng(seed)
    g = _complex_gaussian(rng, n)
    a = g.conj().T @ g
    ridge = 1e-3 * float(np.trace(a).real) / n
    a = a + ridge * np.eye(n)
    return PartitionedHermitian(a, _partition_for(n, sizes)), nu
