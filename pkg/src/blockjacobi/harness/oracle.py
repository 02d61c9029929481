"""Eigenvalue oracle: element-wise Jacobi in double-double arithmetic.

Hermitian matrices get the classical (largest-pivot) complex Jacobi method;
J-Hermitian pencils (A, diag(I_nu, -I_{n-nu})) with positive definite A get
row-cyclic J-Jacobi with hyperbolic rotations across the signature boundary.
Everything runs on (hi, lo) float64 pairs, giving ~31 significant digits;
the documented accuracy target is 1e-25 relative for well-scaled inputs.

Positive definite inputs additionally iterate until the scaled entries
|a_rs| / sqrt(a_rr a_ss) are below the target, which is what preserves the
relative accuracy of tiny eigenvalues on graded matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ddarith as f

__all__ = ["OracleError", "OracleEigenvalues", "oracle_eigen"]

_ABS_TARGET = 1e-26
_SCALED_TARGET = 1e-26
_MAX_DIM = 256


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleEigenvalues:
    """Sorted eigenvalues as (hi, lo) float64 pairs."""

    hi: np.ndarray
    lo: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return self.hi

    def rel_errors(self, estimates: np.ndarray) -> np.ndarray:
        """|est - oracle| / |oracle| per eigenvalue, both sides sorted."""
        est = np.sort(np.asarray(estimates, dtype=float))
        if est.shape != self.hi.shape:
            raise ValueError("eigenvalue count mismatch")
        err = (est - self.hi) - self.lo
        denom = np.abs(self.hi) + np.abs(self.lo)
        return np.abs(err) / np.where(denom > 0, denom, 1.0)


class _DDHermitian:
    """Hermitian matrix as four float64 arrays (re/im, hi/lo)."""

    def __init__(self, a: np.ndarray):
        a = np.asarray(a, dtype=np.complex128)
        a = (a + a.conj().T) / 2.0
        self.n = a.shape[0]
        self.rh = np.array(a.real, dtype=np.float64)
        self.rl = np.zeros_like(self.rh)
        self.ih = np.array(a.imag, dtype=np.float64)
        self.il = np.zeros_like(self.ih)

    def col(self, k):
        return (self.rh[:, k].copy(), self.rl[:, k].copy()), (
            self.ih[:, k].copy(),
            self.il[:, k].copy(),
        )

    def row(self, k):
        return (self.rh[k, :].copy(), self.rl[k, :].copy()), (
            self.ih[k, :].copy(),
            self.il[k, :].copy(),
        )

    def set_col(self, k, v):
        (self.rh[:, k], self.rl[:, k]), (self.ih[:, k], self.il[:, k]) = v

    def set_row(self, k, v):
        (self.rh[k, :], self.rl[k, :]), (self.ih[k, :], self.il[k, :]) = v

    def scalar(self, p, q):
        return (self.rh[p, q], self.rl[p, q]), (self.ih[p, q], self.il[p, q])

    def set_scalar(self, p, q, re, im):
        self.rh[p, q], self.rl[p, q] = re
        self.ih[p, q], self.il[p, q] = im

    def offdiag_sq(self) -> np.ndarray:
        s = self.rh * self.rh + self.ih * self.ih
        np.fill_diagonal(s, 0.0)
        return s

    def fro(self) -> float:
        return float(np.sqrt(np.sum(self.rh * self.rh + self.ih * self.ih)))


def _cmul(a, x):
    """(complex dd scalar) * (complex dd vector)."""
    are, aim = a
    xre, xim = x
    re = f.sub(f.mul(are, xre), f.mul(aim, xim))
    im = f.add(f.mul(are, xim), f.mul(aim, xre))
    return re, im


def _rmul(a, x):
    """(real dd scalar) * (complex dd vector)."""
    xre, xim = x
    return f.mul(a, xre), f.mul(a, xim)


def _cadd(x, y):
    return f.add(x[0], y[0]), f.add(x[1], y[1])


def _conj(x):
    return x[0], f.neg(x[1])


def _zero_dd():
    z = np.float64(0.0)
    return (z, z)


def _rotation_params(app, aqq, apq, hyperbolic: bool):
    """Angle parameters in dd; returns (c_or_ch, s_or_sh, phase, tan, mod)."""
    re, im = apq
    mod2 = f.add(f.mul(re, re), f.mul(im, im))
    mod = f.sqrt(mod2)
    phase = (f.div(re, mod), f.div(im, mod))
    two_mod = f.add(mod, mod)
    if hyperbolic:
        total = f.add(app, aqq)
        t2 = f.neg(f.div(two_mod, total))
        one = f.dd(1.0)
        ch2 = f.div(one, f.sqrt(f.sub(one, f.mul(t2, t2))))
        sh2 = f.mul(t2, ch2)
        ch = f.sqrt(f.div(f.add(one, ch2), f.dd(2.0)))
        sh = f.div(sh2, f.add(ch, ch))
        return ch, sh, phase, f.div(sh, ch), mod
    delta = f.sub(app, aqq)
    one = f.dd(1.0)
    if f.to_float(delta) == 0.0:
        c = f.sqrt(f.dd(0.5))
        return c, c, phase, one, mod
    t2 = f.div(two_mod, delta)
    c2 = f.div(one, f.sqrt(f.add(one, f.mul(t2, t2))))
    s2 = f.mul(t2, c2)
    c = f.sqrt(f.div(f.add(one, c2), f.dd(2.0)))
    s = f.div(s2, f.add(c, c))
    return c, s, phase, f.div(s, c), mod


def _rotate(mat: _DDHermitian, p: int, q: int, hyperbolic: bool):
    app = mat.scalar(p, p)[0]
    aqq = mat.scalar(q, q)[0]
    apq = mat.scalar(p, q)
    if apq[0][0] == 0.0 and apq[0][1] == 0.0 and apq[1][0] == 0.0 and apq[1][1] == 0.0:
        return
    c, s, ph, t, mod = _rotation_params(app, aqq, apq, hyperbolic)
    tm = f.mul(t, mod)
    if hyperbolic:
        dpp = f.add(app, tm)
        dqq = f.add(aqq, tm)
    else:
        dpp = f.add(app, tm)
        dqq = f.sub(aqq, tm)
    row_p = mat.row(p)
    row_q = mat.row(q)
    col_p = mat.col(p)
    col_q = mat.col(q)
    if hyperbolic:
        # T = [[ph*ch, ph*sh], [sh, ch]]
        phc = _rmul(c, (ph[0], ph[1]))
        phs = _rmul(s, (ph[0], ph[1]))
        mat.set_col(p, _cadd(_cmul(phc, col_p), _rmul(s, col_q)))
        mat.set_col(q, _cadd(_cmul(phs, col_p), _rmul(c, col_q)))
        mat.set_row(p, _cadd(_cmul(_conj(phc), row_p), _rmul(s, row_q)))
        mat.set_row(q, _cadd(_cmul(_conj(phs), row_p), _rmul(c, row_q)))
    else:
        # R = [[c, -sigma], [conj(sigma), c]] with sigma = ph * s
        sigma = _rmul(s, (ph[0], ph[1]))
        neg_sigma = (f.neg(sigma[0]), f.neg(sigma[1]))
        neg_sigma_conj = _conj(neg_sigma)
        mat.set_col(p, _cadd(_rmul(c, col_p), _cmul(_conj(sigma), col_q)))
        mat.set_col(q, _cadd(_cmul(neg_sigma, col_p), _rmul(c, col_q)))
        mat.set_row(p, _cadd(_rmul(c, row_p), _cmul(sigma, row_q)))
        mat.set_row(q, _cadd(_cmul(neg_sigma_conj, row_p), _rmul(c, row_q)))
    zr = _zero_dd()
    mat.set_scalar(p, q, zr, zr)
    mat.set_scalar(q, p, zr, zr)
    mat.set_scalar(p, p, dpp, zr)
    mat.set_scalar(q, q, dqq, zr)


def _converged(mat: _DDHermitian, fro: float, scaled: bool):
    off_sq = mat.offdiag_sq()
    abs_ok = float(np.sqrt(off_sq.sum())) <= _ABS_TARGET * fro
    if not scaled:
        return abs_ok, off_sq, None
    d = np.diagonal(mat.rh).copy()
    denom = np.outer(d, d)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratios = off_sq / denom
    np.fill_diagonal(ratios, 0.0)
    scaled_ok = bool(np.nanmax(ratios) <= _SCALED_TARGET**2)
    return abs_ok and scaled_ok, off_sq, ratios


def _classical_hermitian(mat: _DDHermitian, max_sweeps: int):
    n = mat.n
    steps_per_sweep = max(1, n * (n - 1) // 2)
    fro = mat.fro()
    scaled = bool(np.all(np.diagonal(mat.rh) > 0.0))
    for rotation in range(max_sweeps * steps_per_sweep + 1):
        done, off_sq, ratios = _converged(mat, fro, scaled)
        if done:
            return
        if float(np.sqrt(off_sq.sum())) > _ABS_TARGET * fro:
            p, q = np.unravel_index(int(np.argmax(off_sq)), off_sq.shape)
        else:
            p, q = np.unravel_index(int(np.argmax(ratios)), ratios.shape)
        if p > q:
            p, q = q, p
        _rotate(mat, p, q, hyperbolic=False)
    raise OracleError(f"classical Jacobi did not converge in {max_sweeps} sweeps")


def _cyclic_j(mat: _DDHermitian, nu: int, max_sweeps: int):
    n = mat.n
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]
    for _ in range(max_sweeps):
        done, _, _ = _converged(mat, mat.fro(), scaled=True)
        if done:
            return
        for p, q in pairs:
            _rotate(mat, p, q, hyperbolic=p < nu <= q)
    done, _, _ = _converged(mat, mat.fro(), scaled=True)
    if not done:
        raise OracleError(f"J-Jacobi oracle did not converge in {max_sweeps} sweeps")


def oracle_eigen(a: np.ndarray, nu: int | None = None, max_sweeps: int = 100) -> OracleEigenvalues:
    """High-accuracy eigenvalues of a Hermitian matrix, or of the pencil
    (A, diag(I_nu, -I_{n-nu})) when `nu` is given (A positive definite)."""
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("oracle needs a square matrix")
    if n > _MAX_DIM:
        raise ValueError(f"oracle limited to n <= {_MAX_DIM}")
    mat = _DDHermitian(a)
    if nu is None:
        _classical_hermitian(mat, max_sweeps)
        hi = np.diagonal(mat.rh).copy()
        lo = np.diagonal(mat.rl).copy()
    else:
        if not 1 <= nu < n:
            raise ValueError(f"need 1 <= nu < n, got {nu}")
        if np.any(np.diagonal(mat.rh) <= 0):
            raise ValueError("pencil oracle expects a positive definite matrix")
        _cyclic_j(mat, nu, max_sweeps)
        sign = np.concatenate([np.ones(nu), -np.ones(n - nu)])
        hi = np.diagonal(mat.rh).copy() * sign
        lo = np.diagonal(mat.rl).copy() * sign
    order = np.lexsort((lo, hi))
    return OracleEigenvalues(hi[order], lo[order])
