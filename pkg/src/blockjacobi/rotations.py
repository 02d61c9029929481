"""Complex trigonometric and hyperbolic plane rotations, plus the
element-wise Jacobi and J-Jacobi sweeps used to diagonalize pivot
submatrices.

Angle conventions: the rotation angle satisfies tan(2*phi) =
2|a_ij| / (a_ii - a_jj), phi in [-pi/4, pi/4], so cos(phi) >= sqrt(2)/2; the
hyperbolic angle satisfies tanh(2*theta) = -2|a_ij| / (a_ii + a_jj), which
requires 2|a_ij| < a_ii + a_jj (true for positive definite pivots).  Both
annihilate the pivot entry exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

try:
    from numba import njit as _njit
except ImportError:  # pragma: no cover - numba is normally available
    def _njit(*args, **kwargs):
        def wrap(f):
            return f
        return wrap

from .pivot import PivotOrdering

__all__ = [
    "ComplexRotation",
    "HyperbolicRotation",
    "DefinitenessError",
    "trig_rotation",
    "hyp_rotation",
    "SweepTrace",
    "elementwise_jacobi",
    "elementwise_j_jacobi",
]

SQRT2_2 = math.sqrt(0.5)


class DefinitenessError(ValueError):
    """Raised when a hyperbolic rotation meets 2|a_ij| >= a_ii + a_jj."""


@dataclass(frozen=True)
class ComplexRotation:
    i: int
    j: int
    c: float
    s_mag: float
    alpha: float

    def __post_init__(self):
        if abs(self.c * self.c + self.s_mag * self.s_mag - 1.0) > 1e-15 * 4:
            raise ValueError("c^2 + s^2 != 1")
        if self.c < SQRT2_2 - 1e-15:
            raise ValueError(f"cos(phi) = {self.c} below sqrt(2)/2")

    @property
    def tan(self) -> float:
        return self.s_mag / self.c

    def as_matrix(self) -> np.ndarray:
        """2x2 pivot submatrix [[c, -e^{i a} s], [e^{-i a} s, c]]."""
        sigma = np.exp(1j * self.alpha) * self.s_mag
        return np.array([[self.c, -sigma], [np.conj(sigma), self.c]])


@dataclass(frozen=True)
class HyperbolicRotation:
    i: int
    j: int
    ch: float
    sh: float
    alpha: float

    def __post_init__(self):
        if self.ch < 1.0:
            raise ValueError("cosh(theta) < 1")
        if abs(self.ch * self.ch - self.sh * self.sh - 1.0) > 1e-13 * self.ch * self.ch:
            raise ValueError("ch^2 - sh^2 != 1")

    @property
    def tanh(self) -> float:
        return self.sh / self.ch

    def as_matrix(self) -> np.ndarray:
        """2x2 pivot submatrix Phi*R with Phi = diag(e^{i a}, 1)."""
        ph = np.exp(1j * self.alpha)
        return np.array([[ph * self.ch, ph * self.sh], [self.sh, self.ch]])


def trig_rotation(a_ii: float, a_jj: float, a_ij: complex, i: int = 1, j: int = 2) -> ComplexRotation:
    """Rotation annihilating the pivot entry of the Hermitian 2x2
    [[a_ii, a_ij], [conj(a_ij), a_jj]]."""
    mod = abs(a_ij)
    if mod == 0.0:
        return ComplexRotation(i, j, 1.0, 0.0, 0.0)
    alpha = math.atan2(a_ij.imag, a_ij.real)
    delta = a_ii - a_jj
    if delta == 0.0:
        # phi = pi/4; equal c and s make tan(phi) exactly 1
        return ComplexRotation(i, j, SQRT2_2, SQRT2_2, alpha)
    phi = 0.5 * math.atan(2.0 * mod / delta)
    return ComplexRotation(i, j, math.cos(phi), math.sin(phi), alpha)


def hyp_rotation(a_ii: float, a_jj: float, a_ij: complex, i: int = 1, j: int = 2) -> HyperbolicRotation:
    """Hyperbolic rotation annihilating the pivot entry under the congruence
    with diag-signature (1, -1).  Requires 2|a_ij| < a_ii + a_jj."""
    mod = abs(a_ij)
    if mod == 0.0:
        return HyperbolicRotation(i, j, 1.0, 0.0, 0.0)
    total = a_ii + a_jj
    if 2.0 * mod >= total:
        raise DefinitenessError(
            f"2|a_ij| = {2*mod:.6g} >= a_ii + a_jj = {total:.6g}: pivot pair not positive definite"
        )
    alpha = math.atan2(a_ij.imag, a_ij.real)
    t2 = -2.0 * mod / total
    ch2 = 1.0 / math.sqrt(1.0 - t2 * t2)
    sh2 = t2 * ch2
    ch = math.sqrt((1.0 + ch2) / 2.0)
    sh = sh2 / (2.0 * ch)
    return HyperbolicRotation(i, j, ch, sh, alpha)


@dataclass
class SweepTrace:
    """Per-sweep off-norm record for an element-wise run.  `final_matrix` is
    the matrix state at exit (the converged near-diagonal iterate, or the
    current state on a non-convergence report)."""

    per_sweep_off: list[float] = field(default_factory=list)
    sweeps: int = 0
    converged: bool = False
    fro_norms: list[float] = field(default_factory=list)
    final_matrix: np.ndarray | None = None


@_njit(cache=True)
def _hermitian_sweep(a, u, pairs, accumulate):
    """In-place rotations R* A R over the pair list (0-based); each step
    annihilates its pivot entry exactly and updates the diagonal by the
    half-angle formulas.  U accumulates the rotations when requested."""
    n = a.shape[0]
    for k in range(pairs.shape[0]):
        p = pairs[k, 0]
        q = pairs[k, 1]
        apq = a[p, q]
        if apq == 0:
            continue
        mod = abs(apq)
        app = a[p, p].real
        aqq = a[q, q].real
        delta = app - aqq
        if delta == 0.0:
            c = math.sqrt(0.5)
            s = c
            t = 1.0
        else:
            phi = 0.5 * math.atan(2.0 * mod / delta)
            c = math.cos(phi)
            s = math.sin(phi)
            t = s / c
        sigma = (apq / mod) * s
        sconj = np.conj(sigma)
        for r in range(n):
            arp = a[r, p]
            arq = a[r, q]
            a[r, p] = c * arp + sconj * arq
            a[r, q] = -sigma * arp + c * arq
        for r in range(n):
            apr = a[p, r]
            aqr = a[q, r]
            a[p, r] = c * apr + sigma * aqr
            a[q, r] = -sconj * apr + c * aqr
        a[p, p] = app + t * mod
        a[q, q] = aqq - t * mod
        a[p, q] = 0.0
        a[q, p] = 0.0
        if accumulate:
            for r in range(n):
                urp = u[r, p]
                urq = u[r, q]
                u[r, p] = c * urp + sconj * urq
                u[r, q] = -sigma * urp + c * urq


@_njit(cache=True)
def _j_sweep(a, t_acc, pairs, nu, accumulate):
    """J-Jacobi steps over the pair list: trig rotations within a signature
    side, hyperbolic congruences across it.  Returns -1, or the index of a
    pair violating positive definiteness."""
    n = a.shape[0]
    for k in range(pairs.shape[0]):
        p = pairs[k, 0]
        q = pairs[k, 1]
        apq = a[p, q]
        if apq == 0:
            continue
        mod = abs(apq)
        app = a[p, p].real
        aqq = a[q, q].real
        if p < nu <= q:
            total = app + aqq
            if 2.0 * mod >= total:
                return k
            t2 = -2.0 * mod / total
            ch2 = 1.0 / math.sqrt(1.0 - t2 * t2)
            sh2 = t2 * ch2
            ch = math.sqrt((1.0 + ch2) / 2.0)
            sh = sh2 / (2.0 * ch)
            th = sh / ch
            ph = apq / mod
            t11 = ph * ch
            t12 = ph * sh
            c11 = np.conj(t11)
            c12 = np.conj(t12)
            for r in range(n):
                arp = a[r, p]
                arq = a[r, q]
                a[r, p] = t11 * arp + sh * arq
                a[r, q] = t12 * arp + ch * arq
            for r in range(n):
                apr = a[p, r]
                aqr = a[q, r]
                a[p, r] = c11 * apr + sh * aqr
                a[q, r] = c12 * apr + ch * aqr
            a[p, p] = app + th * mod
            a[q, q] = aqq + th * mod
            a[p, q] = 0.0
            a[q, p] = 0.0
            if accumulate:
                for r in range(n):
                    trp = t_acc[r, p]
                    trq = t_acc[r, q]
                    t_acc[r, p] = t11 * trp + sh * trq
                    t_acc[r, q] = t12 * trp + ch * trq
        else:
            delta = app - aqq
            if delta == 0.0:
                c = math.sqrt(0.5)
                s = c
                t = 1.0
            else:
                phi = 0.5 * math.atan(2.0 * mod / delta)
                c = math.cos(phi)
                s = math.sin(phi)
                t = s / c
            sigma = (apq / mod) * s
            sconj = np.conj(sigma)
            for r in range(n):
                arp = a[r, p]
                arq = a[r, q]
                a[r, p] = c * arp + sconj * arq
                a[r, q] = -sigma * arp + c * arq
            for r in range(n):
                apr = a[p, r]
                aqr = a[q, r]
                a[p, r] = c * apr + sigma * aqr
                a[q, r] = -sconj * apr + c * aqr
            a[p, p] = app + t * mod
            a[q, q] = aqq - t * mod
            a[p, q] = 0.0
            a[q, p] = 0.0
            if accumulate:
                for r in range(n):
                    trp = t_acc[r, p]
                    trq = t_acc[r, q]
                    t_acc[r, p] = c * trp + sconj * trq
                    t_acc[r, q] = -sigma * trp + c * trq
    return -1


def _core_ordering(n: int, ordering, seed: int) -> np.ndarray:
    """Resolve the sweep ordering to a 0-based pair array."""
    if isinstance(ordering, PivotOrdering):
        if ordering.m != n:
            raise ValueError(f"ordering over m={ordering.m} does not match dimension {n}")
        return _pairs_array(ordering.pairs)
    if ordering is None:
        return _random_serial_pairs(n, seed)
    raise ValueError(f"unsupported ordering {ordering!r}")


def elementwise_jacobi(a, ordering=None, tol: float = 1e-14, max_sweeps: int = 30,
                       seed: int = 0, scaled_tol: float | None = None):
    """Element-wise complex Jacobi diagonalization of a Hermitian matrix.

    `ordering` is a PivotOrdering over m = dim, the string "classical"
    (largest off-diagonal modulus each step), or None for a fresh seeded
    random generalized serial ordering.  Returns (eigenvalue diagonal,
    accumulated unitary, SweepTrace); stops when off(A) <= tol * ||A||_F.
    A non-None `scaled_tol` additionally requires, on positive definite
    input, max |a_rs| / sqrt(a_rr a_ss) <= scaled_tol, which preserves the
    relative accuracy of tiny eigenvalues on graded matrices.
    """
    a = np.array(a, dtype=np.complex128, copy=True)
    a = (a + a.conj().T) / 2.0
    n = a.shape[0]
    u = np.eye(n, dtype=np.complex128)
    normf = float(np.linalg.norm(a))
    trace = SweepTrace()
    if n == 1:
        trace.converged = True
        trace.final_matrix = a
        return a.diagonal().real.copy(), u, trace

    classical = ordering == "classical"
    pairs = None if classical else _core_ordering(n, ordering, seed)
    steps_per_sweep = n * (n - 1) // 2

    def off_now() -> float:
        b = a.copy()
        np.fill_diagonal(b, 0.0)
        return float(np.linalg.norm(b))

    current = off_now()
    threshold = tol * normf
    single = np.zeros((1, 2), dtype=np.int64)
    for _ in range(max_sweeps):
        if current <= threshold and _scaled_ok(a, scaled_tol):
            trace.converged = True
            break
        if classical:
            for _ in range(steps_per_sweep):
                b = np.abs(a)
                np.fill_diagonal(b, 0.0)
                p, q = np.unravel_index(int(np.argmax(b)), b.shape)
                if p > q:
                    p, q = q, p
                if b[p, q] == 0.0:
                    break
                single[0, 0] = p
                single[0, 1] = q
                _hermitian_sweep(a, u, single, True)
        else:
            _hermitian_sweep(a, u, pairs, True)
        trace.sweeps += 1
        current = off_now()
        trace.per_sweep_off.append(current)
    else:
        trace.converged = current <= threshold and _scaled_ok(a, scaled_tol)
    trace.final_matrix = a
    return a.diagonal().real.copy(), u, trace


def _pairs_array(pairs) -> np.ndarray:
    """1-based pair list to a 0-based kernel index array."""
    arr = np.asarray(pairs, dtype=np.int64)
    return arr - 1


def scaled_off_max(a: np.ndarray) -> float | None:
    """max |a_rs| / sqrt(a_rr a_ss), or None when the diagonal is not
    positive or some entry breaks the positive-definite bound (then the
    scaled measure is not meaningful)."""
    d = np.diagonal(a).real
    if d.size == 0 or np.any(d <= 0.0):
        return None
    s = np.abs(a) / np.sqrt(np.outer(d, d))
    np.fill_diagonal(s, 0.0)
    m = float(s.max()) if s.size else 0.0
    return m if m < 1.0 else None


def _scaled_ok(a: np.ndarray, scaled_tol: float | None) -> bool:
    if scaled_tol is None:
        return True
    m = scaled_off_max(a)
    return m is None or m <= scaled_tol


def _random_serial_pairs(n: int, seed: int) -> np.ndarray:
    """0-based pair array of a fresh random serial-with-permutations
    ordering (random column/row mode, random order inside each column/row,
    optional reversal).  Lightweight path for per-invocation core orderings."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(n, 0)))
    out = np.empty((n * (n - 1) // 2, 2), dtype=np.int64)
    pos = 0
    if rng.integers(2) == 0:  # column mode
        out[0, 0] = 0
        out[0, 1] = 1
        pos = 1
        for j in range(2, n):
            order = rng.permutation(j)
            cnt = len(order)
            out[pos:pos + cnt, 0] = order
            out[pos:pos + cnt, 1] = j
            pos += cnt
    else:  # row mode, bottom-up
        out[0, 0] = n - 2
        out[0, 1] = n - 1
        pos = 1
        for i in range(n - 3, -1, -1):
            order = rng.permutation(np.arange(i + 1, n))
            cnt = len(order)
            out[pos:pos + cnt, 0] = i
            out[pos:pos + cnt, 1] = order
            pos += cnt
    if rng.integers(2) == 1:
        out = out[::-1].copy()
    return out


def elementwise_j_jacobi(a, nu_local: int, ordering=None, tol: float = 1e-14,
                         max_sweeps: int = 30, seed: int = 0,
                         scaled_tol: float | None = None):
    """Element-wise J-Jacobi on a Hermitian positive definite matrix with
    signature J = diag(I_nu, -I_{n-nu}).

    Returns (positive eigenvalue diagonal of the congruence limit,
    accumulated J-unitary T, SweepTrace); J * diagonal gives the pencil
    eigenvalues.  Stops when off(A) <= tol * ||A||_F of the current iterate.
    """
    a = np.array(a, dtype=np.complex128, copy=True)
    a = (a + a.conj().T) / 2.0
    n = a.shape[0]
    if not 1 <= nu_local < n:
        raise ValueError(f"need 1 <= nu < n, got nu={nu_local}, n={n}")
    t_acc = np.eye(n, dtype=np.complex128)
    trace = SweepTrace()
    classical = ordering == "classical"
    pairs = None if classical else _core_ordering(n, ordering, seed)

    def off_now() -> float:
        b = a.copy()
        np.fill_diagonal(b, 0.0)
        return float(np.linalg.norm(b))

    def run_pairs(arr) -> None:
        bad = _j_sweep(a, t_acc, arr, nu_local, True)
        if bad >= 0:
            p, q = int(arr[bad, 0]), int(arr[bad, 1])
            raise DefinitenessError(
                f"2|a_ij| >= a_ii + a_jj at pivot ({p + 1}, {q + 1}): "
                "matrix is not positive definite"
            )

    steps_per_sweep = n * (n - 1) // 2
    current = off_now()
    trace.fro_norms.append(float(np.linalg.norm(a)))
    single = np.zeros((1, 2), dtype=np.int64)
    for _ in range(max_sweeps):
        if current <= tol * float(np.linalg.norm(a)) and _scaled_ok(a, scaled_tol):
            trace.converged = True
            break
        if classical:
            for _ in range(steps_per_sweep):
                b = np.abs(a)
                np.fill_diagonal(b, 0.0)
                p, q = np.unravel_index(int(np.argmax(b)), b.shape)
                if p > q:
                    p, q = q, p
                if b[p, q] == 0.0:
                    break
                single[0, 0] = p
                single[0, 1] = q
                run_pairs(single)
        else:
            run_pairs(pairs)
        trace.sweeps += 1
        current = off_now()
        trace.per_sweep_off.append(current)
        trace.fro_norms.append(float(np.linalg.norm(a)))
    else:
        trace.converged = (current <= tol * float(np.linalg.norm(a))
                           and _scaled_ok(a, scaled_tol))
    trace.final_matrix = a
    return a.diagonal().real.copy(), t_acc, trace
