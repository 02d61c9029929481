"""Acceptance suite: one test per acceptance criterion, each printing a
PASS/FAIL line (run with -s to see them).  Expensive solver runs are shared
through module-scoped fixtures."""

import math
import time
from collections import deque
from itertools import permutations

import numpy as np
import pytest

from blockjacobi.annihilator import (
    build_annihilator_oracle,
    build_annihilator_structured,
    build_operator,
    empirical_mu,
    spectral_norm,
)
from blockjacobi.blocksolve import (
    PerturbationSpec,
    SolverConfig,
    solve_hermitian,
    solve_j_hermitian,
    solve_normal,
    solve_perturbed,
)
from blockjacobi.harness.bench import BenchmarkSpec, run_benchmark
from blockjacobi.harness.generators import (
    gen_random_hermitian,
    gen_random_normal,
    gen_spd,
)
from blockjacobi.harness.oracle import oracle_eigen
from blockjacobi.matcore import (
    ElementaryBlockTransform,
    PartitionedHermitian,
    make_partition,
)
from blockjacobi.pivot import (
    admissible_positions,
    admissible_transpose,
    are_equivalent,
    column_cyclic,
    ordering_from_pairs,
    ordering_matrix,
    random_generalized_serial,
)
from blockjacobi.ubc import enforce_ubc, gamma_ij


def report(name: str):
    print(f"[PASS] {name}", flush=True)


def rand_unitary(d, rng):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


N = 100
STRATEGY_COUNT = 5


@pytest.fixture(scope="module")
def hermitian_runs():
    """5 random generalized serial strategies on one n=100 matrix, for block
    sizes 2 and 20; records per-run wall time."""
    runs = {}
    for b in (2, 20):
        sizes = (b,) * (N // b)
        mat = gen_random_hermitian(N, seed=2024, sizes=sizes)
        for k in range(STRATEGY_COUNT):
            ordering = random_generalized_serial(mat.partition.m, seed=100 + k,
                                                 chain_length=4)
            config = SolverConfig(ordering=ordering, tol=1e-13, max_cycles=15,
                                  seed=300 + k)
            t0 = time.time()
            res = solve_hermitian(mat, config)
            runs[(b, k)] = (mat, ordering, res, time.time() - t0)
    return runs


class TestGlobalConvergence:
    def test_criterion(self, hermitian_runs):
        for (b, k), (mat, ordering, res, wall) in hermitian_runs.items():
            normf = float(np.linalg.norm(mat.entries))
            assert res.trace.converged, f"block {b} strategy {k} did not converge"
            assert res.trace.cycles_used <= 15
            assert res.trace.per_cycle_off[-1] <= 1e-13 * normf
            assert wall <= 60.0, f"block {b} strategy {k} took {wall:.1f}s"
        report("global convergence: n=100, blocks {2,20}, 5 strategies, "
               "off <= 1e-13*normF within 15 cycles, <= 60 s each")


class TestStrategyInsensitivity:
    def test_criterion(self, hermitian_runs):
        for b in (2, 20):
            cycles = [hermitian_runs[(b, k)][2].trace.cycles_used
                      for k in range(STRATEGY_COUNT)]
            assert max(cycles) - min(cycles) <= 2, f"block {b}: cycle counts {cycles}"
        report("strategy insensitivity: cycle counts per block size differ by <= 2")


class TestBlockSizeTrend:
    def test_criterion(self):
        for seed in (11, 12, 13):
            counts = {}
            for b in (2, 20):
                sizes = (b,) * (N // b)
                mat = gen_random_hermitian(N, seed=seed, sizes=sizes)
                ordering = random_generalized_serial(mat.partition.m, seed=seed)
                res = solve_hermitian(mat, SolverConfig(ordering=ordering, tol=1e-13,
                                                        max_cycles=20, seed=seed))
                assert res.trace.converged
                counts[b] = res.trace.cycles_used
            assert counts[20] <= counts[2] + 1, f"seed {seed}: {counts}"
        report("block-size trend: 20x20 blocks need <= 2x2-block cycles + 1 (3 seeds)")


class TestStepRecursion:
    def test_criterion(self, hermitian_runs):
        for (b, k), (mat, ordering, res, wall) in hermitian_runs.items():
            normf = float(np.linalg.norm(mat.entries))
            trace = res.trace
            offs = [trace.per_cycle_off[0]] + trace.per_step_off
            for prev, nxt in zip(offs, offs[1:]):
                assert nxt <= prev * (1 + 1e-12), "off increased within a step"
            for t, drop in enumerate(trace.per_step_drop):
                resid = abs(offs[t + 1] ** 2 - (offs[t] ** 2 - drop))
                assert resid <= 1e-12 * max(offs[t] * normf, 1e-300)
        report("step recursion: off^2 drop equals the annihilated pivot "
               "contribution at every step; off never increases")


class TestSweepContraction:
    def test_criterion(self, hermitian_runs):
        for (b, k), (mat, ordering, res, wall) in hermitian_runs.items():
            d = ordering.shift_count_d
            trace = res.trace
            start = trace.per_cycle_off[0]
            if start <= 1e-12 * float(np.linalg.norm(mat.entries)):
                continue
            idx = min(d + 1, len(trace.per_cycle_off) - 1)
            assert trace.per_cycle_off[idx] < start
        report("sweep contraction: off after (d+1) cycles below the start "
               "for every tracked strategy")


class TestAnnihilatorStructure:
    def test_criterion(self):
        rng = np.random.default_rng(77)
        sizes_pool = [(1, 1), (2, 1), (1, 1, 1), (2, 2), (1, 2, 1), (2, 1, 2),
                      (1, 2, 3), (2, 2, 2), (3, 1, 2), (1, 1, 2, 2), (2, 3, 2)]
        cases = 0
        while cases < 50:
            sizes = sizes_pool[int(rng.integers(len(sizes_pool)))]
            p = make_partition(sizes)
            pairs = [(i, j) for i in range(1, p.m + 1) for j in range(i + 1, p.m + 1)]
            i, j = pairs[int(rng.integers(len(pairs)))]
            u = rand_unitary(p.size(i) + p.size(j), rng)
            oracle = build_annihilator_oracle(p, i, j, u)
            structured = build_annihilator_structured(p, i, j, u)
            assert np.max(np.abs(oracle.entries - structured.entries)) <= 1e-13
            assert spectral_norm(structured.entries) <= 1 + 1e-12
            if p.m == 2:
                assert np.count_nonzero(structured.entries) == 0
            else:
                ordering = column_cyclic(p.m)
                transforms = [rand_unitary(p.size(a) + p.size(bb), rng)
                              for a, bb in ordering.pairs]
                assert spectral_norm(build_operator(p, ordering, transforms)) <= 1 + 1e-12
            cases += 1
        # two-block partitions always give the exact null matrix
        p = make_partition((2, 3))
        z = build_annihilator_structured(p, 1, 2, rand_unitary(5, rng))
        assert np.count_nonzero(z.entries) == 0
        report("annihilator structure: 50 randomized cases match the "
               "definitional oracle to 1e-13; norms <= 1 + 1e-12; "
               "two-block case is the null matrix")


class TestOperatorContraction:
    def test_criterion(self):
        cases = [
            (make_partition((1, 2, 1)), column_cyclic(3)),
            (make_partition((2, 1, 2)), column_cyclic(3)),
            (make_partition((2, 1, 2, 1)), column_cyclic(4)),
            (make_partition((1, 2, 1, 2)), column_cyclic(4)),
        ]
        for p, ordering in cases:
            mu = empirical_mu(p, ordering, rho=1.0, trials=100, seed=5)
            assert mu < 1.0 - 1e-10, f"pi={p.sizes}: mu={mu}"
        report("operator contraction: empirical mu < 1 - 1e-10 for m in {3,4}, "
               "mixed block sizes, rho=1, 100 trials")


class TestUbcBound:
    def test_criterion(self):
        assert gamma_ij(1, 1) == math.sqrt(2) / 2
        rng = np.random.default_rng(3)
        for ni in range(1, 5):
            for nj in range(1, 5):
                bound = gamma_ij(ni, nj)
                for _ in range(1000):
                    t = ElementaryBlockTransform(1, 2, rand_unitary(ni + nj, rng), ni)
                    out = enforce_ubc(t, rho=1.0, use_attr_R=False)
                    smin = np.linalg.svd(out.block(0, 0), compute_uv=False)[-1]
                    assert smin >= bound, f"({ni},{nj}): {smin} < {bound}"
        report("UBC bound: sigma_min(U_ii) >= gamma_ij over 1000 random pivots "
               "per size pair in {1..4}^2; gamma_11 = sqrt(2)/2 exactly")


class TestEigenvalueAccuracy:
    def test_well_conditioned(self):
        mat = gen_random_hermitian(50, seed=6, sizes=(5,) * 10)
        ordering = random_generalized_serial(10, seed=6)
        res = solve_hermitian(mat, SolverConfig(ordering=ordering, seed=6))
        assert res.trace.converged
        oracle = oracle_eigen(mat.entries)
        errs = oracle.rel_errors(res.eigenvalues)
        assert errs.max() <= 1e-10
        report("eigenvalue accuracy (well-conditioned): n=50 relative errors "
               "vs oracle <= 1e-10")

    def test_graded(self, tmp_path):
        spec = BenchmarkSpec("accuracy", n=N, block_sizes=(2, 5, 10, 20),
                             cond_exp=10.0, matrix_seed=9, strategy_seed=9,
                             out_dir=str(tmp_path))
        result = run_benchmark(spec)
        assert result.all_converged
        with open(tmp_path / "accuracy.csv") as fh:
            rows = [ln.strip().split(",") for ln in fh
                    if not ln.startswith("#") and not ln.startswith("case_id")]
        errs = [float(r[-1]) for r in rows]
        assert len(errs) == 4 * N
        assert max(errs) <= 1e-11
        report("eigenvalue accuracy (graded): n=100 cond 1e20, all block sizes, "
               "max relative error <= 1e-11")


class TestNormalSolver:
    def test_criterion(self):
        for seed in (21, 22):
            arr, p, lam = gen_random_normal(20, seed, min_real_gap=0.5, sizes=(4,) * 5)
            ordering = random_generalized_serial(5, seed=seed)
            res = solve_normal(arr, p, SolverConfig(ordering=ordering, seed=seed))
            assert res.trace.converged
            got = np.array(sorted(res.eigenvalues, key=lambda z: z.real))
            expect = np.array(sorted(lam, key=lambda z: z.real))
            assert np.max(np.abs(got - expect)) <= 1e-10 * np.max(np.abs(lam))
            assert all(r <= 1e-11 for r in res.trace.commutation_residuals)
        report("normal solver: constructed n=20 eigenvalues recovered to 1e-10; "
               "commutation residual <= 1e-11 at every cycle boundary")


class TestJJacobi:
    def test_small_exact(self):
        p = make_partition((1, 1))
        mat = PartitionedHermitian(np.array([[2.0, 1.0], [1.0, 2.0]]), p)
        res = solve_j_hermitian(mat, 1, SolverConfig())
        pencil = np.sort(np.array([1.0, -1.0]) * res.eigenvalues)
        assert abs(pencil[0] + math.sqrt(3)) <= 1e-14
        assert abs(pencil[1] - math.sqrt(3)) <= 1e-14
        report("J-Jacobi 2x2: pencil eigenvalues +-sqrt(3) to 1e-14")

    def test_criterion(self):
        nu = 12
        a, _ = gen_spd(24, nu, seed=31, sizes=(3,) * 8)
        ordering = random_generalized_serial(8, seed=31)
        res = solve_j_hermitian(a, nu, SolverConfig(ordering=ordering, seed=31))
        assert res.trace.converged
        assert all(r <= 1e-11 for r in res.trace.j_unitarity_residuals)
        bound = float(np.trace(a.entries).real) * (1 + 1e-12)
        assert all(f <= bound for f in res.trace.fro_norms)
        oracle = oracle_eigen(a.entries, nu=nu)
        sign = np.concatenate([np.ones(nu), -np.ones(24 - nu)])
        errs = oracle.rel_errors(sign * res.eigenvalues)
        assert errs.max() <= 1e-10
        report("J-Jacobi: n=24 nu=12 blocks of 3; T*JT=J to 1e-11 throughout; "
               "Frobenius norm within trace bound; pencil eigenvalues match "
               "oracle to 1e-10")


class TestPerturbedProcess:
    def test_criterion(self):
        mat = gen_random_hermitian(20, seed=41, sizes=(2,) * 10)
        normf = float(np.linalg.norm(mat.entries))
        config = SolverConfig(seed=41, tol=1e-13, max_cycles=20)
        res = solve_perturbed(mat, config, PerturbationSpec(seed=1, scale=1e-2),
                              decay=0.5)
        assert any(off < 1e-8 * normf for off in res.trace.per_cycle_off)
        base = solve_hermitian(mat, config)
        zero = solve_perturbed(mat, config, PerturbationSpec(seed=1, scale=1e-2),
                               decay=0.0)
        assert base.trace.per_step_off == zero.trace.per_step_off
        assert np.array_equal(base.eigenvalues, zero.eigenvalues)
        assert np.array_equal(base.transform, zero.transform)
        report("perturbed process: decay=0.5 reaches off < 1e-8*normF within "
               "20 cycles; decay=0 reproduces the unperturbed run bit-for-bit")


def _bfs_class(o):
    seen = {o.pairs}
    queue = deque([o])
    while queue:
        cur = queue.popleft()
        for r in admissible_positions(cur):
            nxt = admissible_transpose(cur, r)
            if nxt.pairs not in seen:
                seen.add(nxt.pairs)
                queue.append(nxt)
    return seen


class TestPivotAlgebra:
    def test_criterion(self):
        # exhaustive commutation-class ground truth for m <= 4
        for m in (2, 3, 4):
            base = list(column_cyclic(m).pairs)
            all_orderings = [ordering_from_pairs(seq, m) for seq in permutations(base)]
            labels = {}
            for o in all_orderings:
                if o.pairs not in labels:
                    for member in _bfs_class(o):
                        labels[member] = o.pairs
            for o1 in all_orderings:
                for o2 in all_orderings:
                    assert are_equivalent(o1, o2) == (labels[o1.pairs] == labels[o2.pairs])
        # the two displayed step-number tables
        o4 = ordering_from_pairs([(1, 2), (3, 4), (1, 3), (2, 4), (1, 4), (2, 3)], 4)
        assert np.array_equal(
            ordering_matrix(o4).entries,
            np.array([[-1, 0, 2, 4], [0, -1, 5, 3], [2, 5, -1, 1], [4, 3, 1, -1]]),
        )
        o5 = ordering_from_pairs(
            [(1, 4), (4, 5), (1, 3), (2, 4), (3, 5), (2, 3), (1, 5), (1, 2),
             (3, 4), (2, 5)], 5)
        expect5 = np.array([
            [-1, 7, 2, 0, 6],
            [7, -1, 5, 3, 9],
            [2, 5, -1, 8, 4],
            [0, 3, 8, -1, 1],
            [6, 9, 4, 1, -1],
        ])
        assert np.array_equal(ordering_matrix(o5).entries, expect5)
        report("pivot algebra: equivalence matches exhaustive BFS for m <= 4; "
               "both displayed step-number tables reproduced exactly")
