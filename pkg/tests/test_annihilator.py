import numpy as np
import pytest

from blockjacobi.annihilator import (
    VecIndexer,
    apply_annihilator,
    build_annihilator_oracle,
    build_annihilator_structured,
    build_operator,
    empirical_mu,
    spectral_norm,
    tau,
    vec0_inverse,
    vec_pi,
)
from blockjacobi.matcore import make_partition
from blockjacobi.pivot import column_cyclic, shift


def rand_unitary(d, rng):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def rand_hermitian(n, rng):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


RANDOM_CASES = [
    (1, 1), (1, 2), (2, 1), (1, 1, 1), (2, 2), (1, 2, 1), (2, 1, 2),
    (1, 2, 3), (3, 2, 1), (2, 2, 2), (1, 1, 2, 2), (2, 3, 2), (3, 1, 3),
    (1, 3, 4), (2, 2, 2, 2),
]


class TestTau:
    def test_first_position(self):
        for m in range(2, 9):
            assert tau(1, 2, m) == 1

    def test_m4_examples(self):
        assert tau(3, 4, 4) == 6
        assert tau(2, 1, 4) == 7

    @pytest.mark.parametrize("m", range(2, 9))
    def test_bijection(self, m):
        values = sorted(
            tau(i, j, m) for i in range(1, m + 1) for j in range(1, m + 1) if i != j
        )
        assert values == list(range(1, m * (m - 1) + 1))

    def test_diagonal_rejected(self):
        with pytest.raises(ValueError):
            tau(2, 2, 4)


class TestVec:
    def test_unit_partition_2x2(self):
        p = make_partition((1, 1))
        a = np.array([[1.0, 2.0 + 1j], [3.0, 4.0]])
        assert np.array_equal(vec_pi(a, p), np.array([2.0 + 1j, 3.0]))

    def test_1_2_partition(self):
        p = make_partition((1, 2))
        a = np.arange(9, dtype=float).reshape(3, 3)
        # upper block column-stacked, lower block row-stacked
        assert np.array_equal(vec_pi(a, p), np.array([1, 2, 3, 6], dtype=complex))

    def test_zero(self):
        p = make_partition((2, 2))
        assert np.count_nonzero(vec_pi(np.zeros((4, 4)), p)) == 0

    def test_k_formula(self):
        for sizes in RANDOM_CASES:
            p = make_partition(sizes)
            ix = VecIndexer.build(p)
            n_big = p.n * (p.n - 1) // 2
            assert ix.K == n_big - sum(s * (s - 1) // 2 for s in sizes)

    def test_norm_equals_block_off(self):
        from blockjacobi.matcore import block_off_norm

        rng = np.random.default_rng(3)
        p = make_partition((2, 3, 1))
        a = rand_hermitian(6, rng)
        assert np.linalg.norm(vec_pi(a, p)) == pytest.approx(block_off_norm(a, p), rel=1e-14)

    def test_hermitian_halves_conjugate(self):
        rng = np.random.default_rng(4)
        p = make_partition((2, 1, 3))
        v = vec_pi(rand_hermitian(6, rng), p)
        k = len(v) // 2
        assert np.allclose(v[k:], np.conj(v[:k]), atol=0)

    def test_inverse_example(self):
        p = make_partition((1, 2))
        a = vec0_inverse(np.array([1.0, 2.0, 3.0, 4.0]), p)
        assert np.array_equal(a[0, 1:], [1.0, 2.0])
        assert np.array_equal(a[1:, 0], [3.0, 4.0])
        assert a[0, 0] == 0 and np.count_nonzero(a[1:, 1:]) == 0

    @pytest.mark.parametrize("sizes", RANDOM_CASES)
    def test_round_trip(self, sizes):
        rng = np.random.default_rng(sum(sizes))
        p = make_partition(sizes)
        ix = VecIndexer.build(p)
        v = rng.standard_normal(ix.length) + 1j * rng.standard_normal(ix.length)
        assert np.array_equal(vec_pi(vec0_inverse(v, p), p), v)

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            vec0_inverse(np.zeros(5), make_partition((1, 2)))


class TestAnnihilatorStructure:
    def test_two_block_partition_is_null(self):
        rng = np.random.default_rng(0)
        for sizes, two_k in [((2, 3), 12), ((1, 1), 2)]:
            p = make_partition(sizes)
            u = rand_unitary(p.n, rng)
            for build in (build_annihilator_oracle, build_annihilator_structured):
                r = build(p, 1, 2, u)
                assert np.count_nonzero(r.entries) == 0
                assert r.entries.shape == (two_k, two_k)

    def test_identity_transform(self):
        p = make_partition((1, 1, 2))
        r = build_annihilator_structured(p, 1, 2, np.eye(2))
        ix = VecIndexer.build(p)
        expect = np.eye(ix.length, dtype=complex)
        expect[ix.segment(1, 2), ix.segment(1, 2)] = 0
        expect[ix.segment(2, 1), ix.segment(2, 1)] = 0
        assert np.array_equal(r.entries, expect)

    def test_unit_blocks_pattern(self):
        rng = np.random.default_rng(1)
        p = make_partition((1, 1, 1))
        r = build_annihilator_oracle(p, 1, 2, rand_unitary(2, rng))
        ix = VecIndexer.build(p)
        dev = r.entries - np.eye(6)
        allowed = np.zeros((6, 6), dtype=bool)
        for a in ((3, 1), (3, 2)):
            for b in ((3, 1), (3, 2)):
                allowed[ix.segment(*a), ix.segment(*b)] = True
        for a in ((1, 3), (2, 3)):
            for b in ((1, 3), (2, 3)):
                allowed[ix.segment(*a), ix.segment(*b)] = True
        allowed[ix.segment(1, 2), :] = True
        allowed[ix.segment(2, 1), :] = True
        allowed[:, ix.segment(1, 2)] = True
        allowed[:, ix.segment(2, 1)] = True
        assert np.all(np.abs(dev[~allowed]) == 0)

    def test_structured_equals_oracle_sweep(self):
        # central structure check over 50 randomized cases with n <= 8
        rng = np.random.default_rng(42)
        cases = 0
        while cases < 50:
            sizes = RANDOM_CASES[int(rng.integers(len(RANDOM_CASES)))]
            p = make_partition(sizes)
            if p.m < 2:
                continue
            pairs = [(i, j) for i in range(1, p.m + 1) for j in range(i + 1, p.m + 1)]
            i, j = pairs[int(rng.integers(len(pairs)))]
            u = rand_unitary(p.size(i) + p.size(j), rng)
            a = build_annihilator_oracle(p, i, j, u)
            b = build_annihilator_structured(p, i, j, u)
            assert np.max(np.abs(a.entries - b.entries)) <= 1e-13
            cases += 1

    def test_modified_principal_submatrices_unitary(self):
        # identity outside 2(m-2) unitary couplings and the 2 zeroed pivots
        rng = np.random.default_rng(7)
        p = make_partition((2, 1, 3, 2))
        i, j = 1, 3
        u = rand_unitary(5, rng)
        r = build_annihilator_structured(p, i, j, u).entries
        ix = VecIndexer.build(p)
        spanning = 0
        for other in (2, 4):
            for pair_seq in (((other, i), (other, j)), ((i, other), (j, other))):
                rows = np.r_[
                    np.arange(ix.segment(*pair_seq[0]).start, ix.segment(*pair_seq[0]).stop),
                    np.arange(ix.segment(*pair_seq[1]).start, ix.segment(*pair_seq[1]).stop),
                ]
                blk = r[np.ix_(rows, rows)]
                assert np.linalg.norm(blk.conj().T @ blk - np.eye(len(rows))) < 1e-13
                spanning += 1
        assert spanning == 2 * (p.m - 2)
        # untouched diagonal is exactly the identity
        touched = np.zeros(ix.length, dtype=bool)
        for other in (2, 4):
            for pr in ((other, i), (other, j), (i, other), (j, other)):
                touched[ix.segment(*pr)] = True
        for pr in ((i, j), (j, i)):
            touched[ix.segment(*pr)] = True
        untouched = np.where(~touched)[0]
        assert np.array_equal(
            r[np.ix_(untouched, untouched)], np.eye(len(untouched))
        )

    def test_norm_at_most_one(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            sizes = RANDOM_CASES[int(rng.integers(len(RANDOM_CASES)))]
            p = make_partition(sizes)
            pairs = [(i, j) for i in range(1, p.m + 1) for j in range(i + 1, p.m + 1)]
            i, j = pairs[int(rng.integers(len(pairs)))]
            u = rand_unitary(p.size(i) + p.size(j), rng)
            r = build_annihilator_structured(p, i, j, u)
            assert spectral_norm(r.entries) <= 1 + 1e-12

    def test_dense_limit_guard(self):
        p = make_partition((7, 7))
        with pytest.raises(ValueError):
            build_annihilator_oracle(p, 1, 2, np.eye(14))

    def test_matrix_free_matches_dense(self):
        rng = np.random.default_rng(13)
        p = make_partition((2, 2, 1))
        u = rand_unitary(4, rng)
        r = build_annihilator_structured(p, 1, 2, u)
        ix = VecIndexer.build(p)
        v = rng.standard_normal(ix.length) + 1j * rng.standard_normal(ix.length)
        assert np.allclose(apply_annihilator(p, 1, 2, u, v), r.entries @ v, atol=1e-13)


class TestOperator:
    def test_m2_zero(self):
        rng = np.random.default_rng(2)
        p = make_partition((1, 2))
        op = build_operator(p, column_cyclic(2), [rand_unitary(3, rng)])
        assert np.count_nonzero(op) == 0

    def test_identity_transforms_zero_after_cycle(self):
        p = make_partition((1, 1, 1))
        o = column_cyclic(3)
        op = build_operator(p, o, [np.eye(2)] * 3)
        assert np.count_nonzero(op) == 0

    def test_random_rotations_contract(self):
        rng = np.random.default_rng(5)
        p = make_partition((1, 1, 1))
        o = column_cyclic(3)
        op = build_operator(p, o, [rand_unitary(2, rng) for _ in range(3)])
        nrm = spectral_norm(op)
        assert nrm < 1.0
        assert nrm <= 1 + 1e-12

    def test_length_mismatch(self):
        p = make_partition((1, 1, 1))
        with pytest.raises(ValueError):
            build_operator(p, column_cyclic(3), [np.eye(2)] * 2)


class TestSpectralNorm:
    def test_matches_numpy(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            a = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
            assert spectral_norm(a) == pytest.approx(np.linalg.norm(a, 2), rel=1e-9)

    def test_zero_matrix(self):
        assert spectral_norm(np.zeros((4, 4))) == 0.0


class TestEmpiricalMu:
    def test_m2_zero(self):
        p = make_partition((1, 2))
        assert empirical_mu(p, column_cyclic(2), trials=3, seed=0) == 0.0

    def test_unit_blocks_contraction(self):
        p = make_partition((1, 1, 1))
        mu = empirical_mu(p, column_cyclic(3), trials=20, seed=1)
        assert 0.0 < mu < 1.0

    def test_shifted_ordering_uses_d_plus_one_cycles(self):
        p = make_partition((1, 2, 1))
        o = shift(column_cyclic(3), 1)
        assert o.shift_count_d == 1
        mu = empirical_mu(p, o, trials=5, seed=2)
        assert mu < 1.0


class TestSolverConsistency:
    def test_block_step_matches_annihilator(self):
        # vec of the stepped matrix (pivot blocks zeroed) = R(t) vec(A)
        from blockjacobi.blocksolve import SolverConfig, block_step
        from blockjacobi.matcore import PartitionedHermitian

        rng = np.random.default_rng(21)
        p = make_partition((2, 2, 1))
        a = PartitionedHermitian(rand_hermitian(5, rng), p)
        config = SolverConfig(seed=3, preprocess=False)
        stepped, t = block_step(a, (1, 2), config)
        r = build_annihilator_structured(p, 1, 2, t.pivot_submatrix)
        got = vec_pi(stepped.entries, p)
        expect = r.entries @ vec_pi(a.entries, p)
        scale = np.linalg.norm(a.entries)
        assert np.max(np.abs(got - expect)) <= 1e-12 * scale

    def test_cycle_operator_matches_solver_trace(self):
        # the operator built from one cycle's actual transforms reproduces
        # the stacked off-block vector after the cycle, and its image norm
        # is bounded by the off-norm the trace reports
        from blockjacobi.blocksolve import SolverConfig, block_step
        from blockjacobi.matcore import PartitionedHermitian, off_norm

        rng = np.random.default_rng(23)
        p = make_partition((2, 1, 2))
        start = PartitionedHermitian(rand_hermitian(5, rng), p)
        config = SolverConfig(seed=5, preprocess=False)
        ordering = column_cyclic(3)
        mat = start
        transforms = []
        for pair in ordering.pairs:
            mat, t = block_step(mat, pair, config)
            transforms.append(t.pivot_submatrix)
        op = build_operator(p, ordering, transforms)
        image = op @ vec_pi(start.entries, p)
        scale = np.linalg.norm(start.entries)
        assert np.max(np.abs(image - vec_pi(mat.entries, p))) <= 1e-12 * scale
        assert np.linalg.norm(image) <= off_norm(mat.entries) + 1e-12 * scale
