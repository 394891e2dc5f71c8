import io

import numpy as np
import pytest

from chaoskit.seqcore import DnaSequence, count_kmers, kmer_index
from chaoskit.distribution import (
    DegenerateDirectionError,
    KmerDistribution,
    OrderRangeError,
    build_constraints,
    empirical_distribution,
    hit_and_run_chain,
    hit_and_run_sample,
    is_marginal_consistent,
    marginal_residual,
    read_distribution_csv,
    total_variation_l1,
    uniform_distribution,
    write_distribution_csv,
)
from conftest import random_dna


class TestDistribution:
    def test_empirical_acgt(self):
        d = empirical_distribution(count_kmers("ACGT", 2))
        for w in ("AC", "CG", "GT"):
            assert d.component(w) == pytest.approx(1 / 3)
        assert d.component("AA") == 0.0

    def test_point_mass(self):
        d = empirical_distribution(count_kmers("AAAA", 2))
        assert d.component("AA") == 1.0

    def test_uniform_counts_normalize_to_uniform(self):
        from chaoskit.seqcore import KmerFrequencyVector

        d = empirical_distribution(KmerFrequencyVector(2, np.full(16, 5)))
        assert np.allclose(d.theta, 1 / 16)

    def test_zero_sum_rejected(self):
        from chaoskit.seqcore import KmerFrequencyVector

        with pytest.raises(ValueError):
            empirical_distribution(KmerFrequencyVector(2, np.zeros(16, dtype=np.int64)))

    def test_validation(self):
        with pytest.raises(ValueError):
            KmerDistribution(2, np.full(16, 0.9 / 16))
        with pytest.raises(ValueError):
            KmerDistribution(2, -np.full(16, 1 / 16))

    def test_l1_examples(self):
        u = uniform_distribution(2)
        assert total_variation_l1(u, u) == 0.0
        a = np.zeros(16)
        a[kmer_index("AA")] = 1.0
        b = np.zeros(16)
        b[kmer_index("TT")] = 1.0
        assert total_variation_l1(KmerDistribution(2, a), KmerDistribution(2, b)) == 2.0
        d = empirical_distribution(count_kmers("ACGT", 2))
        assert total_variation_l1(d, u) == pytest.approx(26 / 16)

    def test_l1_order_mismatch(self):
        with pytest.raises(ValueError):
            total_variation_l1(uniform_distribution(2), uniform_distribution(3))


class TestMarginals:
    def test_uniform_is_consistent(self):
        assert np.abs(marginal_residual(uniform_distribution(3))).max() == 0.0

    def test_single_2mer(self):
        d = empirical_distribution(count_kmers("AC", 2))
        r = marginal_residual(d)
        assert r[kmer_index("A")] == 1.0
        assert r[kmer_index("C")] == -1.0
        assert np.count_nonzero(r) == 2

    def test_circularly_closed_sequence(self):
        # first (k-1)-mer equals the last one, so boundary terms cancel
        s = "ACGT" * 30 + "A"
        d = empirical_distribution(count_kmers(s, 2))
        assert np.abs(marginal_residual(d)).max() <= 1e-15

    def test_real_sequence_residual_bound(self):
        # only the start/end vertices contribute, each at most 1 count
        rng = np.random.default_rng(30)
        for _ in range(20):
            n = int(rng.integers(4, 400))
            k = int(rng.integers(2, 6))
            if n < k:
                continue
            d = empirical_distribution(count_kmers(random_dna(rng, n), k))
            bound = 2.0 / (n - k + 1)
            assert np.abs(marginal_residual(d)).max() <= bound + 1e-15

    def test_k1_rejected(self):
        with pytest.raises(OrderRangeError):
            marginal_residual(uniform_distribution(1))


class TestConstraintSystem:
    def test_shape_and_rows_k2(self):
        cs = build_constraints(2)
        assert cs.matrix.shape == (5, 16)
        assert np.array_equal(cs.matrix[0], np.ones(16))
        row_a = cs.matrix[1]
        for w in ("AC", "AG", "AT"):
            assert row_a[kmer_index(w)] == 1
        for w in ("CA", "GA", "TA"):
            assert row_a[kmer_index(w)] == -1
        assert row_a[kmer_index("AA")] == 0
        assert cs.rhs[0] == 1.0 and (cs.rhs[1:] == 0).all()

    def test_marginal_rows_sum_to_zero(self):
        for k in (2, 3, 4):
            cs = build_constraints(k)
            assert np.abs(cs.matrix[1:].sum(axis=0)).max() == 0.0

    def test_numerical_rank_matches_conjecture(self):
        for k in (2, 3, 4):
            cs = build_constraints(k)
            assert cs.numerical_rank == 4 ** (k - 1)
            assert cs.kernel_dimension == 4 ** k - cs.numerical_rank

    def test_kernel_invariants(self):
        for k in (2, 3):
            cs = build_constraints(k)
            n = cs.kernel_basis
            assert np.abs(cs.matrix @ n).max() <= 1e-10
            assert np.abs(n.T @ n - np.eye(n.shape[1])).max() <= 1e-10

    def test_out_of_range(self):
        with pytest.raises(OrderRangeError):
            build_constraints(1)
        with pytest.raises(OrderRangeError):
            build_constraints(7)

    def test_cached_identity(self):
        assert build_constraints(2) is build_constraints(2)


class TestHitAndRun:
    def test_single_step_valid(self):
        cs = build_constraints(2)
        d = hit_and_run_sample(2, 1, seed=123)
        assert d.theta.min() >= 0
        assert d.theta.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.abs(cs.matrix @ d.theta - cs.rhs).max() <= 1e-9

    def test_marginals_after_long_run(self):
        d = hit_and_run_sample(2, 10_000, seed=7)
        assert np.abs(marginal_residual(d)).max() <= 1e-9
        assert is_marginal_consistent(d)

    def test_deterministic(self):
        a = hit_and_run_sample(3, 500, seed=9)
        b = hit_and_run_sample(3, 500, seed=9)
        assert np.array_equal(a.theta, b.theta)

    def test_seed_changes_output(self):
        a = hit_and_run_sample(2, 100, seed=1)
        b = hit_and_run_sample(2, 100, seed=2)
        assert not np.array_equal(a.theta, b.theta)

    def test_chain_iterates_stay_in_affine_subspace(self):
        cs = build_constraints(2)
        for theta in hit_and_run_chain(2, 300, seed=11):
            assert np.abs(cs.matrix @ theta - cs.rhs).max() <= 1e-9

    def test_chain_prefix_equals_sample(self):
        iterates = list(hit_and_run_chain(2, 25, seed=5))
        for t in (1, 10, 25):
            sample = hit_and_run_sample(2, t, seed=5)
            clipped = np.clip(iterates[t - 1], 0.0, None)
            assert np.array_equal(sample.theta, clipped / clipped.sum())

    def test_chord_endpoints_finite(self):
        # directions live in ker(B) which contains the all-ones row, so every
        # nonzero direction has both signs and the chord is bounded
        cs = build_constraints(2)
        rng = np.random.default_rng(31)
        for _ in range(50):
            d = cs.kernel_basis @ rng.standard_normal(cs.kernel_dimension)
            assert (d > 0).any() and (d < 0).any()

    def test_iterations_validation(self):
        with pytest.raises(ValueError):
            list(hit_and_run_chain(2, 0, seed=1))


class TestCsv:
    def test_roundtrip(self):
        d = hit_and_run_sample(2, 50, seed=3)
        sink = io.StringIO()
        write_distribution_csv(d, sink)
        parsed, renormalized = read_distribution_csv(sink.getvalue())
        assert not renormalized
        assert np.abs(parsed.theta - d.theta).max() < 1e-15

    def test_renormalization_flag(self):
        from chaoskit.seqcore import kmer_from_index

        rows = ["kmer,theta"]
        values = np.full(16, (1 + 5e-7) / 16)
        for i in range(16):
            rows.append(f"{kmer_from_index(i, 2)},{float(values[i])!r}")
        parsed, renormalized = read_distribution_csv("\n".join(rows))
        assert renormalized
        assert parsed.theta.sum() == pytest.approx(1.0, abs=1e-12)

    def test_sum_too_far_rejected(self):
        from chaoskit.seqcore import kmer_from_index

        rows = ["kmer,theta"] + [f"{kmer_from_index(i, 2)},{0.9 / 16!r}" for i in range(16)]
        with pytest.raises(ValueError):
            read_distribution_csv("\n".join(rows))

    def test_negative_rejected(self):
        from chaoskit.seqcore import kmer_from_index

        values = np.full(16, 1 / 16)
        values[3] = -values[3]
        rows = ["kmer,theta"] + [
            f"{kmer_from_index(i, 2)},{float(values[i])!r}" for i in range(16)
        ]
        with pytest.raises(ValueError):
            read_distribution_csv("\n".join(rows))

    def test_misordered_kmers_rejected(self):
        from chaoskit.seqcore import kmer_from_index

        rows = ["kmer,theta"] + [
            f"{kmer_from_index(15 - i, 2)},{1 / 16!r}" for i in range(16)
        ]
        with pytest.raises(ValueError):
            read_distribution_csv("\n".join(rows))
