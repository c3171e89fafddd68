"""Detection statistics: composition, normalization, subspace search."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from satmodes.detection import error_probability, optimize_subspace, total_probabilities
from satmodes.errors import DegenerateChannelError


class TestTotalProbabilities:
    def test_identity_composition(self):
        p_ch = np.eye(3)
        p_srt = 0.9 * np.eye(3)
        p_tot, t_s = total_probabilities(p_ch, p_srt)
        assert np.array_equal(p_tot, np.eye(3))
        assert np.array_equal(t_s, np.full(3, 0.9))

    def test_hand_example(self):
        p_ch = np.array([[0.8, 0.3], [0.2, 0.7]])
        p_tot, t_s = total_probabilities(p_ch, np.eye(2))
        assert np.allclose(t_s, [1.0, 1.0])
        assert np.allclose(p_tot, p_ch)
        assert error_probability(p_tot) == pytest.approx(0.25, rel=1e-12)

    def test_normalization(self, rng):
        p_ch = rng.uniform(0.01, 1.0, (4, 4))
        p_srt = 0.5 * np.eye(4) + 0.05
        p_tot, t_s = total_probabilities(p_ch, p_srt)
        assert np.allclose(p_tot.sum(axis=0), 1.0, atol=1e-12)
        assert np.allclose(p_tot * t_s, p_srt @ p_ch, atol=1e-12)

    def test_degenerate_column_rejected(self):
        p_ch = np.array([[1.0, 0.0], [0.0, 0.0]])
        with pytest.raises(DegenerateChannelError):
            total_probabilities(p_ch, np.eye(2))

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            total_probabilities(np.eye(3), np.eye(2))

    def test_negative_entry_rejected(self):
        bad = np.eye(2)
        bad[0, 1] = -0.1
        with pytest.raises(ValueError):
            total_probabilities(bad, np.eye(2))


class TestErrorProbability:
    def test_identity_is_exact_zero(self):
        assert error_probability(np.eye(5)) == 0.0

    def test_uniform_limit(self):
        for d in (2, 4, 8):
            uniform = np.full((d, d), 1.0 / d)
            assert error_probability(uniform) == pytest.approx((d - 1) / d, rel=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 6), st.integers(0, 2 ** 31 - 1))
    def test_bounds_and_permutation_invariance(self, d, seed):
        gen = np.random.default_rng(seed)
        p = gen.uniform(0.0, 1.0, (d, d)) + 1e-9
        p /= p.sum(axis=0)
        pe = error_probability(p)
        assert 0.0 <= pe <= 1.0
        perm = gen.permutation(d)
        # simultaneous relabeling of outcomes and inputs keeps the diagonal
        assert error_probability(p[np.ix_(perm, perm)]) == pytest.approx(pe, rel=1e-12)


class TestOptimizeSubspace:
    def test_finds_known_best_pair(self):
        # every pair suffers crosstalk except {0, 3}
        p = np.full((4, 4), 0.3) + 0.7 * np.eye(4)
        p[0, 3] = p[3, 0] = 0.0
        labels = (0, 1, 2, 3)

        def score(sub):
            idx = [labels.index(s) for s in sub]
            block = p[np.ix_(idx, idx)]
            p_tot, _ = total_probabilities(block, np.eye(len(sub)))
            return error_probability(p_tot)

        best, val = optimize_subspace(labels, 2, score)
        assert best == (0, 3)
        assert val == 0.0

    def test_tie_break_is_lexicographic(self):
        best, _ = optimize_subspace((3, 1, 0, 2), 2, lambda sub: 0.0)
        assert best == (0, 1)

    def test_maximize_mode(self):
        best, val = optimize_subspace((0, 1, 2), 2, lambda sub: sum(sub), maximize=True)
        assert best == (1, 2)
        assert val == 3.0

    def test_full_set_allowed(self):
        best, _ = optimize_subspace((2, 0, 1), 3, lambda sub: 0.0)
        assert best == (0, 1, 2)

    def test_duplicate_labels_rejected(self):
        with pytest.raises(ValueError):
            optimize_subspace((0, 0, 1), 2, lambda sub: 0.0)

    def test_dimension_bounds(self):
        with pytest.raises(ValueError):
            optimize_subspace((0, 1), 3, lambda sub: 0.0)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2 ** 31 - 1))
    def test_optimum_no_worse_than_any_subset(self, seed):
        gen = np.random.default_rng(seed)
        scores = {}

        def score(sub):
            if sub not in scores:
                scores[sub] = float(gen.uniform())
            return scores[sub]

        _, val = optimize_subspace(tuple(range(6)), 3, score)
        assert val == min(scores.values())
