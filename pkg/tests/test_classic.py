import numpy as np
import pytest

from cmcorr.classic import (
    difference_comparator,
    grades,
    kendall_tau_b,
    pair_rank_correlation,
    pearson,
    sign_comparator,
    spearman,
    x_grades,
    y_grades,
)
from cmcorr.dist import joint_pmf
from cmcorr.errors import (
    MissingValues,
    NotMonotoneComparator,
    ZeroVariance,
)

DSBS = [[0.4, 0.1], [0.1, 0.4]]


def dsbs():
    return joint_pmf(DSBS, x_values=(0, 1), y_values=(0, 1))


def random_pmf(rng, m, n):
    return joint_pmf(rng.dirichlet(np.ones(m * n)).reshape(m, n),
                     x_values=tuple(range(m)), y_values=tuple(range(n)))


def brute_kendall(j):
    """Independent check: plain quadruple loop over outcome pairs."""
    m, n = j.shape
    xv = j.x_values or tuple(range(m))
    yv = j.y_values or tuple(range(n))
    num = es1 = es2 = 0.0
    for a in range(m):
        for b in range(n):
            for c in range(m):
                for d in range(n):
                    w = j.p[a, b] * j.p[c, d]
                    s1 = np.sign(xv[a] - xv[c])
                    s2 = np.sign(yv[b] - yv[d])
                    num += w * s1 * s2
                    es1 += w * s1 * s1
                    es2 += w * s2 * s2
    return num / np.sqrt(es1 * es2)


class TestPearson:
    def test_hand_value(self):
        # Cov = 0.15, Var = 0.25 on each side
        assert pearson(dsbs()) == pytest.approx(0.6, abs=1e-12)

    def test_independent(self):
        j = joint_pmf(np.outer([0.3, 0.7], [0.6, 0.4]),
                      x_values=(0, 1), y_values=(0, 1))
        assert pearson(j) == pytest.approx(0.0, abs=1e-12)

    def test_identical_embeddings(self):
        j = joint_pmf([[0.5, 0], [0, 0.5]], x_values=(3, 9), y_values=(3, 9))
        assert pearson(j) == pytest.approx(1.0, abs=1e-12)

    def test_missing_values(self):
        with pytest.raises(MissingValues):
            pearson(joint_pmf(DSBS))

    def test_zero_variance(self):
        j = joint_pmf(DSBS, x_values=(2, 2), y_values=(0, 1))
        with pytest.raises(ZeroVariance):
            pearson(j)


class TestGrades:
    def test_uniform_two(self):
        assert grades([0.5, 0.5]) == pytest.approx([0.25, 0.75])

    def test_single(self):
        assert grades([1.0]) == pytest.approx([0.5])

    def test_cumulative(self):
        assert grades([0.2, 0.3, 0.5]) == pytest.approx([0.1, 0.35, 0.75])

    def test_value_order_respected(self):
        # grades follow the numeric embedding, not the listing order
        j = joint_pmf([[0.2, 0.3], [0.1, 0.4]], x_values=(5, 2),
                      y_values=(0, 1))
        gx = x_grades(j)
        assert gx == pytest.approx([0.75, 0.25])


class TestSpearman:
    def test_binary_equals_pearson(self):
        # binary grades are affine in the indicators
        assert spearman(dsbs()) == pytest.approx(0.6, abs=1e-12)

    def test_independent(self):
        j = joint_pmf(np.outer([0.3, 0.7], [0.6, 0.4]),
                      x_values=(0, 1), y_values=(0, 1))
        assert spearman(j) == pytest.approx(0.0, abs=1e-12)

    def test_concordant_diagonal(self):
        j = joint_pmf(np.diag([0.2, 0.3, 0.5]), x_values=(0, 1, 2),
                      y_values=(0, 1, 2))
        assert spearman(j) == pytest.approx(1.0, abs=1e-12)

    def test_reembedding_invariance_exact(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            raw = rng.dirichlet(np.ones(12)).reshape(3, 4)
            j = joint_pmf(raw, x_values=(0, 1, 2), y_values=(0, 1, 2, 3))
            j2 = joint_pmf(raw,
                           x_values=tuple(np.exp(v) for v in j.x_values),
                           y_values=tuple(v ** 3 + 2 * v for v in j.y_values))
            assert spearman(j2) == spearman(j)


class TestKendall:
    def test_perfect_concordance(self):
        j = joint_pmf([[0.5, 0], [0, 0.5]], x_values=(0, 1), y_values=(0, 1))
        assert kendall_tau_b(j) == pytest.approx(1.0, abs=1e-12)

    def test_independent(self):
        j = joint_pmf(np.outer([0.4, 0.6], [0.5, 0.5]),
                      x_values=(0, 1), y_values=(0, 1))
        assert kendall_tau_b(j) == pytest.approx(0.0, abs=1e-12)

    def test_sixteen_outcome_enumeration(self):
        j = dsbs()
        assert kendall_tau_b(j) == pytest.approx(0.6, abs=1e-12)
        assert kendall_tau_b(j) == pytest.approx(brute_kendall(j), abs=1e-13)

    def test_matches_brute_force_random(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            j = random_pmf(rng, 3, 3)
            assert kendall_tau_b(j) == pytest.approx(
                brute_kendall(j), abs=1e-12)

    def test_reembedding_invariance_exact(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            raw = rng.dirichlet(np.ones(12)).reshape(4, 3)
            j = joint_pmf(raw, x_values=(0, 1, 2, 3), y_values=(0, 1, 2))
            j2 = joint_pmf(raw,
                           x_values=tuple(10 * v + 1 for v in j.x_values),
                           y_values=tuple(np.tanh(v) for v in j.y_values))
            assert kendall_tau_b(j2) == kendall_tau_b(j)

    def test_tied_values_signed_zero(self):
        # labels stay distinct but the embedding ties two y symbols
        j = joint_pmf([[0.2, 0.1, 0.1], [0.1, 0.3, 0.2]],
                      x_values=(0, 1), y_values=(0, 0, 1))
        gy = y_grades(j)
        assert gy[0] == gy[1]  # tied symbols share a mid-grade
        # tau-b and Spearman agree here: both sides are effectively binary
        assert kendall_tau_b(j) == pytest.approx(spearman(j), abs=1e-12)

    def test_all_tied_raises(self):
        j = joint_pmf(DSBS, x_values=(1, 1), y_values=(0, 1))
        with pytest.raises(ZeroVariance):
            kendall_tau_b(j)


class TestPairRankCorrelation:
    def test_sign_comparator_is_kendall(self):
        j = dsbs()
        got = pair_rank_correlation(j, sign_comparator(j.x_values),
                                    sign_comparator(j.y_values))
        assert got == pytest.approx(kendall_tau_b(j), abs=1e-12)

    def test_sign_comparator_matches_kendall_random(self):
        rng = np.random.default_rng(10)
        for _ in range(100):
            m, n = rng.integers(2, 5, size=2)
            j = random_pmf(rng, int(m), int(n))
            got = pair_rank_correlation(j, sign_comparator(j.x_values),
                                        sign_comparator(j.y_values))
            assert got == pytest.approx(kendall_tau_b(j), abs=1e-12)

    def test_grade_difference_is_spearman(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            j = random_pmf(rng, 3, 3)
            got = pair_rank_correlation(
                j,
                difference_comparator(x_grades(j)),
                difference_comparator(y_grades(j)),
            )
            assert got == pytest.approx(spearman(j), abs=1e-12)

    def test_independent_gives_zero(self):
        j = joint_pmf(np.outer([0.3, 0.7], [0.6, 0.4]),
                      x_values=(0, 1), y_values=(0, 1))
        got = pair_rank_correlation(j, sign_comparator(j.x_values),
                                    sign_comparator(j.y_values))
        assert got == pytest.approx(0.0, abs=1e-12)

    def test_bad_comparator_rejected(self):
        j = dsbs()
        bad = difference_comparator([1.0, 0.0])  # decreasing in first arg
        with pytest.raises(NotMonotoneComparator):
            pair_rank_correlation(j, bad, sign_comparator(j.y_values))


class TestRange:
    def test_all_measures_in_unit_interval(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            m, n = rng.integers(2, 5, size=2)
            j = random_pmf(rng, int(m), int(n))
            for value in (pearson(j), spearman(j), kendall_tau_b(j)):
                assert -1.0 - 1e-9 <= value <= 1.0 + 1e-9
