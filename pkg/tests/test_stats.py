import math
from itertools import permutations

import numpy as np
import pytest
from scipy.stats import t as t_dist

from gramdisp.errors import DegenerateSample, DomainError, NoPositives
from gramdisp.stats import (
    PairedSample,
    average_precision,
    expected_average_precision,
    fisher_z,
    midranks,
    normal_cdf,
    rank_by_score,
    rho_t_test_p,
    spearman_rho,
    steiger_z,
    student_t_cdf,
)


def brute_force_ap(labels):
    precisions = []
    for k, label in enumerate(labels, start=1):
        if label:
            precisions.append(sum(labels[:k]) / k)
    return sum(precisions) / len(precisions)


def test_midranks_ties():
    assert list(midranks([10, 20, 20, 30])) == [1.0, 2.5, 2.5, 4.0]
    assert list(midranks([1, 1, 1])) == [2.0, 2.0, 2.0]


def test_midranks_rejects_bad_input():
    with pytest.raises(DomainError):
        midranks([])
    with pytest.raises(DomainError):
        midranks([1.0, float("nan")])


def test_spearman_with_ties():
    assert spearman_rho(PairedSample([10, 20, 20, 30], [1, 2, 3, 4])) == pytest.approx(0.948683, abs=1e-6)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_spearman_closed_form_without_ties(n):
    y = list(range(1, n + 1))
    for x in permutations(y):
        d2 = sum((a - b) ** 2 for a, b in zip(x, y))
        expected = 1 - 6 * d2 / (n * (n * n - 1))
        assert spearman_rho(PairedSample(x, y)) == pytest.approx(expected, abs=1e-12)


def test_spearman_rank_invariance():
    rng = np.random.default_rng(3)
    x = rng.normal(size=40)
    y = rng.integers(1, 5, size=40)
    rho = spearman_rho(PairedSample(x, y))
    assert spearman_rho(PairedSample(np.exp(x), y)) == rho
    assert spearman_rho(PairedSample(3 * x + 1, y)) == rho


def test_spearman_degenerate_and_small():
    with pytest.raises(DegenerateSample):
        spearman_rho(PairedSample([5, 5, 5], [1, 2, 3]))
    with pytest.raises(DomainError):
        spearman_rho(PairedSample([1, 2], [1, 2]))


def test_paired_sample_lengths():
    with pytest.raises(DomainError):
        PairedSample([1, 2, 3], [1, 2])


def test_t_test_p_table_value():
    # rho giving t = 2 at df = 10
    rho = 2 / math.sqrt(10 + 4)
    assert rho_t_test_p(rho, 12) == pytest.approx(0.0734, abs=1e-3)


@pytest.mark.parametrize("rho", [0.42, 0.46])
def test_t_test_p_significant_for_real_test_set_size(rho):
    assert rho_t_test_p(rho, 206) < 0.01


def test_t_test_p_edges():
    assert rho_t_test_p(0.0, 50) == pytest.approx(1.0)
    assert rho_t_test_p(1.0, 10) == 0.0
    assert rho_t_test_p(-1.0, 10) == 0.0
    with pytest.raises(DomainError):
        rho_t_test_p(0.5, 2)
    with pytest.raises(DomainError):
        rho_t_test_p(1.5, 20)


def test_t_test_p_monotone():
    ps = [rho_t_test_p(r, 30) for r in np.linspace(0.0, 0.95, 20)]
    assert all(a > b for a, b in zip(ps, ps[1:]))
    ns = [rho_t_test_p(0.3, n) for n in range(5, 60, 5)]
    assert all(a > b for a, b in zip(ns, ns[1:]))


def test_student_t_cdf():
    assert student_t_cdf(2.0, 10) == pytest.approx(1 - 0.0734 / 2, abs=1e-3)
    for df in (1, 2, 5, 30, 1000):
        assert student_t_cdf(0.0, df) == pytest.approx(0.5)
    for t in (-2.5, -1.0, 0.3, 1.7):
        assert student_t_cdf(t, 1000) == pytest.approx(normal_cdf(t), abs=1e-3)
    assert student_t_cdf(float("inf"), 3) == 1.0
    with pytest.raises(DomainError):
        student_t_cdf(1.0, 0)


@pytest.mark.parametrize("t", [-40.0, -3.0, -1.0, -0.25, 0.5, 2.0, 12.0])
def test_student_t_cdf_closed_forms(t):
    assert student_t_cdf(t, 1) == pytest.approx(0.5 + math.atan(t) / math.pi, abs=1e-8)
    assert student_t_cdf(t, 2) == pytest.approx(0.5 + t / (2 * math.sqrt(2 + t * t)), abs=1e-8)
    u = t / math.sqrt(3)
    assert student_t_cdf(t, 3) == pytest.approx(0.5 + (u / (1 + u * u) + math.atan(u)) / math.pi, abs=1e-8)
    for df in (4.5, 17, 250):
        assert student_t_cdf(t, df) == pytest.approx(float(t_dist.cdf(t, df)), abs=1e-8)


def test_normal_cdf():
    assert normal_cdf(1.959964) == pytest.approx(0.975, abs=1e-5)
    assert normal_cdf(0.0) == 0.5


def test_fisher_z():
    assert fisher_z(0.0) == 0.0
    assert fisher_z(0.5) == pytest.approx(0.549306, abs=1e-6)
    with pytest.raises(DomainError):
        fisher_z(1.0)


def test_steiger_known_triple():
    result = steiger_z(0.5, 0.3, 0.6, 103)
    assert result.z_stat == pytest.approx(2.505, abs=2e-3)
    assert result.p_two_tailed == pytest.approx(0.0123, abs=2e-3)


def test_steiger_symmetry():
    a = steiger_z(0.5, 0.3, 0.6, 103)
    b = steiger_z(0.3, 0.5, 0.6, 103)
    assert b.z_stat == pytest.approx(-a.z_stat)
    assert b.p_two_tailed == pytest.approx(a.p_two_tailed)
    same = steiger_z(0.4, 0.4, 0.2, 50)
    assert same.z_stat == 0.0
    assert same.p_two_tailed == 1.0


def test_steiger_domain():
    with pytest.raises(DomainError):
        steiger_z(1.0, 0.3, 0.6, 103)
    with pytest.raises(DomainError):
        steiger_z(0.5, 0.3, 0.6, 3)


def test_average_precision_examples():
    assert average_precision([False, False, False, True]) == pytest.approx(0.25)
    assert average_precision([True, False, True]) == pytest.approx(0.833333, abs=1e-6)
    assert average_precision([True, True, False]) == 1.0
    with pytest.raises(NoPositives):
        average_precision([False, False])


def test_average_precision_against_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        n = int(rng.integers(1, 13))
        labels = [bool(v) for v in rng.integers(0, 2, size=n)]
        if not any(labels):
            labels[int(rng.integers(0, n))] = True
        items = [(f"t{i:02d}", float(s), label) for i, (s, label) in enumerate(zip(rng.integers(0, 5, size=n), labels))]
        ranked = rank_by_score(items)
        assert average_precision(ranked) == pytest.approx(brute_force_ap(ranked), abs=1e-12)


def test_rank_by_score_tie_break():
    items = [("b", 1.0, True), ("a", 1.0, False), ("c", 2.0, False)]
    assert rank_by_score(items) == [False, False, True]


def test_expected_average_precision_matches_enumeration():
    rng = np.random.default_rng(5)
    for _ in range(200):
        n = int(rng.integers(1, 7))
        scores = [float(s) for s in rng.integers(0, 3, size=n)]
        labels = [bool(v) for v in rng.integers(0, 2, size=n)]
        if not any(labels):
            labels[0] = True
        # average AP over every order consistent with the scores
        values = []
        for perm in permutations(range(n)):
            if all(scores[perm[k]] >= scores[perm[k + 1]] for k in range(n - 1)):
                values.append(brute_force_ap([labels[i] for i in perm]))
        items = [(f"t{i}", scores[i], labels[i]) for i in range(n)]
        assert expected_average_precision(items) == pytest.approx(sum(values) / len(values), abs=1e-12)


def test_expected_average_precision_without_ties_equals_ap():
    items = [("a", 3.0, True), ("b", 2.0, False), ("c", 1.0, True)]
    assert expected_average_precision(items) == pytest.approx(average_precision(rank_by_score(items)))
