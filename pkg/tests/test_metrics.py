import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kpathnet.community import CoverPartition, Partition
from kpathnet.errors import DomainError
from kpathnet.kpath import WalkConfig, werw_kpath
from kpathnet.metrics import (centrality_summary, confusion_matrix, correlation_report,
                              kendall_tau, nmi, paired_ttest, pearson, spearman)

from conftest import random_graph


def test_confusion_matrix():
    cm = confusion_matrix([0, 0, 1, 1], [0, 0, 0, 1])
    assert cm.tolist() == [[2, 0], [1, 1]]


def test_nmi_hand_value():
    # A = {12}{34}, B = {123}{4}; N = [[2, 0], [1, 1]]
    n = 4.0
    num = -2 * (2 * math.log(2 * n / (2 * 3)) + 1 * math.log(1 * n / (2 * 3))
                + 1 * math.log(1 * n / (2 * 1)))
    den = (2 * 2 * math.log(2 / n)) + (3 * math.log(3 / n) + 1 * math.log(1 / n))
    assert nmi([0, 0, 1, 1], [0, 0, 0, 1]) == pytest.approx(num / den, abs=1e-14)


def test_nmi_endpoints():
    assert nmi([0, 1, 1, 2], [5, 3, 3, 9]) == 1.0
    assert nmi([0, 0, 0, 0], [0, 0, 1, 1]) == 0.0
    assert nmi([0, 0, 0], [1, 1, 1]) == 1.0


def test_nmi_accepts_covers():
    cover = CoverPartition(({1: 1.0}, {1: 1.0}, {2: 1.0}))
    assert nmi(cover, Partition.from_labels([0, 0, 1])) == 1.0


def test_nmi_size_mismatch():
    with pytest.raises(DomainError):
        nmi([0, 1], [0, 1, 2])


labelings = st.integers(2, 40).flatmap(
    lambda n: st.tuples(st.lists(st.integers(0, 5), min_size=n, max_size=n),
                        st.lists(st.integers(0, 5), min_size=n, max_size=n)))


@settings(max_examples=200, deadline=None)
@given(labelings)
def test_nmi_symmetric_and_bounded(pair):
    a, b = pair
    x = nmi(a, b)
    assert abs(x - nmi(b, a)) < 1e-12
    assert 0.0 <= x <= 1.0


def test_pearson_and_spearman_known():
    x = [1, 2, 3, 4, 5]
    assert pearson(x, [2, 4, 6, 8, 10]) == pytest.approx(1.0)
    assert spearman(x, [1, 4, 9, 16, 100]) == pytest.approx(1.0)
    assert spearman(x, [5, 4, 3, 2, 1]) == pytest.approx(-1.0)
    with pytest.raises(DomainError):
        pearson([1, 1, 1], [1, 2, 3])


def test_spearman_with_ties_matches_scipy():
    from scipy import stats
    rng = np.random.default_rng(0)
    x = rng.integers(0, 5, 60)
    y = x + rng.integers(0, 3, 60)
    assert spearman(x, y) == pytest.approx(stats.spearmanr(x, y).statistic, abs=1e-12)


def _tau_a_brute(x, y):
    s = 0
    for i, j in itertools.combinations(range(len(x)), 2):
        s += np.sign(x[i] - x[j]) * np.sign(y[i] - y[j])
    return s / (len(x) * (len(x) - 1) / 2)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), min_size=2, max_size=30))
def test_kendall_tau_a_matches_brute_force(pairs):
    x, y = (np.array(v, dtype=float) for v in zip(*pairs))
    assert kendall_tau(x, y) == pytest.approx(_tau_a_brute(x, y), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-1000, 1000), min_size=3, max_size=30),
       st.lists(st.integers(-1000, 1000), min_size=3, max_size=30))
def test_kendall_invariant_under_monotone_maps(x, y):
    k = min(len(x), len(y))
    x, y = np.array(x[:k], dtype=float), np.array(y[:k], dtype=float)
    tau = kendall_tau(x, y)
    assert kendall_tau(x ** 3, y * 3 + 1) == pytest.approx(tau, abs=1e-12)
    assert kendall_tau(-x, y) == pytest.approx(-tau, abs=1e-12)


def test_correlation_report():
    rng = np.random.default_rng(3)
    x = rng.normal(size=200)
    r = correlation_report(x, x + rng.normal(scale=0.5, size=200))
    d = r.as_dict()
    assert d["n"] == 200 and r.pearson > 0.8 and r.p_pearson < 1e-10
    assert set(d["p_values"]) == {"pearson", "spearman", "kendall"}


def test_centrality_summary():
    g = random_graph(np.random.default_rng(0), 80, 0.1)
    c = werw_kpath(g, WalkConfig(kappa=10, seed=1))
    s = centrality_summary(c, bins=10)
    assert len(s.bin_edges) == 11
    pos = int((c.estimate > 0).sum())
    assert s.probability.sum() == pytest.approx(1.0)
    assert np.all(np.diff(s.ranked) <= 0) and len(s.ranked) == g.edge_count
    assert pos > 0 and all(p > 0 for _, p in s.nonempty_bins())


def test_paired_ttest():
    assert paired_ttest([1, 2, 3], [1, 2, 3]) == 1.0
    p = paired_ttest([1.0, 2.1, 3.2, 4.0], [0.5, 1.4, 2.9, 3.1])
    assert 0 < p < 0.05
    with pytest.raises(DomainError):
        paired_ttest([1], [2])
