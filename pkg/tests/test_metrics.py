import itertools
from collections import Counter
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.discovery import initialize
from src.core.graph import DynamicPag, EdgeMark, representative_pairs
from src.core.metrics import (Confusion, causal_accuracy, fnr, fpr, icd_bound, median_mad, pair_universe_size,
                              precision, recall, score, skeleton_confusion, skeleton_f1, tsicd_bound)
from tests.conftest import tn

PAIRS = representative_pairs(3, 2)


def graph_with(pairs, n=3, w=2) -> DynamicPag:
    g = DynamicPag(n, w)
    for u, v in pairs:
        g.add_edge_homologous(u, v)
    return g


class TestConfusion:
    def test_identical_graphs(self):
        g = graph_with(PAIRS[:4])
        assert skeleton_confusion(g, g.copy()) == Confusion(4, 0, 0, 17)

    def test_edgeless_learned_graph(self):
        truth = graph_with(PAIRS[:4])
        assert skeleton_confusion(truth, DynamicPag(3, 2)) == Confusion(0, 0, 4, 17)

    def test_universe_size(self):
        assert pair_universe_size(3, 2) == 21
        assert pair_universe_size(5, 3) == comb(5, 2) + 75

    def test_different_windows(self):
        with pytest.raises(ValueError):
            skeleton_confusion(DynamicPag(3, 2), DynamicPag(3, 1))

    @settings(max_examples=40, deadline=None)
    @given(st.sets(st.sampled_from(PAIRS)), st.sets(st.sampled_from(PAIRS)))
    def test_agrees_with_pairwise_comparison(self, true_pairs, learned_pairs):
        truth, learned = graph_with(true_pairs), graph_with(learned_pairs)
        expected = Counter()
        for u, v in PAIRS:
            expected[(truth.is_adjacent(u, v), learned.is_adjacent(u, v))] += 1
        c = skeleton_confusion(truth, learned)
        assert c == Confusion(expected[(True, True)], expected[(False, True)],
                              expected[(True, False)], expected[(False, False)])


class TestRates:
    def test_one_of_each(self):
        c = Confusion(1, 1, 1, 0)
        assert skeleton_f1(c) == pytest.approx(0.5)
        assert precision(c) == pytest.approx(0.5)
        assert recall(c) == pytest.approx(0.5)

    def test_perfect(self):
        c = Confusion(5, 0, 0, 16)
        assert skeleton_f1(c) == precision(c) == recall(c) == 1.0
        assert fpr(c) == fnr(c) == 0.0

    def test_everything_missed(self):
        c = Confusion(0, 0, 3, 18)
        assert recall(c) == 0.0
        assert fnr(c) == 1.0
        assert skeleton_f1(c) == 0.0

    def test_both_graphs_empty(self):
        c = Confusion(0, 0, 0, 21)
        assert skeleton_f1(c) == 1.0
        assert fnr(c) == 0.0

    def test_false_positive_rate(self):
        assert fpr(Confusion(2, 3, 0, 7)) == pytest.approx(0.3)


class TestCausalAccuracy:
    def test_identical(self):
        g = initialize(2, 1)
        assert causal_accuracy(g, g.copy()) == 1.0

    def test_edgeless_learned(self):
        assert causal_accuracy(initialize(2, 1), DynamicPag(2, 1)) == 0.0

    def test_one_wrong_mark(self):
        truth = DynamicPag(2, 1)
        truth.add_edge_homologous(tn(0, 1), tn(1, 0))
        truth.add_edge_homologous(tn(0, 0), tn(1, 0))
        learned = truth.copy()
        learned.set_mark_homologous((tn(0, 0), tn(1, 0)), tn(1, 0), EdgeMark.HEAD)
        assert causal_accuracy(truth, learned) == pytest.approx(0.5)

    def test_edgeless_truth(self):
        assert causal_accuracy(DynamicPag(2, 1), initialize(2, 1)) == 1.0

    def test_score_keys(self):
        g = initialize(2, 1)
        assert set(score(g, g)) == {"skeleton_f1", "precision", "recall", "fpr", "fnr", "causal_accuracy"}


class TestBounds:
    @pytest.mark.parametrize("n,tau,r,expected", [(5, 3, 0, 100), (5, 3, 1, 1800), (2, 1, 2, 8)])
    def test_icd_bound(self, n, tau, r, expected):
        assert icd_bound(n, tau, r) == expected

    def test_icd_bound_range(self):
        with pytest.raises(ValueError):
            icd_bound(2, 1, 3)
        with pytest.raises(ValueError):
            icd_bound(2, 1, -1)

    @pytest.mark.parametrize("rho", [0.1, 0.4, 0.9])
    def test_marginal_bound_ignores_rho(self, rho):
        assert tsicd_bound(5, 3, 0, rho) == 4 * 25
        assert tsicd_bound(5, 3, 0, rho, generalized=True) == pytest.approx(4 * 25)

    def test_no_removed_edges_gives_icd_bound(self):
        for r in range(4):
            assert tsicd_bound(5, 3, r, 0.99) == icd_bound(5, 3, r)

    def test_fewer_tests_than_icd(self):
        assert tsicd_bound(5, 3, 2, 0.4) < icd_bound(5, 3, 2)

    def test_rounded_sizes(self):
        # l = 1, 2, 3: l * 0.4 * 5 = 2, 4, 6
        expected = 25 * sum(comb((4 - l) * 5 + 2 * l - 2, 2) for l in range(4))
        assert tsicd_bound(5, 3, 2, 0.4) == expected

    def test_generalized_binomial(self):
        exact = tsicd_bound(5, 3, 2, 0.3)
        smooth = tsicd_bound(5, 3, 2, 0.3, generalized=True)
        assert smooth != exact
        assert smooth == pytest.approx(exact, rel=0.1)

    def test_invalid_rho(self):
        with pytest.raises(ValueError):
            tsicd_bound(5, 3, 1, 1.5)
        with pytest.raises(ValueError):
            tsicd_bound(5, 3, -1, 0.5)

    def test_bounds_grow_with_condition_size_at_first(self):
        values = [tsicd_bound(5, 3, r, 0.4) for r in range(4)]
        assert values == sorted(values)
        for r, value in enumerate(values):
            assert value <= icd_bound(5, 3, r)


class TestMedianMad:
    @pytest.mark.parametrize("values,expected", [([1, 2, 3], (2.0, 2 / 3)), ([5], (5.0, 0.0)),
                                                 ([1, 2, 3, 4], (2.5, 1.0))])
    def test_examples(self, values, expected):
        assert median_mad(values) == pytest.approx(expected)

    def test_empty(self):
        with pytest.raises(ValueError):
            median_mad([])

    def test_order_does_not_matter(self):
        values = [3.0, 1.0, 4.0, 1.0, 5.0]
        assert median_mad(values) == median_mad(sorted(values))


def test_every_pair_class_is_counted_once():
    pairs = {frozenset(p) for p in PAIRS}
    assert len(pairs) == pair_universe_size(3, 2)
    for u, v in itertools.combinations(DynamicPag(3, 2).nodes, 2):
        if min(u.lag, v.lag) == 0:
            assert frozenset((u, v)) in pairs
