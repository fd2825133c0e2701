from math import comb

import pytest

from src.core.discovery import initialize
from src.core.graph import (Dag, DynamicMag, DynamicPag, EdgeMark, FixedOrientationError, Mag, Pag, TimedNode,
                            describe_conflict, format_marks, homology_set, parse_marks, representative,
                            representative_pairs)
from tests.conftest import tn


class TestHomology:
    def test_temporal_pair_shifts_inside_window(self):
        assert homology_set((tn(0, 1), tn(1, 0)), 2) == {(tn(0, 1), tn(1, 0)), (tn(0, 2), tn(1, 1))}

    def test_contemporaneous_pair_covers_every_slice(self):
        assert homology_set((tn(0, 0), tn(1, 0)), 2) == {(tn(0, k), tn(1, k)) for k in range(3)}

    def test_longest_lag_is_alone_in_its_class(self):
        assert homology_set((tn(0, 2), tn(1, 0)), 2) == {(tn(0, 2), tn(1, 0))}

    def test_pair_outside_window_is_rejected(self):
        with pytest.raises(ValueError):
            homology_set((tn(0, 3), tn(1, 0)), 2)

    def test_representative_has_zero_minimal_lag(self):
        assert representative((tn(0, 2), tn(1, 1))) == (tn(0, 1), tn(1, 0))


class TestDynamicPag:
    def test_remove_temporal_edge_removes_shifted_copy(self):
        g = initialize(2, 2)
        g.remove_edge_homologous((tn(0, 1), tn(1, 0)))
        assert not g.is_adjacent(tn(0, 1), tn(1, 0))
        assert not g.is_adjacent(tn(0, 2), tn(1, 1))
        assert g.is_homology_consistent()

    def test_remove_contemporaneous_edge_in_every_slice(self):
        g = initialize(2, 1)
        g.remove_edge_homologous((tn(0, 0), tn(1, 0)))
        assert not g.is_adjacent(tn(0, 0), tn(1, 0))
        assert not g.is_adjacent(tn(0, 1), tn(1, 1))

    def test_remove_longest_lag_edge_touches_one_edge(self):
        g = initialize(2, 2)
        before = g.edge_count()
        g.remove_edge_homologous((tn(0, 2), tn(1, 0)))
        assert g.edge_count() == before - 1

    def test_remove_missing_edge(self):
        g = DynamicPag(2, 1)
        g.remove_edge_homologous((tn(0, 1), tn(1, 0)))
        with pytest.raises(KeyError):
            g.remove_edge_homologous((tn(0, 1), tn(1, 0)), strict=True)

    def test_set_mark_propagates_to_homologous_edges(self):
        g = initialize(2, 2)
        g.set_mark_homologous((tn(0, 1), tn(1, 0)), tn(0, 1), EdgeMark.TAIL)
        assert g.mark_at(tn(0, 1), tn(1, 0)) == EdgeMark.TAIL
        assert g.mark_at(tn(0, 2), tn(1, 1)) == EdgeMark.TAIL
        assert g.is_homology_consistent()

    def test_later_endpoint_of_temporal_edge_is_fixed(self):
        g = initialize(2, 2)
        with pytest.raises(FixedOrientationError):
            g.set_mark_homologous((tn(0, 1), tn(1, 0)), tn(1, 0), EdgeMark.TAIL)
        with pytest.raises(FixedOrientationError):
            g.set_mark(tn(1, 0), tn(0, 1), EdgeMark.CIRCLE)

    def test_contemporaneous_head_propagates(self):
        g = initialize(2, 2)
        g.set_mark_homologous((tn(0, 0), tn(1, 0)), tn(0, 0), EdgeMark.HEAD)
        for k in range(3):
            assert g.mark_at(tn(0, k), tn(1, k)) == EdgeMark.HEAD
            assert g.mark_at(tn(1, k), tn(0, k)) == EdgeMark.CIRCLE

    def test_endpoint_must_belong_to_pair(self):
        g = initialize(2, 1)
        with pytest.raises(ValueError):
            g.set_mark_homologous((tn(0, 1), tn(1, 0)), tn(1, 1), EdgeMark.TAIL)

    def test_self_loop_is_rejected(self):
        with pytest.raises(ValueError):
            DynamicPag(2, 1).add_edge_homologous(tn(0, 0), tn(0, 0))

    @pytest.mark.parametrize("n,w,expected", [(3, 2, 21), (5, 3, 85), (2, 1, 5)])
    def test_minimal_edge_set_of_complete_graph(self, n, w, expected):
        assert len(initialize(n, w).minimal_edges()) == expected == comb(n, 2) + w * n * n

    def test_minimal_edge_set_of_edgeless_graph(self):
        assert DynamicPag(3, 2).minimal_edges() == []

    def test_minimal_edges_touch_present_slice(self):
        for edge in initialize(3, 2).minimal_edges():
            assert min(edge.a.lag, edge.b.lag) == 0

    def test_canonical_order_puts_older_node_first(self):
        g = DynamicPag(2, 1)
        assert g.canonical_pair(tn(1, 0), tn(0, 1)) == (tn(0, 1), tn(1, 0))
        assert g.canonical_pair(tn(1, 0), tn(0, 0)) == (tn(0, 0), tn(1, 0))

    def test_sepset_is_shifted_with_the_pair(self):
        g = DynamicPag(3, 2)
        g.record_sepset((tn(0, 1), tn(1, 1)), [tn(2, 1), tn(2, 2)])
        assert g.get_sepset(tn(0, 0), tn(1, 0)) == frozenset({tn(2, 0), tn(2, 1)})
        assert g.get_sepset(tn(1, 1), tn(0, 1)) == frozenset({tn(2, 1), tn(2, 2)})
        assert g.get_sepset(tn(0, 2), tn(1, 2)) == frozenset({tn(2, 2)})
        assert g.get_sepset(tn(0, 0), tn(2, 0)) is None

    def test_copy_is_independent(self):
        g = initialize(2, 1)
        clone = g.copy()
        clone.remove_edge_homologous((tn(0, 1), tn(1, 0)))
        assert g.is_adjacent(tn(0, 1), tn(1, 0))
        assert clone != g

    def test_format_prints_representatives(self):
        g = DynamicPag(2, 1)
        g.add_edge_homologous(tn(0, 1), tn(1, 0))
        assert g.format(["A", "B"]) == "A(t-1) o-> B(t)"


class TestInitialize:
    def test_complete_graph_for_two_variables(self):
        g = initialize(2, 1)
        assert len(g.nodes) == 4
        assert g.edge_count() == comb(4, 2)

    def test_temporal_edges_point_forward_in_time(self):
        g = initialize(3, 2)
        assert g.temporal_heads_hold()
        for edge in g.edges():
            if edge.a.lag == edge.b.lag:
                assert (edge.mark_at_a, edge.mark_at_b) == (EdgeMark.CIRCLE, EdgeMark.CIRCLE)
            else:
                assert (edge.mark_at_a, edge.mark_at_b) == (EdgeMark.CIRCLE, EdgeMark.HEAD)

    def test_invalid_sizes(self):
        with pytest.raises(ValueError):
            initialize(1, 2)
        with pytest.raises(ValueError):
            initialize(2, 0)

    def test_representative_pairs_enumerate_every_class(self):
        pairs = representative_pairs(3, 2)
        assert len(pairs) == len(set(pairs)) == 21
        assert pairs[0] == (tn(0, 2), tn(0, 0))
        assert pairs[-1] == (tn(1, 0), tn(2, 0))


class TestMarks:
    @pytest.mark.parametrize("symbol", ["o->", "<->", "-->", "o-o", "<-o", "o--"])
    def test_symbols(self, symbol):
        assert format_marks(*parse_marks(symbol)) == symbol

    @pytest.mark.parametrize("symbol", ["", "o>", "x->", "o=>"])
    def test_bad_symbols(self, symbol):
        with pytest.raises(ValueError):
            parse_marks(symbol)

    def test_describe_conflict(self):
        text = describe_conflict((tn(0, 1), tn(1, 0), EdgeMark.TAIL), ["X", "Y"])
        assert text == "X(t-1) на ребре X(t-1) - Y(t): отклонена TAIL"


class TestMag:
    def test_circle_marks_are_rejected(self):
        m = Mag("ab")
        with pytest.raises(ValueError):
            m.add_edge("a", "b", EdgeMark.CIRCLE, EdgeMark.HEAD)

    def test_ancestors_follow_directed_edges(self):
        m = Mag("abcd")
        m.add_edge("a", "b")
        m.add_edge("b", "c")
        m.add_edge("d", "c", EdgeMark.HEAD, EdgeMark.HEAD)
        assert m.ancestors(["c"]) == {"a", "b", "c"}
        assert m.is_ancestral()

    def test_almost_directed_cycle_is_not_ancestral(self):
        m = Mag("abc")
        m.add_edge("a", "b")
        m.add_edge("b", "c")
        m.add_edge("a", "c", EdgeMark.HEAD, EdgeMark.HEAD)
        assert not m.is_ancestral()

    def test_single_directed_edge_is_ancestral(self):
        m = Mag("ab")
        m.add_edge("a", "b")
        assert m.is_ancestral()

    def test_directed_cycle_is_not_ancestral(self):
        m = Mag("abc")
        m.add_edge("a", "b")
        m.add_edge("b", "c")
        m.add_edge("c", "a")
        assert not m.is_ancestral()

    def test_dynamic_mag_lists_older_endpoint_first(self):
        m = DynamicMag(2, 1)
        m.add_edge(tn(1, 1), tn(0, 0))
        m.add_edge(tn(1, 0), tn(0, 0), EdgeMark.HEAD, EdgeMark.HEAD)
        g = DynamicPag(2, 1)
        g.add_edge_homologous(tn(1, 1), tn(0, 0))
        g.add_edge(tn(1, 0), tn(0, 0))
        assert [(e.a, e.b) for e in m.edges()] == [(e.a, e.b) for e in g.edges()]
        assert [(e.a, e.b) for e in m.edges()] == [(tn(1, 1), tn(0, 0)), (tn(0, 0), tn(1, 0))]

    def test_relabel(self):
        m = Mag([1, 2])
        m.add_edge(1, 2)
        relabeled = m.relabel({1: TimedNode(0, 1), 2: TimedNode(1, 0)})
        assert relabeled.is_parent(TimedNode(0, 1), TimedNode(1, 0))


class TestDag:
    def test_cycle_is_rejected(self):
        with pytest.raises(ValueError):
            Dag("ab", [("a", "b"), ("b", "a")])

    def test_unknown_latent(self):
        with pytest.raises(KeyError):
            Dag("ab", [("a", "b")], latent=["c"])

    def test_observed_nodes(self):
        g = Dag("abc", [("a", "b"), ("c", "b")], latent=["c"])
        assert g.observed == ["a", "b"]
        assert g.ancestors(["b"]) == {"a", "b", "c"}


def test_generic_pag_equality_ignores_node_order():
    first, second = Pag("ab"), Pag("ba")
    first.add_edge("a", "b", EdgeMark.TAIL, EdgeMark.HEAD)
    second.add_edge("b", "a", EdgeMark.HEAD, EdgeMark.TAIL)
    assert first == second
