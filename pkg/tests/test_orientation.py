from src.core.graph import DynamicPag, EdgeMark, Pag
from src.core.orientation import OrientationEngine, orient
from tests.conftest import tn

CIRCLE, HEAD, TAIL = EdgeMark.CIRCLE, EdgeMark.HEAD, EdgeMark.TAIL


def skeleton(nodes, pairs) -> Pag:
    g = Pag(nodes)
    for u, v in pairs:
        g.add_edge(u, v)
    return g


def test_unshielded_collider():
    g = orient(skeleton("xyz", ["xy", "yz"]), {("x", "z"): set()})
    assert g.mark_at("y", "x") == HEAD
    assert g.mark_at("y", "z") == HEAD
    assert g.mark_at("x", "y") == CIRCLE
    assert g.mark_at("z", "y") == CIRCLE
    assert g.conflicts == []


def test_separating_middle_node_is_not_a_collider():
    g = orient(skeleton("xyz", ["xy", "yz"]), {("x", "z"): {"y"}})
    assert all(e.mark_at_a == e.mark_at_b == CIRCLE for e in g.edges())


def test_missing_sepset_leaves_triple_unoriented():
    g = orient(skeleton("xyz", ["xy", "yz"]), {})
    assert all(e.mark_at_a == e.mark_at_b == CIRCLE for e in g.edges())


def test_arrow_propagates_away_from_collider():
    g = orient(skeleton("xwyz", ["xy", "wy", "yz"]),
               {("x", "w"): set(), ("x", "z"): {"y"}, ("w", "z"): {"y"}})
    assert g.mark_at("y", "x") == HEAD
    assert g.mark_at("y", "w") == HEAD
    assert g.is_parent("y", "z")


def test_directed_path_orients_shortcut():
    g = skeleton("abc", ["ab", "bc", "ac"])
    g.set_mark("a", "b", TAIL)
    g.set_mark("b", "a", HEAD)
    g.set_mark("c", "b", HEAD)
    assert OrientationEngine(g)._rule2()
    assert g.mark_at("c", "a") == HEAD
    assert g.mark_at("a", "c") == CIRCLE


def test_orientation_is_rerun_from_scratch():
    g = skeleton("xyz", ["xy", "yz"])
    orient(g, {("x", "z"): set()})
    orient(g, {("x", "z"): {"y"}})
    assert all(e.mark_at_a == e.mark_at_b == CIRCLE for e in g.edges())


def test_discriminating_path_with_middle_in_sepset():
    # <d, a, b, c>: a - коллайдер и родитель c, d и c несмежны
    g = skeleton("dabc", ["da", "ab", "bc", "ac"])
    g.add_edge("d", "a", CIRCLE, HEAD)
    engine = OrientationEngine(g)
    g.set_mark("a", "b", HEAD)
    g.set_mark("a", "c", TAIL)
    g.set_mark("c", "a", HEAD)
    g.record_sepset(("d", "c"), {"a", "b"})
    assert engine._discriminating_start("a", "b", "c") == "d"
    assert engine._rule4()
    assert g.is_parent("b", "c")


def test_discriminating_path_without_middle_in_sepset():
    g = skeleton("dabc", ["da", "ab", "bc", "ac"])
    g.add_edge("d", "a", CIRCLE, HEAD)
    g.set_mark("a", "b", HEAD)
    g.set_mark("a", "c", TAIL)
    g.set_mark("c", "a", HEAD)
    g.record_sepset(("d", "c"), {"a"})
    assert OrientationEngine(g)._rule4()
    assert g.mark_at("b", "a") == HEAD
    assert g.mark_at("b", "c") == HEAD
    assert g.mark_at("c", "b") == HEAD


def test_apply_keeps_first_mark_and_records_conflict():
    g = skeleton("xyz", ["xy", "yz"])
    g.set_mark("y", "x", HEAD)
    engine = OrientationEngine(g)
    assert not engine._apply([("y", "x", TAIL), ("y", "z", HEAD)])
    assert g.mark_at("y", "x") == HEAD
    assert g.mark_at("y", "z") == CIRCLE
    assert ("y", "x", TAIL) in engine._conflicts


def test_apply_same_mark_is_not_a_conflict():
    g = skeleton("xy", ["xy"])
    g.set_mark("y", "x", HEAD)
    engine = OrientationEngine(g)
    assert not engine._apply([("y", "x", HEAD)])
    assert not engine._conflicts


def test_dynamic_graph_keeps_temporal_heads_and_homology():
    g = DynamicPag(2, 2)
    g.add_edge_homologous(tn(0, 1), tn(0, 0))
    g.add_edge_homologous(tn(0, 1), tn(1, 0))
    g.record_sepset((tn(0, 0), tn(1, 0)), {tn(0, 1)})
    g.record_sepset((tn(0, 2), tn(0, 0)), {tn(0, 1)})
    g.record_sepset((tn(0, 2), tn(1, 0)), {tn(0, 1)})
    orient(g)
    assert g.temporal_heads_hold()
    assert g.is_homology_consistent()
    assert g.is_parent(tn(0, 1), tn(0, 0))
    assert g.is_parent(tn(0, 1), tn(1, 0))


def test_dynamic_conflicts_are_reported_on_representatives():
    g = DynamicPag(2, 1)
    g.add_edge_homologous(tn(0, 0), tn(1, 0))
    engine = OrientationEngine(g)
    g.set_mark_homologous((tn(0, 0), tn(1, 0)), tn(0, 0), HEAD)
    engine._apply([(tn(0, 1), tn(1, 1), TAIL)])
    assert engine._conflicts == {(tn(0, 0), tn(1, 0), TAIL)}
