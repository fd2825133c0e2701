import itertools
from typing import Callable, Hashable, Iterable, Set

import networkx as nx
import numpy as np
import pytest
from hypothesis import strategies as st

from src.core.graph import Dag, EdgeMark, Pag, TimedNode
from src.core.simulation.model import Link, SvarModel


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def ar_model() -> SvarModel:
    """Две независимые авторегрессии первого порядка."""
    return SvarModel(2, 1, [Link(0, 0, 1, 0.5), Link(1, 1, 1, 0.5)])


@pytest.fixture
def lagged_collider_model() -> SvarModel:
    """X0(t-1) -> X1(t) <- X2(t-1) без авторегрессии."""
    return SvarModel(3, 1, [Link(0, 1, 1, 0.7), Link(2, 1, 1, -0.6)])


@pytest.fixture
def confounded_model() -> SvarModel:
    """Латентная V2 одновременно влияет на V0 и V1."""
    return SvarModel(3, 1, [Link(2, 0, 0, 0.8), Link(2, 1, 0, 0.8)], latent=(2,))


def tn(var: int, lag: int) -> TimedNode:
    return TimedNode(var, lag)


@st.composite
def random_dags(draw, min_nodes: int = 3, max_nodes: int = 6, max_latent: int = 0):
    n = draw(st.integers(min_value=min_nodes, max_value=max_nodes))
    edges = [(i, j) for i, j in itertools.combinations(range(n), 2) if draw(st.booleans())]
    latent_count = draw(st.integers(min_value=0, max_value=min(max_latent, n - 2)))
    latent = draw(st.lists(st.sampled_from(range(n)), min_size=latent_count,
                           max_size=latent_count, unique=True)) if latent_count else []
    return Dag(range(n), edges, latent)


@st.composite
def random_pags(draw, min_nodes: int = 3, max_nodes: int = 6):
    n = draw(st.integers(min_value=min_nodes, max_value=max_nodes))
    g = Pag(range(n))
    marks = st.sampled_from(list(EdgeMark))
    for i, j in itertools.combinations(range(n), 2):
        if draw(st.booleans()):
            g.add_edge(i, j, draw(marks), draw(marks))
    return g


def path_separated(skeleton: nx.Graph, x: Hashable, y: Hashable, z: Set[Hashable],
                   is_collider: Callable[[Hashable, Hashable, Hashable], bool],
                   conditioned_ancestors: Set[Hashable]) -> bool:
    """Разделение перебором всех простых путей скелета."""
    for path in nx.all_simple_paths(skeleton, x, y):
        active = True
        for u, v, w in zip(path, path[1:], path[2:]):
            if is_collider(u, v, w):
                if v not in conditioned_ancestors:
                    active = False
                    break
            elif v in z:
                active = False
                break
        if active:
            return False
    return True


def brute_d_separated(g: Dag, x, y, z: Iterable) -> bool:
    z = set(z)
    return path_separated(g.graph.to_undirected(), x, y, z,
                          lambda u, v, w: g.graph.has_edge(u, v) and g.graph.has_edge(w, v),
                          g.ancestors(z) if z else set())


def pag_skeleton(g: Pag) -> nx.Graph:
    skeleton = nx.Graph()
    skeleton.add_nodes_from(g.nodes)
    skeleton.add_edges_from((e.a, e.b) for e in g.edges())
    return skeleton


def brute_possible_ancestors(g: Pag, targets: Iterable) -> Set:
    """Возможные предки через обход орграфа допустимых шагов."""
    allowed = nx.DiGraph()
    allowed.add_nodes_from(g.nodes)
    for edge in g.edges():
        if edge.mark_at_a != EdgeMark.HEAD:
            allowed.add_edge(edge.a, edge.b)
        if edge.mark_at_b != EdgeMark.HEAD:
            allowed.add_edge(edge.b, edge.a)
    result = set(targets)
    for target in list(result):
        result |= nx.ancestors(allowed, target)
    return result


def is_pds_path(g: Pag, path) -> bool:
    return all(g.is_collider(u, v, w) or g.is_adjacent(u, w) for u, v, w in zip(path, path[1:], path[2:]))
