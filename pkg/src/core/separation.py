import logging
from itertools import combinations
from typing import TYPE_CHECKING, Hashable, Iterable, NamedTuple, Optional, Set

from src.core.graph import (Dag, DynamicMag, DynamicPag, EdgeMark, Mag, Pag, TimedNode,
                            homology_set, representative_pairs)

if TYPE_CHECKING:
    from src.core.simulation.model import SvarModel

logger = logging.getLogger(__name__)

# Направление движения "мяча" по DAG
_FROM_CHILD = 0
_FROM_PARENT = 1


class GroundTruth(NamedTuple):
    """Истинные графы окна: динамический MAG, его PAG и MAG окна как есть."""

    mag: DynamicMag
    pag: DynamicPag
    window_mag: Mag


def _check_query(check, x: Hashable, y: Hashable, z: Set[Hashable]) -> None:
    check(x)
    check(y)
    for node in z:
        check(node)
    if x == y:
        raise ValueError(f"Узлы запроса совпадают: {x}")
    if x in z or y in z:
        raise ValueError(f"Узлы {x}, {y} не должны входить в условие")


def d_reachable(g: Dag, x: Hashable, z: Iterable[Hashable]) -> Set[Hashable]:
    """
    Находит узлы, d-связанные с x при условии z (алгоритм "Bayes ball").

    Args:
        g: DAG
        x: Исходный узел
        z: Условие

    Returns:
        Множество узлов вне z, достижимых из x по активным путям
    """
    z = set(z)
    conditioned_ancestors = g.ancestors(z) if z else set()
    visited = set()
    reachable = set()
    stack = [(x, _FROM_CHILD)]
    while stack:
        node, direction = stack.pop()
        if (node, direction) in visited:
            continue
        visited.add((node, direction))
        if node not in z:
            reachable.add(node)
        if direction == _FROM_CHILD:
            if node in z:
                continue
            stack.extend((p, _FROM_CHILD) for p in g.parents(node))
            stack.extend((c, _FROM_PARENT) for c in g.children(node))
        else:
            if node not in z:
                stack.extend((c, _FROM_PARENT) for c in g.children(node))
            if node in conditioned_ancestors:
                stack.extend((p, _FROM_CHILD) for p in g.parents(node))
    reachable.discard(x)
    return reachable


def d_separated(g: Dag, x: Hashable, y: Hashable, z: Iterable[Hashable]) -> bool:
    """
    Проверяет d-разделение x и y множеством z.

    Args:
        g: DAG
        x: Первый узел
        y: Второй узел
        z: Условие

    Returns:
        True, если все пути между x и y блокированы
    """
    z = set(z)
    _check_query(g.check_node, x, y, z)
    return y not in d_reachable(g, x, z)


def m_separated(g: Mag, x: Hashable, y: Hashable, z: Iterable[Hashable]) -> bool:
    """
    Проверяет m-разделение x и y множеством z.

    Поиск идет по состояниям (узел, пришли ли в него стрелкой). Коллайдер
    проходим, если он является предком z, не коллайдер - если не входит в z.

    Args:
        g: MAG
        x: Первый узел
        y: Второй узел
        z: Условие

    Returns:
        True, если все пути между x и y блокированы
    """
    z = set(z)
    _check_query(g._check_node, x, y, z)
    conditioned_ancestors = g.ancestors(z) if z else set()
    stack = [(v, g.mark_at(v, x) == EdgeMark.HEAD) for v in g.neighbors(x)]
    visited = set()
    while stack:
        node, head_in = stack.pop()
        if node == y:
            return False
        if (node, head_in) in visited:
            continue
        visited.add((node, head_in))
        for nxt in g.neighbors(node):
            collider = head_in and g.mark_at(node, nxt) == EdgeMark.HEAD
            passable = node in conditioned_ancestors if collider else node not in z
            if passable:
                stack.append((nxt, g.mark_at(nxt, node) == EdgeMark.HEAD))
    return True


def latent_project(g: Dag, observed: Iterable[Hashable]) -> Mag:
    """
    Проецирует DAG с латентными узлами на наблюдаемые узлы.

    Узлы x, y смежны, если их не d-разделяет множество наблюдаемых предков
    {x, y}. Метка на x - TAIL, если x предок y, иначе HEAD.

    Args:
        g: DAG
        observed: Наблюдаемые узлы (порядок сохраняется в MAG)

    Returns:
        MAG над наблюдаемыми узлами
    """
    observed = list(observed)
    for node in observed:
        g.check_node(node)
    observed_set = set(observed)
    mag = Mag(observed)
    for x, y in combinations(observed, 2):
        conditioning = (g.ancestors([x, y]) & observed_set) - {x, y}
        if y in d_reachable(g, x, conditioning):
            mark_x = EdgeMark.TAIL if x in g.ancestors([y]) else EdgeMark.HEAD
            mark_y = EdgeMark.TAIL if y in g.ancestors([x]) else EdgeMark.HEAD
            mag.add_edge(x, y, mark_x, mark_y)
    logger.debug(f"Проекция на {len(observed)} узлов: {mag.edge_count()} ребер")
    return mag


def find_sepset(m: Mag, x: Hashable, y: Hashable,
                exhaustive: bool = False) -> Optional[frozenset]:
    """
    Ищет разделяющее множество несмежной пары узлов MAG.

    Args:
        m: MAG
        x: Первый узел
        y: Второй узел
        exhaustive: Перебирать все подмножества по возрастанию размера

    Returns:
        Разделяющее множество или None для смежной пары
    """
    if m.is_adjacent(x, y):
        return None
    others = sorted((v for v in m.nodes if v not in (x, y)), key=m.order_key)
    if not exhaustive:
        candidate = frozenset(m.ancestors([x, y]) - {x, y})
        if m_separated(m, x, y, candidate):
            return candidate
        logger.warning(f"Предки не разделяют {x} и {y}: MAG не максимален, полный перебор")
    for size in range(len(others) + 1):
        for subset in combinations(others, size):
            if m_separated(m, x, y, subset):
                return frozenset(subset)
    logger.warning(f"Разделяющее множество для {x} и {y} не найдено")
    return None


def ground_truth_pag(m: Mag, exhaustive: bool = True) -> Pag:
    """
    Строит полный PAG для MAG с помощью идеального оракула.

    Args:
        m: MAG
        exhaustive: Искать минимальные разделяющие множества полным перебором

    Returns:
        PAG с тем же скелетом, что и у MAG
    """
    from src.core.orientation import orient

    pag = Pag(m.nodes)
    for edge in m.edges():
        pag.add_edge(edge.a, edge.b)
    for x, y in combinations(m.nodes, 2):
        if not m.is_adjacent(x, y):
            sepset = find_sepset(m, x, y, exhaustive)
            if sepset is not None:
                pag.record_sepset((x, y), sepset)
    return orient(pag)


def buffer_depth(model: "SvarModel") -> int:
    """Число лагов за пределами окна, достаточное для проекции."""
    return model.tau * max(2, model.n_total - 1)


def unroll(model: "SvarModel", depth: int, window: int) -> Dag:
    """
    Разворачивает структуру SVAR в DAG глубины depth.

    Args:
        model: Модель
        depth: Максимальный лаг развернутого графа
        window: Длина окна (узлы старше окна считаются латентными)

    Returns:
        DAG над узлами TimedNode(переменная модели, лаг)
    """
    nodes = [TimedNode(var, lag) for lag in range(depth + 1) for var in range(model.n_total)]
    edges = [(TimedNode(link.source, lag + link.lag), TimedNode(link.target, lag))
             for link in model.links for lag in range(depth + 1 - link.lag)]
    hidden = set(model.latent)
    latent = [v for v in nodes if v.var in hidden or v.lag > window]
    return Dag(nodes, edges, latent)


def project_window(model: "SvarModel", w: int, buffer: Optional[int] = None) -> Mag:
    """
    Возвращает MAG окна длины w над наблюдаемыми переменными.

    Узлы MAG перенумерованы индексами наблюдаемых переменных.

    Args:
        model: Модель
        w: Длина окна
        buffer: Глубина буфера прошлого (по умолчанию buffer_depth)

    Returns:
        MAG окна
    """
    if w < model.tau:
        raise ValueError(f"Окно {w} короче порядка модели {model.tau}")
    depth = w + (buffer_depth(model) if buffer is None else buffer)
    dag = unroll(model, depth, w)
    observed = list(model.observed)
    window_nodes = [TimedNode(var, lag) for lag in range(w + 1) for var in observed]
    projected = latent_project(dag, window_nodes)
    index = {var: i for i, var in enumerate(observed)}
    return projected.relabel({v: TimedNode(index[v.var], v.lag) for v in window_nodes})


def unrolled_ground_truth(model: "SvarModel", w: int, buffer: Optional[int] = None,
                          exhaustive_limit: int = 8) -> GroundTruth:
    """
    Строит истинный динамический MAG и динамический PAG окна.

    Динамический MAG замыкает по гомологии ребра MAG окна, инцидентные
    узлам с лагом 0; PAG строится над тем же скелетом и ориентируется тем же
    движком, что и при поиске.

    Args:
        model: Модель SVAR
        w: Длина окна
        buffer: Глубина буфера прошлого
        exhaustive_limit: Максимальное число узлов окна для полного перебора разделяющих множеств

    Returns:
        GroundTruth(динамический MAG, динамический PAG, MAG окна)
    """
    from src.core.orientation import orient

    window_mag = project_window(model, w, buffer)
    n = len(model.observed)
    pag = DynamicPag(n, w)
    mag = DynamicMag(n, w)
    for edge in window_mag.edges():
        if min(edge.a.lag, edge.b.lag) != 0:
            continue
        for sa, sb in homology_set((edge.a, edge.b), w):
            mag.add_edge(sa, sb, edge.mark_at_a, edge.mark_at_b)
        pag.add_edge_homologous(edge.a, edge.b)

    exhaustive = len(window_mag.nodes) <= exhaustive_limit
    for u, v in representative_pairs(n, w):
        if pag.is_adjacent(u, v):
            continue
        sepset = find_sepset(window_mag, u, v, exhaustive)
        if sepset is None:
            logger.warning(f"Пара {u} - {v} несмежна в динамическом MAG, но смежна в MAG окна")
            continue
        pag.record_sepset((u, v), sepset)
    orient(pag)
    logger.debug(f"Истинный граф: {len(pag.minimal_edges())} классов ребер")
    return GroundTruth(mag, pag, window_mag)

