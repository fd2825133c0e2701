import logging
from enum import Enum
from dataclasses import dataclass
from typing import (Dict, FrozenSet, Hashable, Iterable, Iterator, List,
                    NamedTuple, Optional, Set, Tuple)

import networkx as nx

logger = logging.getLogger(__name__)


class TimedNode(NamedTuple):
    """Узел динамического графа: переменная и лаг (0 - настоящее время)."""

    var: int
    lag: int

    def shifted(self, k: int) -> "TimedNode":
        """Сдвигает узел на k шагов в прошлое (k < 0 - в будущее)."""
        return TimedNode(self.var, self.lag + k)

    def label(self, names: Optional[List[str]] = None) -> str:
        """
        Возвращает текстовую метку узла вида X1(t-2).

        Args:
            names: Имена переменных (если None, используется X<индекс>)

        Returns:
            Метка узла
        """
        name = names[self.var] if names else f"X{self.var}"
        return f"{name}(t)" if self.lag == 0 else f"{name}(t-{self.lag})"


class EdgeMark(Enum):
    """Метка на конце ребра."""

    CIRCLE = "o"
    HEAD = ">"
    TAIL = "-"


@dataclass(frozen=True)
class Edge:
    """Ребро смешанного графа с метками на обоих концах."""

    a: Hashable
    b: Hashable
    mark_at_a: EdgeMark
    mark_at_b: EdgeMark

    def __str__(self) -> str:
        return f"{self.a} {format_marks(self.mark_at_a, self.mark_at_b)} {self.b}"


class FixedOrientationError(ValueError):
    """Попытка изменить зафиксированную стрелку временного ребра."""


_LEFT_SYMBOLS = {EdgeMark.CIRCLE: "o", EdgeMark.HEAD: "<", EdgeMark.TAIL: "-"}
_RIGHT_SYMBOLS = {EdgeMark.CIRCLE: "o", EdgeMark.HEAD: ">", EdgeMark.TAIL: "-"}


def format_marks(mark_left: EdgeMark, mark_right: EdgeMark) -> str:
    """Строит обозначение ребра вида 'o->' по меткам концов."""
    return f"{_LEFT_SYMBOLS[mark_left]}-{_RIGHT_SYMBOLS[mark_right]}"


def parse_marks(symbol: str) -> Tuple[EdgeMark, EdgeMark]:
    """
    Разбирает обозначение ребра вида 'o->' на метки концов.

    Args:
        symbol: Трехсимвольное обозначение

    Returns:
        Кортеж (метка слева, метка справа)
    """
    if len(symbol) != 3 or symbol[1] != "-":
        raise ValueError(f"Некорректное обозначение ребра: {symbol!r}")
    left = {v: k for k, v in _LEFT_SYMBOLS.items()}.get(symbol[0])
    right = {v: k for k, v in _RIGHT_SYMBOLS.items()}.get(symbol[2])
    if left is None or right is None:
        raise ValueError(f"Некорректное обозначение ребра: {symbol!r}")
    return left, right


class Pag:
    """
    Смешанный граф с тремя типами меток (PAG) над произвольным набором узлов.

    Метка хранится как _marks[at][other] - метка на конце `at` ребра (at, other).
    """

    def __init__(self, nodes: Iterable[Hashable]):
        self._nodes: List[Hashable] = list(nodes)
        self._marks: Dict[Hashable, Dict[Hashable, EdgeMark]] = {v: {} for v in self._nodes}
        if len(self._marks) != len(self._nodes):
            raise ValueError("Узлы графа должны быть уникальными")
        self.sepsets: Dict[FrozenSet[Hashable], FrozenSet[Hashable]] = {}
        self.conflicts: List[Tuple[Hashable, Hashable, EdgeMark]] = []

    # Узлы и ребра

    @property
    def nodes(self) -> List[Hashable]:
        return list(self._nodes)

    def has_node(self, node: Hashable) -> bool:
        return node in self._marks

    def _check_node(self, node: Hashable) -> None:
        if node not in self._marks:
            raise KeyError(f"Узел {node} отсутствует в графе")

    def order_key(self, node: Hashable):
        """Ключ канонического порядка узлов."""
        return node

    def canonical_pair(self, u: Hashable, v: Hashable) -> Tuple[Hashable, Hashable]:
        return (u, v) if self.order_key(u) <= self.order_key(v) else (v, u)

    def add_edge(self, u: Hashable, v: Hashable,
                 mark_u: EdgeMark = EdgeMark.CIRCLE, mark_v: EdgeMark = EdgeMark.CIRCLE) -> None:
        """
        Добавляет (или перезаписывает) ребро u - v.

        Args:
            u: Первый узел
            v: Второй узел
            mark_u: Метка на конце u
            mark_v: Метка на конце v
        """
        self._check_node(u)
        self._check_node(v)
        if u == v:
            raise ValueError(f"Петля в узле {u} недопустима")
        self._marks[u][v] = mark_u
        self._marks[v][u] = mark_v

    def remove_edge(self, u: Hashable, v: Hashable) -> None:
        if not self.is_adjacent(u, v):
            raise KeyError(f"Ребро {u} - {v} отсутствует")
        del self._marks[u][v]
        del self._marks[v][u]

    def is_adjacent(self, u: Hashable, v: Hashable) -> bool:
        self._check_node(u)
        self._check_node(v)
        return v in self._marks[u]

    def neighbors(self, node: Hashable) -> List[Hashable]:
        self._check_node(node)
        return sorted(self._marks[node], key=self.order_key)

    def mark_at(self, at: Hashable, other: Hashable) -> EdgeMark:
        """Метка на конце `at` ребра (at, other)."""
        try:
            return self._marks[at][other]
        except KeyError:
            raise KeyError(f"Ребро {at} - {other} отсутствует") from None

    def set_mark(self, at: Hashable, other: Hashable, mark: EdgeMark) -> None:
        if not self.is_adjacent(at, other):
            raise KeyError(f"Ребро {at} - {other} отсутствует")
        self._marks[at][other] = mark

    def edges(self) -> Iterator[Edge]:
        """Перебирает ребра в каноническом порядке."""
        seen: Set[FrozenSet] = set()
        pairs = []
        for u in self._nodes:
            for v in self._marks[u]:
                key = frozenset((u, v))
                if key in seen:
                    continue
                seen.add(key)
                pairs.append(self.canonical_pair(u, v))
        pairs.sort(key=lambda p: (self.order_key(p[0]), self.order_key(p[1])))
        for a, b in pairs:
            yield Edge(a, b, self._marks[a][b], self._marks[b][a])

    def edge_count(self) -> int:
        return sum(len(m) for m in self._marks.values()) // 2

    def copy(self) -> "Pag":
        clone = self.__class__.__new__(self.__class__)
        clone.__dict__.update(self.__dict__)
        clone._nodes = list(self._nodes)
        clone._marks = {v: dict(m) for v, m in self._marks.items()}
        clone.conflicts = list(self.conflicts)
        clone.sepsets = dict(self.sepsets)
        return clone

    def __eq__(self, other) -> bool:
        if not isinstance(other, Pag):
            return NotImplemented
        return set(self._nodes) == set(other._nodes) and self._marks == other._marks

    __hash__ = None

    # Локальные структуры

    def is_collider(self, u: Hashable, v: Hashable, w: Hashable) -> bool:
        """Является ли v коллайдером на пути u *-> v <-* w."""
        return self.mark_at(v, u) == EdgeMark.HEAD and self.mark_at(v, w) == EdgeMark.HEAD

    def is_parent(self, u: Hashable, v: Hashable) -> bool:
        """Направленное ребро u -> v."""
        return (self.is_adjacent(u, v) and self._marks[u][v] == EdgeMark.TAIL
                and self._marks[v][u] == EdgeMark.HEAD)

    def reset_marks(self) -> None:
        """Сбрасывает все изменяемые метки в CIRCLE."""
        for u in self._nodes:
            for v in self._marks[u]:
                if not self.is_fixed(u, v):
                    self._marks[u][v] = EdgeMark.CIRCLE
        self.conflicts = []

    def is_fixed(self, at: Hashable, other: Hashable) -> bool:
        """Зафиксирована ли метка на конце `at` (в общем PAG - никогда)."""
        return False

    def assign_mark(self, at: Hashable, other: Hashable, mark: EdgeMark) -> None:
        """Устанавливает метку так, как это требуется правилам ориентации."""
        self.set_mark(at, other, mark)

    def record_sepset(self, pair: Tuple[Hashable, Hashable], sepset: Iterable[Hashable]) -> None:
        self.sepsets[frozenset(pair)] = frozenset(sepset)

    def get_sepset(self, u: Hashable, v: Hashable) -> Optional[FrozenSet[Hashable]]:
        return self.sepsets.get(frozenset((u, v)))

    def to_text(self) -> str:
        return "\n".join(str(edge) for edge in self.edges())


class Mag(Pag):
    """Максимальный анцестральный граф: метки только HEAD и TAIL."""

    def add_edge(self, u: Hashable, v: Hashable,
                 mark_u: EdgeMark = EdgeMark.TAIL, mark_v: EdgeMark = EdgeMark.HEAD) -> None:
        if EdgeMark.CIRCLE in (mark_u, mark_v):
            raise ValueError("В MAG допустимы только метки HEAD и TAIL")
        if mark_u == EdgeMark.TAIL and mark_v == EdgeMark.TAIL:
            raise ValueError("Ненаправленные ребра (селекция) не поддерживаются")
        super().add_edge(u, v, mark_u, mark_v)

    def set_mark(self, at: Hashable, other: Hashable, mark: EdgeMark) -> None:
        if mark == EdgeMark.CIRCLE:
            raise ValueError("В MAG допустимы только метки HEAD и TAIL")
        super().set_mark(at, other, mark)

    def parents(self, node: Hashable) -> List[Hashable]:
        return [u for u in self.neighbors(node) if self.is_parent(u, node)]

    def ancestors(self, targets: Iterable[Hashable]) -> Set[Hashable]:
        """
        Возвращает предков набора узлов (включая сами узлы) по направленным путям.

        Args:
            targets: Целевые узлы

        Returns:
            Множество предков
        """
        result = set()
        stack = list(targets)
        for node in stack:
            self._check_node(node)
        while stack:
            node = stack.pop()
            if node in result:
                continue
            result.add(node)
            stack.extend(u for u in self._marks[node] if self.is_parent(u, node))
        return result

    def is_ancestral(self) -> bool:
        """Проверяет отсутствие направленных и почти направленных циклов."""
        for edge in self.edges():
            a, b = edge.a, edge.b
            an_a = self.ancestors([a])
            an_b = self.ancestors([b])
            if edge.mark_at_b == EdgeMark.HEAD and b in an_a:
                return False
            if edge.mark_at_a == EdgeMark.HEAD and a in an_b:
                return False
        return True

    def relabel(self, mapping: Dict[Hashable, Hashable]) -> "Mag":
        """Создает копию графа с переименованными узлами."""
        result = Mag(mapping[v] for v in self._nodes)
        for edge in self.edges():
            result.add_edge(mapping[edge.a], mapping[edge.b], edge.mark_at_a, edge.mark_at_b)
        return result


# Гомология


def homology_set(pair: Tuple[TimedNode, TimedNode], w: int) -> Set[Tuple[TimedNode, TimedNode]]:
    """
    Возвращает все пары, гомологичные данной внутри окна [0, w].

    Args:
        pair: Пара узлов
        w: Длина окна (число лагов в прошлом)

    Returns:
        Множество пар (включая исходную) с сохраненным порядком элементов
    """
    a, b = pair
    if not (0 <= a.lag <= w and 0 <= b.lag <= w):
        raise ValueError(f"Пара {pair} выходит за окно длины {w}")
    low = -min(a.lag, b.lag)
    high = w - max(a.lag, b.lag)
    return {(a.shifted(k), b.shifted(k)) for k in range(low, high + 1)}


def representative(pair: Tuple[TimedNode, TimedNode]) -> Tuple[TimedNode, TimedNode]:
    """Представитель класса гомологии: сдвиг, при котором минимальный лаг равен 0."""
    a, b = pair
    k = -min(a.lag, b.lag)
    return a.shifted(k), b.shifted(k)


class DynamicPag(Pag):
    """
    Динамический PAG над окном из w + 1 временных срезов по n переменных.

    Ребра хранятся согласованно по гомологии: удаление и ориентация
    распространяются на все сдвинутые копии пары.
    """

    def __init__(self, n: int, w: int):
        if n < 1 or w < 0:
            raise ValueError(f"Некорректные размеры графа: n={n}, w={w}")
        self.n = n
        self.w = w
        super().__init__(TimedNode(var, lag) for lag in range(w + 1) for var in range(n))

    def order_key(self, node: TimedNode):
        return -node.lag, node.var

    @staticmethod
    def is_temporal(u: TimedNode, v: TimedNode) -> bool:
        return u.lag != v.lag

    def is_fixed(self, at: TimedNode, other: TimedNode) -> bool:
        """Метка на более позднем конце временного ребра зафиксирована как HEAD."""
        return at.lag < other.lag

    def add_edge_homologous(self, u: TimedNode, v: TimedNode,
                            mark_u: EdgeMark = EdgeMark.CIRCLE, mark_v: EdgeMark = EdgeMark.CIRCLE) -> None:
        """Добавляет ребро и все гомологичные ему ребра с теми же метками."""
        if u.var == v.var and u.lag == v.lag:
            raise ValueError(f"Петля в узле {u} недопустима")
        if self.is_fixed(u, v):
            mark_u = EdgeMark.HEAD
        if self.is_fixed(v, u):
            mark_v = EdgeMark.HEAD
        for su, sv in homology_set((u, v), self.w):
            self.add_edge(su, sv, mark_u, mark_v)

    def remove_edge_homologous(self, pair: Tuple[TimedNode, TimedNode], strict: bool = False) -> "DynamicPag":
        """
        Удаляет ребро и все гомологичные ему ребра.

        Args:
            pair: Пара узлов
            strict: Выбрасывать ли исключение, если ребра нет

        Returns:
            Этот же граф
        """
        u, v = pair
        if not self.is_adjacent(u, v):
            if strict:
                raise KeyError(f"Ребро {u} - {v} отсутствует")
            logger.debug(f"Ребро {u} - {v} уже удалено")
            return self
        for su, sv in homology_set(pair, self.w):
            if self.is_adjacent(su, sv):
                self.remove_edge(su, sv)
        return self

    def set_mark_homologous(self, pair: Tuple[TimedNode, TimedNode], endpoint: TimedNode,
                            mark: EdgeMark) -> "DynamicPag":
        """
        Устанавливает метку на заданном конце ребра и на том же конце всех гомологичных ребер.

        Args:
            pair: Пара узлов
            endpoint: Конец ребра (один из узлов пары)
            mark: Новая метка

        Returns:
            Этот же граф
        """
        u, v = pair
        if endpoint not in (u, v):
            raise ValueError(f"Узел {endpoint} не является концом ребра {u} - {v}")
        other = v if endpoint == u else u
        if not self.is_adjacent(endpoint, other):
            raise KeyError(f"Ребро {u} - {v} отсутствует")
        if self.is_fixed(endpoint, other) and mark != EdgeMark.HEAD:
            raise FixedOrientationError(
                f"Нельзя ставить {mark.name} на позднем конце {endpoint} временного ребра {other} - {endpoint}")
        for s_end, s_other in homology_set((endpoint, other), self.w):
            if self.is_adjacent(s_end, s_other):
                self._marks[s_end][s_other] = mark
        return self

    def set_mark(self, at: TimedNode, other: TimedNode, mark: EdgeMark) -> None:
        if self.is_fixed(at, other) and mark != EdgeMark.HEAD:
            raise FixedOrientationError(
                f"Нельзя ставить {mark.name} на позднем конце {at} временного ребра {other} - {at}")
        super().set_mark(at, other, mark)

    def assign_mark(self, at: TimedNode, other: TimedNode, mark: EdgeMark) -> None:
        self.set_mark_homologous((at, other), at, mark)

    # Разделяющие множества

    def record_sepset(self, pair: Tuple[TimedNode, TimedNode], sepset: Iterable[TimedNode]) -> None:
        """Записывает разделяющее множество для класса гомологии пары."""
        rep_a, rep_b = representative(pair)
        k = rep_a.lag - pair[0].lag
        shifted = frozenset(z.shifted(k) for z in sepset)
        self.sepsets[frozenset((rep_a, rep_b))] = frozenset(z for z in shifted if 0 <= z.lag <= self.w)

    def get_sepset(self, u: TimedNode, v: TimedNode) -> Optional[FrozenSet[TimedNode]]:
        """
        Возвращает разделяющее множество пары в координатах самой пары.

        Args:
            u: Первый узел
            v: Второй узел

        Returns:
            Множество узлов или None, если пара не разделялась
        """
        rep_u, rep_v = representative((u, v))
        stored = self.sepsets.get(frozenset((rep_u, rep_v)))
        if stored is None:
            return None
        k = u.lag - rep_u.lag
        return frozenset(z.shifted(k) for z in stored if z.lag + k <= self.w)

    # Представители классов гомологии

    def minimal_edges(self) -> List[Edge]:
        return minimal_edge_set(self)

    def is_homology_consistent(self) -> bool:
        """Полная проверка согласованности ребер и меток по гомологии."""
        for edge in self.edges():
            for su, sv in homology_set((edge.a, edge.b), self.w):
                if not self.is_adjacent(su, sv):
                    return False
                if self._marks[su][sv] != edge.mark_at_a or self._marks[sv][su] != edge.mark_at_b:
                    return False
        return True

    def temporal_heads_hold(self) -> bool:
        for edge in self.edges():
            if edge.a.lag > edge.b.lag and edge.mark_at_b != EdgeMark.HEAD:
                return False
        return True

    def format(self, names: Optional[List[str]] = None, representatives_only: bool = True) -> str:
        """
        Печатает граф в текстовом формате, по одному ребру на строку.

        Args:
            names: Имена переменных
            representatives_only: Печатать только по одному ребру из каждого класса гомологии

        Returns:
            Текст графа
        """
        edges = minimal_edge_set(self) if representatives_only else list(self.edges())
        lines = [f"{e.a.label(names)} {format_marks(e.mark_at_a, e.mark_at_b)} {e.b.label(names)}" for e in edges]
        return "\n".join(lines)


def minimal_edge_set(g: DynamicPag) -> List[Edge]:
    """
    Возвращает по одному представителю каждого класса гомологии ребер.

    Представитель - ребро, инцидентное узлу с лагом 0.

    Args:
        g: Динамический PAG

    Returns:
        Список ребер в каноническом порядке
    """
    return [edge for edge in g.edges() if min(edge.a.lag, edge.b.lag) == 0]


class DynamicMag(Mag):
    """MAG над узлами окна с тем же каноническим порядком узлов, что у DynamicPag."""

    def __init__(self, n: int, w: int):
        if n < 1 or w < 0:
            raise ValueError(f"Некорректные размеры графа: n={n}, w={w}")
        self.n = n
        self.w = w
        super().__init__(TimedNode(var, lag) for lag in range(w + 1) for var in range(n))

    def order_key(self, node: TimedNode):
        return -node.lag, node.var


class Dag:
    """Ориентированный ациклический граф с пометками латентных узлов."""

    def __init__(self, nodes: Iterable[Hashable], edges: Iterable[Tuple[Hashable, Hashable]] = (),
                 latent: Iterable[Hashable] = ()):
        """
        Инициализирует DAG.

        Args:
            nodes: Узлы графа
            edges: Направленные ребра (родитель, потомок)
            latent: Латентные (ненаблюдаемые) узлы
        """
        self.graph = nx.DiGraph()
        self.graph.add_nodes_from(nodes)
        for parent, child in edges:
            if parent not in self.graph or child not in self.graph:
                raise KeyError(f"Ребро {parent} -> {child} ссылается на отсутствующий узел")
            self.graph.add_edge(parent, child)
        if not nx.is_directed_acyclic_graph(self.graph):
            raise ValueError("Граф содержит направленный цикл")
        self.latent: FrozenSet[Hashable] = frozenset(latent)
        unknown = self.latent - set(self.graph.nodes)
        if unknown:
            raise KeyError(f"Латентные узлы отсутствуют в графе: {sorted(unknown)}")
        self._ancestors: Dict[Hashable, Set[Hashable]] = {}

    @property
    def nodes(self) -> List[Hashable]:
        return list(self.graph.nodes)

    @property
    def observed(self) -> List[Hashable]:
        return [v for v in self.graph.nodes if v not in self.latent]

    def check_node(self, node: Hashable) -> None:
        if node not in self.graph:
            raise KeyError(f"Узел {node} отсутствует в графе")

    def parents(self, node: Hashable) -> List[Hashable]:
        return list(self.graph.predecessors(node))

    def children(self, node: Hashable) -> List[Hashable]:
        return list(self.graph.successors(node))

    def ancestors(self, targets: Iterable[Hashable]) -> Set[Hashable]:
        """Предки набора узлов, включая сами узлы."""
        result: Set[Hashable] = set()
        for node in targets:
            if node not in self._ancestors:
                self.check_node(node)
                self._ancestors[node] = nx.ancestors(self.graph, node) | {node}
            result |= self._ancestors[node]
        return result

    def topological_order(self) -> List[Hashable]:
        return list(nx.topological_sort(self.graph))


def representative_pairs(n: int, w: int) -> List[Tuple[TimedNode, TimedNode]]:
    """
    Перечисляет представителей всех классов гомологии пар узлов окна.

    Args:
        n: Число переменных
        w: Длина окна

    Returns:
        Пары (ранний узел, поздний узел) в каноническом порядке
    """
    temporal = [(TimedNode(i, k), TimedNode(j, 0))
                for k in range(w, 0, -1) for i in range(n) for j in range(n)]
    contemporaneous = [(TimedNode(i, 0), TimedNode(j, 0)) for i in range(n) for j in range(i + 1, n)]
    return temporal + contemporaneous


def describe_conflict(conflict: Tuple[TimedNode, TimedNode, EdgeMark], names: Optional[List[str]] = None) -> str:
    """Описание конфликта меток: конец ребра, ребро и отклоненная метка."""
    at, other, mark = conflict
    return f"{at.label(names)} на ребре {at.label(names)} - {other.label(names)}: отклонена {mark.name}"
