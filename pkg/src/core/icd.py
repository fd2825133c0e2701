import logging
from dataclasses import dataclass
from itertools import combinations
from typing import AbstractSet, Collection, Dict, FrozenSet, Hashable, Iterable, List, Optional, Set

from src.core.graph import EdgeMark, Pag

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IcdSepCandidate:
    """Кандидат в разделяющие множества для ребра (a, b)."""

    z_set: FrozenSet[Hashable]
    r: int
    side: Hashable

    def __post_init__(self):
        if len(self.z_set) != self.r:
            raise ValueError(f"Размер множества {len(self.z_set)} не равен r={self.r}")


def possible_ancestors(g: Pag, targets: Iterable[Hashable]) -> Set[Hashable]:
    """
    Возвращает возможных предков набора узлов (включая сами узлы).

    Узел z - возможный предок a, если существует путь от z к a, на каждом
    ребре которого метка у ближнего к z конца равна TAIL или CIRCLE.

    Args:
        g: PAG
        targets: Целевые узлы

    Returns:
        Множество возможных предков
    """
    result: Set[Hashable] = set()
    stack = list(targets)
    while stack:
        node = stack.pop()
        if node in result:
            continue
        result.add(node)
        for u in g.neighbors(node):
            if u not in result and g.mark_at(u, node) != EdgeMark.HEAD:
                stack.append(u)
    return result


def possible_ancestor(g: Pag, z: Hashable, a: Hashable) -> bool:
    """Является ли z возможным предком a."""
    return z in possible_ancestors(g, [a])


def pds_reachable(g: Pag, a: Hashable, b: Hashable, r: int,
                  allowed: Optional[Collection[Hashable]] = None,
                  shielded: Optional[AbstractSet[FrozenSet[Hashable]]] = None) -> Dict[Hashable, int]:
    """
    Находит длины кратчайших PDS-путей от a, не проходящих через b.

    На PDS-пути каждый внутренний узел тройки <u, v, w> либо коллайдер,
    либо u, v, w попарно смежны. Пары из shielded считаются смежными
    даже после удаления ребра.

    Args:
        g: PAG
        a: Начальный узел
        b: Исключаемый узел
        r: Максимальная длина пути
        allowed: Узлы, через которые разрешено проходить (по умолчанию все)
        shielded: Дополнительные пары узлов, закрывающие треугольник

    Returns:
        Словарь узел -> длина кратчайшего пути (только длины не больше r)
    """
    if a == b:
        raise ValueError(f"Концы ребра совпадают: {a}")
    best: Dict[Hashable, int] = {}
    path = [a]
    on_path = {a}

    def visit() -> None:
        length = len(path) - 1
        if length >= r:
            return
        cur = path[-1]
        for nxt in g.neighbors(cur):
            if nxt == b or nxt in on_path:
                continue
            if allowed is not None and nxt not in allowed:
                continue
            if length >= 1:
                prev = path[-2]
                if not (g.is_collider(prev, cur, nxt) or g.is_adjacent(prev, nxt)
                        or (shielded is not None and frozenset((prev, nxt)) in shielded)):
                    continue
            if length + 1 < best.get(nxt, r + 1):
                best[nxt] = length + 1
            path.append(nxt)
            on_path.add(nxt)
            visit()
            path.pop()
            on_path.discard(nxt)

    visit()
    return best


def _closed_under_pds(g: Pag, anchor: Hashable, other: Hashable, z_set: FrozenSet[Hashable],
                      shielded: Optional[AbstractSet[FrozenSet[Hashable]]] = None) -> bool:
    """Каждый узел z_set достижим от anchor PDS-путем, все неначальные узлы которого лежат в z_set."""
    reached = pds_reachable(g, anchor, other, len(z_set), allowed=z_set, shielded=shielded)
    return z_set <= reached.keys()


def pd_sep_range(a: Hashable, b: Hashable, r: int, g: Pag,
                 shielded: Optional[AbstractSet[FrozenSet[Hashable]]] = None) -> List[IcdSepCandidate]:
    """
    Перечисляет условия размера r, которые нужно проверить для ребра (a, b).

    Множество Z подходит, если каждый его узел - возможный предок a или b и
    достижим PDS-путем от одного из концов ребра внутри Z. Кандидаты от обоих
    концов объединяются без повторов.

    Args:
        a: Первый конец ребра
        b: Второй конец ребра
        r: Размер условия
        g: Текущий PAG
        shielded: Пары, смежные в начале итерации (для проверки треугольников)

    Returns:
        Список кандидатов в детерминированном порядке
    """
    if r < 0:
        raise ValueError(f"Размер условия должен быть неотрицательным: {r}")
    if not g.is_adjacent(a, b):
        raise KeyError(f"Ребро {a} - {b} отсутствует")
    if r == 0:
        return [IcdSepCandidate(frozenset(), 0, a)]

    ancestors = possible_ancestors(g, [a, b]) - {a, b}
    found: Dict[FrozenSet[Hashable], IcdSepCandidate] = {}
    for anchor, other in ((a, b), (b, a)):
        pool = sorted(pds_reachable(g, anchor, other, r, allowed=ancestors, shielded=shielded), key=g.order_key)
        for subset in combinations(pool, r):
            z_set = frozenset(subset)
            if z_set in found:
                continue
            if _closed_under_pds(g, anchor, other, z_set, shielded):
                found[z_set] = IcdSepCandidate(z_set, r, anchor)

    candidates = sorted(found.values(), key=lambda c: sorted(g.order_key(v) for v in c.z_set))
    logger.debug(f"Ребро {a} - {b}, r={r}: {len(candidates)} кандидатов")
    return candidates
