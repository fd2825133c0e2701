import logging
from itertools import combinations
from typing import Hashable, List, Mapping, Optional, Sequence, Set, Tuple

from src.core.graph import DynamicPag, EdgeMark, Pag, representative

logger = logging.getLogger(__name__)

CIRCLE = EdgeMark.CIRCLE
HEAD = EdgeMark.HEAD
TAIL = EdgeMark.TAIL

# Ограничение на число шагов поиска непокрытых путей в правилах R9 и R10
PATH_SEARCH_LIMIT = 200_000

Assignment = Tuple[Hashable, Hashable, EdgeMark]


class OrientationEngine:
    """
    Ориентирует метки PAG по разделяющим множествам и правилам FCI.

    Изменяются только метки CIRCLE. Попытка изменить уже поставленную метку
    записывается как конфликт, при этом остается первая метка.
    """

    def __init__(self, g: Pag):
        self.g = g
        self._conflicts: Set[Assignment] = set()

    def run(self) -> Pag:
        g = self.g
        g.reset_marks()
        self._orient_colliders()
        rules = (self._rule1, self._rule2, self._rule3, self._rule4,
                 self._rule8, self._rule9, self._rule10)
        passes = 0
        changed = True
        while changed:
            changed = False
            for rule in rules:
                if rule():
                    changed = True
            passes += 1
        g.conflicts = sorted(self._conflicts, key=lambda c: (g.order_key(c[0]), g.order_key(c[1]), c[2].value))
        if g.conflicts:
            logger.warning(f"Ориентация завершена с конфликтами меток: {len(g.conflicts)}")
        logger.debug(f"Ориентация: {passes} проходов правил")
        return g

    # Запись меток

    def _apply(self, assignments: Sequence[Assignment]) -> bool:
        """
        Ставит набор меток целиком либо не ставит ни одной.

        Args:
            assignments: Тройки (конец ребра, другой конец, метка)

        Returns:
            True, если хотя бы одна метка изменилась
        """
        g = self.g
        clashes = [(at, other, mark) for at, other, mark in assignments
                   if g.mark_at(at, other) not in (CIRCLE, mark)]
        if clashes:
            for at, other, mark in clashes:
                self._record_conflict(at, other, mark)
            return False
        changed = False
        for at, other, mark in assignments:
            if g.mark_at(at, other) == CIRCLE:
                g.assign_mark(at, other, mark)
                changed = True
        return changed

    def _record_conflict(self, at: Hashable, other: Hashable, mark: EdgeMark) -> None:
        if isinstance(self.g, DynamicPag):
            at, other = representative((at, other))
        key = (at, other, mark)
        if key not in self._conflicts:
            self._conflicts.add(key)
            logger.warning(f"Конфликт меток на конце {at} ребра {at} - {other}: "
                           f"оставлена {self.g.mark_at(at, other).name}, отклонена {mark.name}")

    # Коллайдеры

    def _orient_colliders(self) -> None:
        g = self.g
        for y in g.nodes:
            for x, z in combinations(g.neighbors(y), 2):
                if g.is_adjacent(x, z):
                    continue
                sepset = g.get_sepset(x, z)
                if sepset is None:
                    logger.debug(f"Нет разделяющего множества для {x} и {z}")
                    continue
                if y not in sepset:
                    self._apply([(y, x, HEAD), (y, z, HEAD)])

    # Правила R1-R4

    def _rule1(self) -> bool:
        """a *-> b o-* c, a и c несмежны: b -> c."""
        g = self.g
        changed = False
        for b in g.nodes:
            neighbors = g.neighbors(b)
            for a in neighbors:
                if g.mark_at(b, a) != HEAD:
                    continue
                for c in neighbors:
                    if c == a or g.is_adjacent(a, c) or g.mark_at(b, c) != CIRCLE:
                        continue
                    changed |= self._apply([(b, c, TAIL), (c, b, HEAD)])
        return changed

    def _rule2(self) -> bool:
        """a -> b *-> c или a *-> b -> c, и a *-o c: a *-> c."""
        g = self.g
        changed = False
        for a in g.nodes:
            for c in g.neighbors(a):
                if g.mark_at(c, a) != CIRCLE:
                    continue
                for b in g.neighbors(a):
                    if b == c or not g.is_adjacent(b, c):
                        continue
                    first = g.is_parent(a, b) and g.mark_at(c, b) == HEAD
                    second = g.mark_at(b, a) == HEAD and g.is_parent(b, c)
                    if first or second:
                        changed |= self._apply([(c, a, HEAD)])
                        break
        return changed

    def _rule3(self) -> bool:
        """a *-> b <-* c, a *-o d o-* c, a и c несмежны, d *-o b: d *-> b."""
        g = self.g
        changed = False
        for b in g.nodes:
            for a, c in combinations(g.neighbors(b), 2):
                if g.is_adjacent(a, c) or g.mark_at(b, a) != HEAD or g.mark_at(b, c) != HEAD:
                    continue
                for d in g.neighbors(b):
                    if d in (a, c) or g.mark_at(b, d) != CIRCLE:
                        continue
                    if not (g.is_adjacent(d, a) and g.is_adjacent(d, c)):
                        continue
                    if g.mark_at(d, a) == CIRCLE and g.mark_at(d, c) == CIRCLE:
                        changed |= self._apply([(b, d, HEAD)])
        return changed

    def _rule4(self) -> bool:
        """Различающий путь для b: b -> c при b в sepset, иначе a <-> b <-> c."""
        g = self.g
        changed = False
        for b in g.nodes:
            for c in g.neighbors(b):
                if g.mark_at(b, c) != CIRCLE:
                    continue
                for a in g.neighbors(c):
                    if a == b or not g.is_adjacent(a, b):
                        continue
                    if not g.is_parent(a, c) or g.mark_at(a, b) != HEAD:
                        continue
                    start = self._discriminating_start(a, b, c)
                    if start is None:
                        continue
                    sepset = g.get_sepset(start, c)
                    if sepset is None:
                        continue
                    if b in sepset:
                        changed |= self._apply([(b, c, TAIL), (c, b, HEAD)])
                    else:
                        changed |= self._apply([(b, a, HEAD), (b, c, HEAD), (c, b, HEAD)])
                    break
        return changed

    def _discriminating_start(self, a: Hashable, b: Hashable, c: Hashable) -> Optional[Hashable]:
        """
        Ищет начало кратчайшего различающего пути <start, ..., a, b, c>.

        Все узлы между start и b - коллайдеры и родители c; start несмежен с c.
        """
        g = self.g
        visited = {a, b, c}
        frontier = [a]
        while frontier:
            following = []
            for v in frontier:
                for u in g.neighbors(v):
                    if u in visited or g.mark_at(v, u) != HEAD:
                        continue
                    if not g.is_adjacent(u, c):
                        return u
                    if g.is_parent(u, c) and g.mark_at(u, v) == HEAD:
                        visited.add(u)
                        following.append(u)
            frontier = following
        return None

    # Правила R8-R10

    def _rule8(self) -> bool:
        """a -> b -> c или a -o b -> c, и a o-> c: a -> c."""
        g = self.g
        changed = False
        for a, c in self._circle_arrows():
            for b in g.neighbors(a):
                if b == c or not g.is_parent(b, c):
                    continue
                if g.is_parent(a, b) or (g.mark_at(a, b) == TAIL and g.mark_at(b, a) == CIRCLE):
                    changed |= self._apply([(a, c, TAIL)])
                    break
        return changed

    def _rule9(self) -> bool:
        """a o-> c и непокрытый п.н. путь <a, b, ..., c>, b и c несмежны: a -> c."""
        g = self.g
        changed = False
        for a, c in self._circle_arrows():
            for b in g.neighbors(a):
                if b == c or g.is_adjacent(b, c) or not self._potentially_directed(a, b):
                    continue
                if self._uncovered_pd_path([a, b], c):
                    changed |= self._apply([(a, c, TAIL)])
                    break
        return changed

    def _rule10(self) -> bool:
        """a o-> c, b -> c <- d, непокрытые п.н. пути от a к b и d с несмежными первыми узлами: a -> c."""
        g = self.g
        changed = False
        for a, c in self._circle_arrows():
            parents = [p for p in g.neighbors(c) if p != a and g.is_parent(p, c)]
            if len(parents) < 2:
                continue
            starts = {p: self._path_starts(a, p) for p in parents}
            found = False
            for b, d in combinations(parents, 2):
                for mu in starts[b]:
                    for omega in starts[d]:
                        if mu != omega and not g.is_adjacent(mu, omega):
                            found = True
                            break
                    if found:
                        break
                if found:
                    break
            if found:
                changed |= self._apply([(a, c, TAIL)])
        return changed

    def _path_starts(self, a: Hashable, target: Hashable) -> List[Hashable]:
        """Первые узлы непокрытых п.н. путей от a к target."""
        g = self.g
        starts = []
        for mu in g.neighbors(a):
            if not self._potentially_directed(a, mu):
                continue
            if mu == target or self._uncovered_pd_path([a, mu], target):
                starts.append(mu)
        return starts

    def _circle_arrows(self) -> List[Tuple[Hashable, Hashable]]:
        g = self.g
        return [(a, c) for a in g.nodes for c in g.neighbors(a)
                if g.mark_at(a, c) == CIRCLE and g.mark_at(c, a) == HEAD]

    def _potentially_directed(self, u: Hashable, v: Hashable) -> bool:
        return self.g.mark_at(u, v) != HEAD and self.g.mark_at(v, u) != TAIL

    def _uncovered_pd_path(self, prefix: List[Hashable], target: Hashable) -> bool:
        """
        Проверяет, продолжается ли префикс до target непокрытым п.н. путем.

        Args:
            prefix: Начало пути (не менее двух узлов)
            target: Конечный узел

        Returns:
            True, если путь найден
        """
        g = self.g
        on_path = set(prefix)
        budget = [PATH_SEARCH_LIMIT]

        def extend(prev: Hashable, cur: Hashable) -> bool:
            for nxt in g.neighbors(cur):
                if nxt in on_path or g.is_adjacent(prev, nxt):
                    continue
                if not self._potentially_directed(cur, nxt):
                    continue
                if nxt == target:
                    return True
                budget[0] -= 1
                if budget[0] <= 0:
                    return False
                on_path.add(nxt)
                if extend(cur, nxt):
                    return True
                on_path.discard(nxt)
            return False

        if target in on_path:
            return False
        found = extend(prefix[-2], prefix[-1])
        if budget[0] <= 0:
            logger.warning(f"Поиск непокрытого пути к {target} прерван по лимиту шагов")
        return found


def orient(g: Pag, sepsets: Optional[Mapping] = None) -> Pag:
    """
    Ориентирует метки графа по его скелету и разделяющим множествам.

    Args:
        g: PAG (метки будут перезаписаны)
        sepsets: Разделяющие множества по парам; если None, используются записанные в графе

    Returns:
        Тот же граф с ориентированными метками
    """
    if sepsets is not None:
        g.sepsets = {frozenset(pair): frozenset(z) for pair, z in sepsets.items()}
    return OrientationEngine(g).run()
