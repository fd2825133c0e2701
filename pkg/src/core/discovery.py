import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import AbstractSet, FrozenSet, List, Optional, Tuple

import numpy as np

from src.core.ci.base import CITest
from src.core.ci.counting import CountingTest
from src.core.graph import DynamicPag, TimedNode, describe_conflict, representative_pairs
from src.core.icd import pd_sep_range
from src.core.metrics import icd_bound
from src.core.orientation import orient
from src.models.statistics import RunReport
from src.utils.performance import PerformanceMonitor

logger = logging.getLogger(__name__)

EdgePair = Tuple[TimedNode, TimedNode]


class BoundViolationError(ValueError):
    """Число проверок на итерации превысило верхнюю оценку."""


class OrderingKind(Enum):
    DESCENDING_LAG = "default"
    SWAPPED = "swapped"
    RANDOM = "random"


@dataclass(frozen=True)
class OrderingPolicy:
    """Порядок, в котором ребра проверяются на каждой итерации."""

    kind: OrderingKind = OrderingKind.DESCENDING_LAG
    seed: int = 0

    @classmethod
    def from_name(cls, name: str, seed: int = 0) -> "OrderingPolicy":
        try:
            return cls(OrderingKind(name), seed)
        except ValueError:
            choices = ", ".join(k.value for k in OrderingKind)
            raise ValueError(f"Неизвестный порядок ребер: {name}; допустимы {choices}") from None

    @property
    def name(self) -> str:
        return self.kind.value


@dataclass
class DiscoveryConfig:
    """Параметры запуска поиска."""

    n: int
    w: int
    policy: OrderingPolicy = field(default_factory=OrderingPolicy)
    alpha: float = 0.01
    max_r: Optional[int] = None
    strict_counts: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"Нужно не менее двух переменных: n={self.n}")
        if self.w < 1:
            raise ValueError(f"Длина окна должна быть не меньше 1: w={self.w}")
        if not 0 < self.alpha < 1:
            raise ValueError(f"Уровень значимости должен лежать в (0, 1): {self.alpha}")

    @property
    def r_limit(self) -> int:
        default = self.n * (self.w + 1) - 2
        return default if self.max_r is None else min(self.max_r, default)


def initialize(n: int, w: int) -> DynamicPag:
    """
    Создает полный динамический граф окна.

    Одновременные ребра o-o, временные ребра o-> (стрелка на позднем узле).

    Args:
        n: Число переменных
        w: Длина окна

    Returns:
        Полный динамический PAG
    """
    if n < 2 or w < 1:
        raise ValueError(f"Некорректные размеры графа: n={n}, w={w}")
    g = DynamicPag(n, w)
    for u, v in representative_pairs(n, w):
        g.add_edge_homologous(u, v)
    return g


def refine_homology(edges: List[EdgePair], g: DynamicPag, r: int, test: CITest, reorient: bool = True,
                    shielded: Optional[AbstractSet[FrozenSet[TimedNode]]] = None) -> Tuple[DynamicPag, bool]:
    """
    Проверяет ребра в заданном порядке на условиях размера r.

    При первой найденной независимости ребро удаляется вместе со всеми
    гомологичными ему ребрами, а условие записывается как разделяющее.
    Метки в ходе прохода не меняются; при reorient граф переориентируется
    после прохода.

    Args:
        edges: Ребра в порядке проверки
        g: Текущий граф
        r: Размер условия
        test: Проверка независимости
        reorient: Ориентировать граф после прохода
        shielded: Пары, смежные в начале итерации (см. pd_sep_range)

    Returns:
        Кортеж (граф, done), где done истинно, если ни у одного ребра не было кандидатов
    """
    done = True
    removed = 0
    for x, y in edges:
        if not g.is_adjacent(x, y):
            continue
        candidates = pd_sep_range(x, y, r, g, shielded)
        if not candidates:
            continue
        done = False
        for candidate in candidates:
            record = test(x, y, candidate.z_set)
            if record.independent:
                g.remove_edge_homologous((x, y))
                g.record_sepset((x, y), candidate.z_set)
                removed += 1
                logger.debug(f"Удалено ребро {x} - {y} при условии {sorted(candidate.z_set)}")
                break
    if reorient:
        orient(g)
    logger.debug(f"r={r}: удалено классов ребер {removed} из {len(edges)}")
    return g, done


class TsIcd:
    """Поиск динамического PAG по временному ряду."""

    def __init__(self, config: DiscoveryConfig, test: CITest):
        self.config = config
        self.counter = test if isinstance(test, CountingTest) else CountingTest(test)
        self._rng = np.random.default_rng(config.policy.seed)

    def temporal_edges(self, g: DynamicPag, descending: bool = True) -> List[EdgePair]:
        """Временные ребра, инцидентные узлам с лагом 0, упорядоченные по расстоянию."""
        edges = [(e.a, e.b) for e in g.minimal_edges() if e.a.lag != e.b.lag]
        sign = -1 if descending else 1
        return sorted(edges, key=lambda p: (sign * (p[0].lag - p[1].lag), p[0].var, p[1].var))

    @staticmethod
    def contemporaneous_edges(g: DynamicPag) -> List[EdgePair]:
        edges = [(e.a, e.b) for e in g.minimal_edges() if e.a.lag == e.b.lag]
        return sorted(edges, key=lambda p: (p[0].var, p[1].var))

    def _sweep(self, g: DynamicPag, r: int) -> bool:
        """
        Один уровень r: проходы по ребрам в порядке политики и одна ориентация в конце.

        Кандидаты всех проходов строятся по меткам предыдущего уровня и по
        скелету на начало уровня.
        """
        kind = self.config.policy.kind
        shielded = frozenset(frozenset((e.a, e.b)) for e in g.edges())
        if kind == OrderingKind.RANDOM:
            edges = self.temporal_edges(g) + self.contemporaneous_edges(g)
            order = self._rng.permutation(len(edges))
            sweeps = [[edges[i] for i in order]]
        elif kind == OrderingKind.DESCENDING_LAG:
            sweeps = [self.temporal_edges(g), self.contemporaneous_edges(g)]
        else:
            sweeps = [self.contemporaneous_edges(g), self.temporal_edges(g, descending=False)]
        done = True
        for edges in sweeps:
            _, swept = refine_homology(edges, g, r, self.counter, reorient=False, shielded=shielded)
            done = done and swept
        orient(g)
        return done

    def _check_bound(self, r: int, tests: int) -> None:
        config = self.config
        if r > config.n * (config.w + 1) - 2:
            return
        bound = icd_bound(config.n, config.w, r)
        if tests > bound:
            message = f"Число проверок {tests} при r={r} превышает оценку {bound}"
            if config.strict_counts:
                raise BoundViolationError(message)
            logger.warning(message)

    def run(self) -> Tuple[DynamicPag, RunReport]:
        """
        Выполняет поиск.

        Returns:
            Кортеж (найденный граф, отчет)
        """
        config = self.config
        report = RunReport(self.counter.name, config.alpha, config.policy.name, config.n, config.w)
        logger.info(f"Поиск: n={config.n}, w={config.w}, проверка {self.counter.name}, "
                    f"порядок {config.policy.name}")
        with PerformanceMonitor(enable_logging=logger.isEnabledFor(logging.DEBUG)) as monitor:
            g = initialize(config.n, config.w)
            r = 0
            done = False
            while not done and r <= config.r_limit:
                before = self.counter.histogram[r]
                done = self._sweep(g, r)
                tests = self.counter.histogram[r] - before
                edges = len(g.minimal_edges())
                report.add_iteration(r, tests, edges, done)
                logger.info(f"Итерация r={r}: проверок {tests}, осталось классов ребер {edges}")
                self._check_bound(r, tests)
                r += 1
        report.histogram.update(self.counter.histogram)
        resources = monitor.get_metrics()
        report.finish(resources["wall_time"])
        report.peak_memory_mb = resources["peak_memory_mb"]
        report.conflicts = [describe_conflict(c) for c in g.conflicts]
        minimal = g.minimal_edges()
        report.edges_total = len(minimal)
        report.edges_temporal = sum(1 for e in minimal if e.a.lag != e.b.lag)
        report.edges_contemporaneous = report.edges_total - report.edges_temporal
        logger.info(f"Поиск завершен: {report.total_tests} проверок, {report.edges_total} классов ребер, "
                    f"{report.runtime:.2f} с")
        return g, report


def ts_icd(config: DiscoveryConfig, test: CITest) -> Tuple[DynamicPag, RunReport]:
    return TsIcd(config, test).run()
