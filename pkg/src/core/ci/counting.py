import logging
import threading
from collections import Counter
from typing import Dict, FrozenSet, Hashable, Tuple

from src.core.ci.base import CITest, CiRecord

logger = logging.getLogger(__name__)


class CountingTest(CITest):
    """Обертка, считающая каждый вызов проверки по размеру условия."""

    def __init__(self, inner: CITest):
        super().__init__(inner.alpha)
        self.inner = inner
        self.name = inner.name
        self.histogram: Counter = Counter()
        self._lock = threading.Lock()

    @property
    def total(self) -> int:
        return sum(self.histogram.values())

    def test(self, x: Hashable, y: Hashable, z: FrozenSet[Hashable]) -> CiRecord:
        with self._lock:
            self.histogram[len(z)] += 1
        return self.inner.test(x, y, z)

    def reset(self) -> None:
        with self._lock:
            self.histogram.clear()


class CachedTest(CITest):
    """Обертка, запоминающая результаты одинаковых запросов."""

    def __init__(self, inner: CITest):
        super().__init__(inner.alpha)
        self.inner = inner
        self.name = inner.name
        self._cache: Dict[Tuple[FrozenSet, FrozenSet], CiRecord] = {}
        self.hits = 0

    def test(self, x: Hashable, y: Hashable, z: FrozenSet[Hashable]) -> CiRecord:
        key = (frozenset((x, y)), z)
        if key in self._cache:
            self.hits += 1
            cached = self._cache[key]
            return CiRecord(x, y, z, cached.p_value, cached.independent, cached.statistic, cached.degenerate)
        record = self.inner.test(x, y, z)
        self._cache[key] = record
        return record
