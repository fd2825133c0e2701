import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import FrozenSet, Hashable, Iterable, Optional

logger = logging.getLogger(__name__)


class InsufficientSamplesError(ValueError):
    """Недостаточно наблюдений для проверки с условием заданного размера."""


@dataclass(frozen=True)
class CiRecord:
    """Результат одной проверки условной независимости."""

    x: Hashable
    y: Hashable
    z: FrozenSet[Hashable]
    p_value: Optional[float]
    independent: bool
    statistic: Optional[float] = None
    degenerate: bool = False


class CITest(ABC):
    """Базовый класс проверок условной независимости."""

    name = "base"

    def __init__(self, alpha: float = 0.01):
        """
        Инициализация проверки.

        Args:
            alpha: Порог p-значения, выше которого принимается независимость
        """
        if not 0 < alpha < 1:
            raise ValueError(f"Уровень значимости должен лежать в (0, 1): {alpha}")
        self.alpha = alpha

    @abstractmethod
    def test(self, x: Hashable, y: Hashable, z: FrozenSet[Hashable]) -> CiRecord:
        """
        Проверяет независимость x и y при условии z.

        Args:
            x: Первый узел
            y: Второй узел
            z: Условие

        Returns:
            Результат проверки
        """
        pass

    def __call__(self, x: Hashable, y: Hashable, z: Iterable[Hashable] = ()) -> CiRecord:
        z = frozenset(z)
        if x == y or x in z or y in z:
            raise ValueError(f"Некорректный запрос: {x}, {y} | {sorted(z)}")
        return self.test(x, y, z)

    def _decide(self, x: Hashable, y: Hashable, z: FrozenSet[Hashable], p_value: float,
                statistic: Optional[float] = None) -> CiRecord:
        p_value = min(max(float(p_value), 0.0), 1.0)
        independent = p_value > self.alpha
        logger.debug(f"{self.name}: {x} _|_ {y} | {len(z)} узлов: p={p_value:.4g}, "
                     f"{'независимы' if independent else 'зависимы'}")
        return CiRecord(x, y, z, p_value, independent, statistic)
