import logging
from typing import Optional

from src.core.ci.base import CITest
from src.core.ci.counting import CachedTest
from src.core.ci.dataset import Dataset
from src.core.ci.fisher_z import FisherZTest
from src.core.ci.g_square import GSquareTest
from src.core.ci.oracle import OracleTest
from src.core.graph import Mag

logger = logging.getLogger(__name__)

TEST_KINDS = ("parcorr", "gsq", "oracle")


class CITestFactory:
    """Фабрика проверок условной независимости."""

    @staticmethod
    def create_test(kind: str, data: Optional[Dataset] = None, mag: Optional[Mag] = None,
                    alpha: float = 0.01, method: str = "residual",
                    min_samples_factor: float = 10, cache: bool = False) -> CITest:
        """
        Создает проверку заданного вида.

        Args:
            kind: Вид проверки: parcorr, gsq или oracle
            data: Данные для статистических проверок
            mag: MAG окна для оракула
            alpha: Уровень значимости
            method: Способ вычисления частной корреляции
            min_samples_factor: Минимальное число наблюдений на степень свободы для G^2
            cache: Запоминать ли результаты одинаковых запросов

        Returns:
            Экземпляр проверки
        """
        if kind == "oracle":
            if mag is None:
                raise ValueError("Для оракула нужен MAG окна")
            test: CITest = OracleTest(mag)
        elif kind in ("parcorr", "gsq"):
            if data is None:
                raise ValueError(f"Для проверки {kind} нужны данные")
            if kind == "parcorr":
                test = FisherZTest(data, alpha, method)
            else:
                test = GSquareTest(data, alpha, min_samples_factor)
        else:
            raise ValueError(f"Неизвестный вид проверки: {kind}; допустимы {', '.join(TEST_KINDS)}")
        logger.debug(f"Создана проверка {test.name} (alpha={alpha})")
        return CachedTest(test) if cache else test
