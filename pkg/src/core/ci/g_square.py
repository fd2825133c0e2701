import logging
from typing import FrozenSet, Hashable, Iterable, Tuple

import numpy as np
from scipy.stats import chi2

from src.core.ci.base import CITest, CiRecord
from src.core.ci.dataset import Dataset

logger = logging.getLogger(__name__)


def g_square_statistic(tables: Iterable[np.ndarray]) -> Tuple[float, int]:
    """
    Суммирует статистику G^2 и степени свободы по слоям условия.

    Нулевые строки и столбцы слоя отбрасываются; слой без хотя бы двух
    непустых строк и столбцов не вносит вклада.

    Args:
        tables: Таблицы сопряженности (x, y) для каждого слоя

    Returns:
        Кортеж (G^2, число степеней свободы)
    """
    statistic = 0.0
    dof = 0
    for table in tables:
        table = np.asarray(table, dtype=float)
        table = table[table.sum(axis=1) > 0][:, table.sum(axis=0) > 0]
        rows, cols = table.shape
        if rows < 2 or cols < 2:
            continue
        expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / table.sum()
        observed = table > 0
        statistic += 2.0 * float(np.sum(table[observed] * np.log(table[observed] / expected[observed])))
        dof += (rows - 1) * (cols - 1)
    return statistic, dof


class GSquareTest(CITest):
    """Проверка G^2 для категориальных данных."""

    name = "gsq"

    def __init__(self, data: Dataset, alpha: float = 0.01, min_samples_factor: float = 10):
        """
        Инициализация проверки.

        Args:
            data: Категориальные данные
            alpha: Уровень значимости
            min_samples_factor: Минимальное число наблюдений на степень свободы
        """
        super().__init__(alpha)
        if not data.categorical:
            raise TypeError("Проверка G^2 требует категориальных данных")
        self.data = data
        self.min_samples_factor = min_samples_factor
        self._codes = {}

    def _encode(self, node: Hashable) -> Tuple[np.ndarray, int]:
        if node not in self._codes:
            levels, codes = np.unique(self.data.column(node), return_inverse=True)
            self._codes[node] = (codes.ravel(), len(levels))
        return self._codes[node]

    def contingency_tables(self, x: Hashable, y: Hashable, z: FrozenSet[Hashable]) -> np.ndarray:
        """Строит массив таблиц сопряженности формы (слои, |x|, |y|)."""
        x_codes, kx = self._encode(x)
        y_codes, ky = self._encode(y)
        if z:
            strata_values = np.column_stack([self._encode(v)[0] for v in sorted(z)])
            _, strata = np.unique(strata_values, axis=0, return_inverse=True)
            strata = strata.ravel()
            n_strata = int(strata.max()) + 1
        else:
            strata = np.zeros(len(x_codes), dtype=int)
            n_strata = 1
        flat = (strata * kx + x_codes) * ky + y_codes
        counts = np.bincount(flat, minlength=n_strata * kx * ky)
        return counts.reshape(n_strata, kx, ky)

    def test(self, x: Hashable, y: Hashable, z: FrozenSet[Hashable]) -> CiRecord:
        statistic, dof = g_square_statistic(self.contingency_tables(x, y, z))
        if dof == 0:
            return CiRecord(x, y, z, 1.0, True, statistic)
        if self.data.n_samples < self.min_samples_factor * dof:
            logger.debug(f"Мало наблюдений для {x} _|_ {y} | {len(z)} узлов "
                         f"(T={self.data.n_samples}, df={dof}): принята независимость")
            return CiRecord(x, y, z, 1.0, True, statistic)
        return self._decide(x, y, z, chi2.sf(statistic, dof), statistic)
