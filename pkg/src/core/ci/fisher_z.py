import logging
from typing import FrozenSet, Hashable, Tuple

import numpy as np
from scipy.stats import norm

from src.core.ci.base import CITest, CiRecord, InsufficientSamplesError
from src.core.ci.dataset import Dataset

logger = logging.getLogger(__name__)

# Ограничение |r| < 1, чтобы atanh оставался конечным
_MAX_CORRELATION = 1.0 - 1e-12


def fisher_z_pvalue(r: float, n_samples: int, cond_size: int) -> Tuple[float, float]:
    """
    Вычисляет статистику Фишера и двустороннее p-значение.

    Args:
        r: Частная корреляция
        n_samples: Число наблюдений
        cond_size: Размер условия

    Returns:
        Кортеж (статистика, p-значение)
    """
    dof = n_samples - cond_size - 3
    if dof <= 0:
        raise InsufficientSamplesError(
            f"Недостаточно наблюдений: T={n_samples}, |z|={cond_size}")
    r = float(np.clip(r, -_MAX_CORRELATION, _MAX_CORRELATION))
    statistic = float(np.sqrt(dof) * abs(np.arctanh(r)))
    p_value = float(2 * norm.sf(statistic))
    return statistic, min(p_value, 1.0)


class FisherZTest(CITest):
    """Проверка частной корреляции с z-преобразованием Фишера."""

    name = "parcorr"

    def __init__(self, data: Dataset, alpha: float = 0.01, method: str = "residual"):
        """
        Инициализация проверки.

        Args:
            data: Непрерывные данные
            alpha: Уровень значимости
            method: Способ вычисления частной корреляции: residual или covariance
        """
        super().__init__(alpha)
        if method not in ("residual", "covariance"):
            raise ValueError(f"Неизвестный способ вычисления корреляции: {method}")
        self.data = data
        self.method = method

    def test(self, x: Hashable, y: Hashable, z: FrozenSet[Hashable]) -> CiRecord:
        n_samples = self.data.n_samples
        if n_samples - len(z) - 3 <= 0:
            raise InsufficientSamplesError(
                f"Недостаточно наблюдений: T={n_samples}, |z|={len(z)}")
        if self.method == "residual":
            r, degenerate = self._residual_correlation(x, y, z)
        else:
            r, degenerate = self._precision_correlation(x, y, z)
        if degenerate:
            logger.warning(f"Вырожденная проверка {x} _|_ {y} | {sorted(z)}: принята зависимость")
            return CiRecord(x, y, z, 0.0, False, None, degenerate=True)
        statistic, p_value = fisher_z_pvalue(r, n_samples, len(z))
        return self._decide(x, y, z, p_value, statistic)

    def partial_correlation(self, x: Hashable, y: Hashable, z: FrozenSet[Hashable]) -> float:
        if self.method == "residual":
            return self._residual_correlation(x, y, z)[0]
        return self._precision_correlation(x, y, z)[0]

    def _residual_correlation(self, x, y, z) -> Tuple[float, bool]:
        xy = self.data.columns_for([x, y]).astype(float)
        design = np.ones((self.data.n_samples, 1))
        if z:
            cond = self.data.columns_for(sorted(z)).astype(float)
            design = np.column_stack([design, cond])
            if np.linalg.matrix_rank(design) < design.shape[1]:
                return 0.0, True
        coef, *_ = np.linalg.lstsq(design, xy, rcond=None)
        residuals = xy - design @ coef
        scale = np.sqrt(np.sum(residuals ** 2, axis=0))
        if np.any(scale <= 1e-12 * np.sqrt(self.data.n_samples)):
            return 0.0, True
        r = float(residuals[:, 0] @ residuals[:, 1] / (scale[0] * scale[1]))
        return r, False

    def _precision_correlation(self, x, y, z) -> Tuple[float, bool]:
        nodes = [x, y] + sorted(z)
        corr = np.corrcoef(self.data.columns_for(nodes).astype(float), rowvar=False)
        corr = np.atleast_2d(corr)
        if not np.all(np.isfinite(corr)) or np.linalg.matrix_rank(corr) < len(nodes):
            return 0.0, True
        precision = np.linalg.inv(corr)
        r = float(-precision[0, 1] / np.sqrt(precision[0, 0] * precision[1, 1]))
        return r, False
