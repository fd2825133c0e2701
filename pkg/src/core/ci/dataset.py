import logging
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from src.core.graph import TimedNode

logger = logging.getLogger(__name__)


class Dataset:
    """Таблица наблюдений, столбцы которой помечены узлами графа."""

    def __init__(self, values: np.ndarray, columns: Sequence[TimedNode],
                 names: Optional[List[str]] = None, categorical: Optional[bool] = None):
        """
        Инициализирует набор данных.

        Args:
            values: Матрица T x m
            columns: Узлы, соответствующие столбцам
            names: Имена исходных переменных
            categorical: Являются ли данные категориальными (None - определить автоматически)
        """
        values = np.asarray(values)
        if values.ndim != 2:
            raise ValueError(f"Ожидалась двумерная таблица, получено измерений: {values.ndim}")
        if values.shape[0] < 1:
            raise ValueError("Таблица не содержит наблюдений")
        if values.shape[1] != len(columns):
            raise ValueError(f"Число столбцов {values.shape[1]} не совпадает с числом меток {len(columns)}")
        if not np.all(np.isfinite(values.astype(float))):
            raise ValueError("Таблица содержит пропуски или бесконечные значения")
        self.values = values
        self.columns: List[TimedNode] = list(columns)
        self.names = names
        self._index: Dict[TimedNode, int] = {node: i for i, node in enumerate(self.columns)}
        if categorical is None:
            categorical = bool(np.all(np.equal(np.mod(values, 1), 0)))
        self.categorical = categorical
        if categorical:
            for node in self.columns:
                if self.cardinality(node) < 2:
                    logger.warning(f"Столбец {node.label(names)} принимает одно значение")

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_columns(self) -> int:
        return self.values.shape[1]

    def index_of(self, node: TimedNode) -> int:
        try:
            return self._index[node]
        except KeyError:
            raise KeyError(f"Узел {node} отсутствует в данных") from None

    def column(self, node: TimedNode) -> np.ndarray:
        return self.values[:, self.index_of(node)]

    def columns_for(self, nodes: Iterable[TimedNode]) -> np.ndarray:
        return self.values[:, [self.index_of(node) for node in nodes]]

    def cardinality(self, node: TimedNode) -> int:
        return len(np.unique(self.column(node)))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.values, columns=[node.label(self.names) for node in self.columns])


def window_embed(series: Union[np.ndarray, pd.DataFrame], w: int,
                 categorical: Optional[bool] = None) -> Dataset:
    """
    Разворачивает временной ряд в таблицу окон длины w + 1.

    Столбец (i, k) в строке t содержит значение переменной i в момент t - k.

    Args:
        series: Ряд T x n (если DataFrame, имена столбцов станут именами переменных)
        w: Длина окна
        categorical: Категориальные ли данные

    Returns:
        Набор данных из T - w строк и n * (w + 1) столбцов
    """
    names = None
    if isinstance(series, pd.DataFrame):
        names = [str(c) for c in series.columns]
        series = series.to_numpy()
    series = np.asarray(series)
    if series.ndim == 1:
        series = series.reshape(-1, 1)
    if w < 0:
        raise ValueError(f"Длина окна должна быть неотрицательной: {w}")
    length, n = series.shape
    if length <= w:
        raise ValueError(f"Ряд длины {length} короче окна {w + 1}")
    columns = [TimedNode(var, lag) for lag in range(w + 1) for var in range(n)]
    values = np.column_stack([series[w - node.lag:length - node.lag, node.var] for node in columns])
    logger.debug(f"Окно {w}: {values.shape[0]} строк, {values.shape[1]} столбцов")
    return Dataset(values, columns, names, categorical)
