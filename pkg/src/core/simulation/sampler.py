import logging
from dataclasses import dataclass
from math import ceil
from typing import List, Optional, Tuple

import numpy as np

from src.core.graph import DynamicMag, DynamicPag
from src.core.separation import unrolled_ground_truth
from src.core.simulation.model import Link, SvarModel
from src.utils.helpers import retry

logger = logging.getLogger(__name__)


class ModelSamplingError(ValueError):
    """Не удалось получить стационарную модель за отведенное число попыток."""


@dataclass
class SimulationParams:
    """Параметры генерации случайных моделей."""

    n_observed: int = 5
    latent_fraction: float = 0.3
    tau: int = 3
    extra_links: int = 5
    contemporaneous_fraction: float = 0.3
    autocorrelation: Tuple[float, float] = (0.6, 0.9)
    coefficient: Tuple[float, float] = (0.2, 0.8)
    max_tries: int = 100

    def __post_init__(self):
        if self.n_observed < 1:
            raise ValueError(f"Нужна хотя бы одна наблюдаемая переменная: {self.n_observed}")
        if not 0 <= self.latent_fraction < 1:
            raise ValueError(f"Доля латентных переменных должна лежать в [0, 1): {self.latent_fraction}")
        if self.tau < 1:
            raise ValueError(f"Порядок модели должен быть не меньше 1: {self.tau}")
        if self.extra_links < 0:
            raise ValueError(f"Число дополнительных связей отрицательно: {self.extra_links}")
        if not 0 <= self.contemporaneous_fraction <= 1:
            raise ValueError(f"Доля одновременных связей вне [0, 1]: {self.contemporaneous_fraction}")

    @property
    def n_total(self) -> int:
        return int(ceil(self.n_observed / (1 - self.latent_fraction) - 1e-9))

    @property
    def n_contemporaneous(self) -> int:
        return int(np.floor(self.contemporaneous_fraction * self.extra_links + 0.5))


def _draw_structure(params: SimulationParams, rng: np.random.Generator) -> Tuple[List[Tuple[int, int, int]], Tuple[int, ...]]:
    n = params.n_total
    latent = tuple(sorted(int(v) for v in rng.choice(n, size=n - params.n_observed, replace=False)))
    order = [int(v) for v in rng.permutation(n)]
    position = {v: i for i, v in enumerate(order)}

    edges = {(v, v, 1) for v in range(n)}
    contemporaneous = [(s, t) for s in range(n) for t in range(n) if position[s] < position[t]]
    wanted = min(params.n_contemporaneous, len(contemporaneous))
    for i in rng.choice(len(contemporaneous), size=wanted, replace=False):
        s, t = contemporaneous[int(i)]
        edges.add((s, t, 0))

    lagged = [(s, t, k) for k in range(1, params.tau + 1) for s in range(n) for t in range(n)
              if (s, t, k) not in edges]
    wanted = min(params.extra_links - params.n_contemporaneous, len(lagged))
    for i in rng.choice(len(lagged), size=wanted, replace=False):
        edges.add(lagged[int(i)])
    return sorted(edges), latent


def sample_model(seed: int, params: Optional[SimulationParams] = None) -> SvarModel:
    """
    Генерирует случайную стационарную модель SVAR.

    У каждой переменной есть авторегрессия первого порядка; дополнительные
    связи выбираются случайно, часть из них одновременные. Коэффициенты
    перевыбираются, пока модель не станет стационарной.

    Args:
        seed: Начальное значение генератора
        params: Параметры генерации

    Returns:
        Стационарная модель
    """
    params = params or SimulationParams()
    rng = np.random.default_rng(seed)
    structure, latent = _draw_structure(params, rng)

    @retry(max_tries=params.max_tries, delay=0, backoff=1, exceptions=(ModelSamplingError,), logger=logger)
    def draw_coefficients() -> SvarModel:
        links = []
        for source, target, lag in structure:
            if source == target and lag == 1:
                value = rng.uniform(*params.autocorrelation)
            else:
                value = rng.uniform(*params.coefficient) * rng.choice([-1.0, 1.0])
            links.append(Link(source, target, lag, float(value)))
        model = SvarModel(params.n_total, params.tau, links, latent)
        radius = model.spectral_radius()
        if radius >= 1.0:
            raise ModelSamplingError(f"Модель нестационарна: спектральный радиус {radius:.3f}")
        return model

    model = draw_coefficients()
    logger.debug(f"Модель seed={seed}: {params.n_total} переменных, латентные {list(latent)}, "
                 f"{len(model.links)} связей")
    return model


def simulate(model: SvarModel, length: int, seed: int, burn_in: int = 200) -> np.ndarray:
    """
    Генерирует ряд по модели.

    Args:
        model: Модель
        length: Длина ряда T
        seed: Начальное значение генератора
        burn_in: Число отбрасываемых начальных шагов

    Returns:
        Массив T x (число наблюдаемых переменных)
    """
    if length < 1:
        raise ValueError(f"Длина ряда должна быть положительной: {length}")
    rng = np.random.default_rng(seed)
    total = length + burn_in
    n = model.n_total
    noise = rng.standard_normal((total, n)) * np.asarray(model.noise_scale)
    values = np.zeros((total, n))
    matrices = model.coefficient_matrices()
    # x_t = (I - A0)^-1 (sum_k A_k x_{t-k} + e_t)
    inverse = np.linalg.inv(np.eye(n) - matrices[0])
    for t in range(total):
        value = noise[t].copy()
        for k in range(1, min(model.tau, t) + 1):
            value += matrices[k] @ values[t - k]
        values[t] = inverse @ value
    return values[burn_in:, model.observed]


def binarize(table: np.ndarray) -> np.ndarray:
    """
    Переводит каждый столбец в {0, 1} по его медиане (строго больше медианы - 1).

    Args:
        table: Вещественная таблица T x n

    Returns:
        Целочисленная таблица той же формы
    """
    table = np.asarray(table, dtype=float)
    if table.ndim == 1:
        table = table.reshape(-1, 1)
    return (table > np.median(table, axis=0)).astype(int)


def export_ground_truth(model: SvarModel, w: int, exhaustive_limit: int = 8) -> Tuple[DynamicMag, DynamicPag]:
    """
    Возвращает истинные динамический MAG и PAG окна длины w.

    Args:
        model: Модель
        w: Длина окна
        exhaustive_limit: Предел размера окна для полного перебора разделяющих множеств

    Returns:
        Кортеж (MAG, PAG)
    """
    truth = unrolled_ground_truth(model, w, exhaustive_limit=exhaustive_limit)
    return truth.mag, truth.pag
