import logging
from math import comb
from typing import NamedTuple, Sequence, Tuple

import numpy as np
from scipy.special import binom

from src.core.graph import DynamicPag

logger = logging.getLogger(__name__)


class Confusion(NamedTuple):
    """Матрица ошибок по классам гомологии пар узлов."""

    tp: int
    fp: int
    fn: int
    tn: int


def _check_same_universe(truth: DynamicPag, learned: DynamicPag) -> None:
    if (truth.n, truth.w) != (learned.n, learned.w):
        raise ValueError(f"Графы над разными узлами: n={truth.n}, w={truth.w} и n={learned.n}, w={learned.w}")


def pair_universe_size(n: int, w: int) -> int:
    """Число классов гомологии пар узлов: C(n, 2) + w * n^2."""
    return comb(n, 2) + w * n * n


def skeleton_confusion(truth: DynamicPag, learned: DynamicPag) -> Confusion:
    """
    Сравнивает скелеты по представителям классов гомологии.

    Args:
        truth: Истинный граф
        learned: Найденный граф

    Returns:
        Confusion(TP, FP, FN, TN)
    """
    _check_same_universe(truth, learned)
    true_pairs = {(e.a, e.b) for e in truth.minimal_edges()}
    learned_pairs = {(e.a, e.b) for e in learned.minimal_edges()}
    tp = len(true_pairs & learned_pairs)
    fp = len(learned_pairs - true_pairs)
    fn = len(true_pairs - learned_pairs)
    tn = pair_universe_size(truth.n, truth.w) - tp - fp - fn
    return Confusion(tp, fp, fn, tn)


def skeleton_f1(c: Confusion) -> float:
    denominator = 2 * c.tp + c.fp + c.fn
    if denominator == 0:
        # Оба графа без ребер
        return 1.0
    return 2 * c.tp / denominator


def precision(c: Confusion) -> float:
    predicted = c.tp + c.fp
    if predicted == 0:
        return 1.0 if c.fn == 0 else 0.0
    return c.tp / predicted


def recall(c: Confusion) -> float:
    actual = c.tp + c.fn
    if actual == 0:
        return 1.0 if c.fp == 0 else 0.0
    return c.tp / actual


def fpr(c: Confusion) -> float:
    negatives = c.fp + c.tn
    return c.fp / negatives if negatives else 0.0


def fnr(c: Confusion) -> float:
    positives = c.tp + c.fn
    return c.fn / positives if positives else 0.0


def causal_accuracy(truth: DynamicPag, learned: DynamicPag) -> float:
    """
    Доля истинных ребер, найденных с обеими метками как в истинном графе.

    Для истинного графа без ребер возвращает 1.0.

    Args:
        truth: Истинный граф
        learned: Найденный граф

    Returns:
        Доля от 0 до 1
    """
    _check_same_universe(truth, learned)
    edges = truth.minimal_edges()
    if not edges:
        return 1.0
    correct = 0
    for edge in edges:
        if not learned.is_adjacent(edge.a, edge.b):
            continue
        if (learned.mark_at(edge.a, edge.b) == edge.mark_at_a
                and learned.mark_at(edge.b, edge.a) == edge.mark_at_b):
            correct += 1
    return correct / len(edges)


def score(truth: DynamicPag, learned: DynamicPag) -> dict:
    """Все оценки качества найденного графа в одном словаре."""
    c = skeleton_confusion(truth, learned)
    return {
        'skeleton_f1': skeleton_f1(c),
        'precision': precision(c),
        'recall': recall(c),
        'fpr': fpr(c),
        'fnr': fnr(c),
        'causal_accuracy': causal_accuracy(truth, learned),
    }


def icd_bound(n: int, tau: int, r: int) -> int:
    """
    Верхняя оценка числа проверок ICD при условии размера r.

    Args:
        n: Число переменных в срезе
        tau: Длина окна
        r: Размер условия

    Returns:
        (tau + 1) * n^2 * C((tau + 1) * n - 2, r)
    """
    nodes = (tau + 1) * n
    if not 0 <= r <= nodes - 2:
        raise ValueError(f"Размер условия {r} вне диапазона [0, {nodes - 2}]")
    return (tau + 1) * n * n * comb(nodes - 2, r)


def _binomial(k: float, r: int, generalized: bool) -> float:
    if generalized:
        return float(binom(k, r)) if k >= r else 0.0
    k = int(k)
    return float(comb(k, r)) if 0 <= r <= k else 0.0


def tsicd_bound(n: int, tau: int, r: int, rho: float, generalized: bool = False) -> float:
    """
    Верхняя оценка числа проверок TS-ICD при условии размера r.

    Args:
        n: Число переменных в срезе
        tau: Длина окна
        r: Размер условия
        rho: Доля ребер, оставшихся после предыдущих итераций (0 < rho < 1)
        generalized: Вычислять биномиальный коэффициент через гамма-функцию без округления

    Returns:
        n^2 * сумма по l от 0 до tau C((tau + 1 - l) * n + l * rho * n - 2, r)
    """
    if not 0 < rho < 1:
        raise ValueError(f"Доля оставшихся ребер должна лежать в (0, 1): {rho}")
    if r < 0:
        raise ValueError(f"Размер условия должен быть неотрицательным: {r}")
    total = 0.0
    for lag in range(tau + 1):
        remaining = lag * rho * n
        if not generalized:
            remaining = np.floor(remaining + 0.5)
        total += _binomial((tau + 1 - lag) * n + remaining - 2, r, generalized)
    return n * n * total


def median_mad(values: Sequence[float]) -> Tuple[float, float]:
    """
    Медиана и среднее абсолютное отклонение от медианы.

    Args:
        values: Непустой набор значений

    Returns:
        Кортеж (медиана, MAD)
    """
    data = np.asarray(values, dtype=float)
    if data.size == 0:
        raise ValueError("Пустой набор значений")
    median = float(np.median(data))
    return median, float(np.mean(np.abs(data - median)))
