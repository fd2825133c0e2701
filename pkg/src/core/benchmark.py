import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from src.core.ci.dataset import window_embed
from src.core.ci.factory import CITestFactory
from src.core.discovery import DiscoveryConfig, OrderingPolicy, ts_icd
from src.core.metrics import icd_bound, median_mad, score
from src.core.separation import unrolled_ground_truth
from src.core.simulation.sampler import SimulationParams, binarize, sample_model, simulate
from src.utils.helpers import handle_exceptions
from src.utils.logger import get_run_logger

logger = logging.getLogger(__name__)

METRIC_COLUMNS = ("skeleton_f1", "causal_accuracy", "precision", "recall", "fpr", "fnr", "ci_total")


@dataclass
class BenchmarkParams:
    """Параметры серии запусков на случайных моделях."""

    simulation: SimulationParams = field(default_factory=SimulationParams)
    length: int = 500
    window: Optional[int] = None  # по умолчанию порядок модели
    binary: bool = False
    test: str = "parcorr"
    alpha: float = 0.01
    orders: Tuple[str, ...] = ("default",)
    burn_in: int = 200
    exhaustive_limit: int = 8
    fisher_method: str = "residual"
    gsq_min_samples_factor: float = 10

    def __post_init__(self):
        for order in self.orders:
            OrderingPolicy.from_name(order)
        if self.binary and self.test == "parcorr":
            logger.warning("Частная корреляция на бинарных данных: результаты будут смещены")


def run_repetition(params: BenchmarkParams, seed: int) -> List[Dict[str, Any]]:
    """
    Один повтор: модель, ряд, поиск каждым порядком ребер и оценка относительно истины.

    Args:
        params: Параметры серии
        seed: Начальное значение генератора повтора

    Returns:
        По строке результатов на каждый порядок ребер
    """
    run_log = get_run_logger(f"rep{seed}", seed)
    model = sample_model(seed, params.simulation)
    w = params.window if params.window is not None else model.tau
    truth = unrolled_ground_truth(model, w, exhaustive_limit=params.exhaustive_limit)
    n = len(model.observed)

    dataset = None
    if params.test != "oracle":
        series = simulate(model, params.length, seed, params.burn_in)
        if params.binary:
            series = binarize(series)
        dataset = window_embed(series, w, categorical=params.binary)

    rows = []
    for order in params.orders:
        test = CITestFactory.create_test(params.test, data=dataset, mag=truth.window_mag,
                                         alpha=params.alpha, method=params.fisher_method,
                                         min_samples_factor=params.gsq_min_samples_factor)
        config = DiscoveryConfig(n, w, OrderingPolicy.from_name(order, seed), params.alpha)
        learned, report = ts_icd(config, test)
        metrics = score(truth.pag, learned)
        row: Dict[str, Any] = {'seed': seed, 'order': order, **metrics,
                               'ci_total': report.total_tests, 'runtime': report.runtime,
                               'conflicts': len(report.conflicts), 'edges_true': len(truth.pag.minimal_edges()),
                               'edges_learned': report.edges_total,
                               'bound_violations': count_bound_violations(report.iterations, n, w)}
        for size, count in sorted(report.histogram.items()):
            row[f'ci_size_{size}'] = count
        run_log.info(f"Порядок {order}: F1={metrics['skeleton_f1']:.3f}, "
                     f"точность ориентации={metrics['causal_accuracy']:.3f}, проверок={report.total_tests}")
        rows.append(row)
    return rows


def count_bound_violations(iterations: Sequence[Dict[str, Any]], n: int, w: int) -> int:
    """Число итераций, на которых проверок было больше оценки icd_bound."""
    return sum(1 for it in iterations if it['tests'] > icd_bound(n, w, it['r']))


@handle_exceptions(logger=logger, default_return=[])
def _safe_repetition(params: BenchmarkParams, seed: int) -> List[Dict[str, Any]]:
    return run_repetition(params, seed)


class BenchmarkRunner:
    """Параллельный запуск серии повторов."""

    def __init__(self, params: BenchmarkParams, workers: int = 1):
        self.params = params
        self.workers = max(1, workers)

    def run(self, seeds: Sequence[int]) -> pd.DataFrame:
        """
        Выполняет повторы для всех seed.

        Args:
            seeds: Начальные значения генератора

        Returns:
            Таблица сырых результатов, упорядоченная по seed и порядку ребер
        """
        rows: List[Dict[str, Any]] = []
        logger.info(f"Серия из {len(seeds)} повторов, процессов: {self.workers}")
        if self.workers == 1:
            for seed in seeds:
                rows.extend(_safe_repetition(self.params, seed))
        else:
            with ProcessPoolExecutor(max_workers=self.workers) as executor:
                futures = {executor.submit(_safe_repetition, self.params, seed): seed for seed in seeds}
                for future in as_completed(futures):
                    rows.extend(future.result())
        failed = len(seeds) - len({row['seed'] for row in rows})
        if failed:
            logger.warning(f"Не выполнено повторов: {failed}")
        frame = pd.DataFrame(rows)
        if frame.empty:
            return frame
        size_columns = sorted((c for c in frame.columns if c.startswith('ci_size_')),
                              key=lambda c: int(c.rsplit('_', 1)[1]))
        frame[size_columns] = frame[size_columns].fillna(0).astype(int)
        order_rank = {order: i for i, order in enumerate(self.params.orders)}
        frame = frame.sort_values(by=['seed', 'order'], key=lambda s: s.map(order_rank) if s.name == 'order' else s)
        return frame.reset_index(drop=True)


def summarize(frame: pd.DataFrame) -> pd.DataFrame:
    """
    Медиана и MAD основных показателей по каждому порядку ребер.

    Args:
        frame: Сырые результаты серии

    Returns:
        Таблица, индексированная порядком ребер
    """
    records = []
    for order, group in frame.groupby('order', sort=False):
        record: Dict[str, Any] = {'order': order, 'runs': len(group)}
        for column in METRIC_COLUMNS:
            median, mad = median_mad(group[column].tolist())
            record[f'{column}_median'] = median
            record[f'{column}_mad'] = mad
        records.append(record)
    return pd.DataFrame(records).set_index('order')


def cumulative_ci_table(frame: pd.DataFrame) -> pd.DataFrame:
    """
    Медианное число проверок по размеру условия с накоплением и долей от итога.

    Args:
        frame: Сырые результаты серии

    Returns:
        Таблица со строками (порядок, размер условия)
    """
    size_columns = sorted((c for c in frame.columns if c.startswith('ci_size_')),
                          key=lambda c: int(c.rsplit('_', 1)[1]))
    records = []
    for order, group in frame.groupby('order', sort=False):
        medians = [float(group[c].median()) for c in size_columns]
        total = sum(medians)
        cumulative = 0.0
        for column, median in zip(size_columns, medians):
            cumulative += median
            records.append({
                'order': order,
                'size': int(column.rsplit('_', 1)[1]),
                'median': median,
                'cumulative': cumulative,
                'cumulative_pct': 100.0 * cumulative / total if total else 0.0,
            })
    return pd.DataFrame(records)


def lowest_fnr_order(summary: pd.DataFrame) -> str:
    """Порядок ребер с наименьшей медианой доли пропущенных ребер."""
    return str(summary['fnr_median'].idxmin())
