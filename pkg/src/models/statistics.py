import json
import logging
import time
from collections import Counter
from datetime import datetime
from typing import Any, Dict, List, Optional

logger = logging.getLogger(__name__)


class RunReport:
    """Отчет об одном запуске поиска: счетчики проверок, итерации, конфликты, ресурсы."""

    def __init__(self, test: str = "", alpha: float = 0.01, order: str = "default",
                 n: int = 0, window: int = 0):
        self.test = test
        self.alpha = alpha
        self.order = order
        self.n = n
        self.window = window

        self.histogram: Counter = Counter()  # Число проверок по размеру условия
        self.iterations: List[Dict[str, Any]] = []  # Записи по итерациям r
        self.conflicts: List[str] = []  # Конфликты меток ориентации
        self.edges_total = 0
        self.edges_temporal = 0
        self.edges_contemporaneous = 0

        self.start_time = time.time()
        self.runtime = 0.0
        self.peak_memory_mb: Optional[float] = None
        self.metrics: Dict[str, float] = {}  # Оценки качества относительно истинного графа

    @property
    def total_tests(self) -> int:
        return sum(self.histogram.values())

    def add_iteration(self, r: int, tests: int, edges: int, done: bool) -> None:
        """
        Добавляет запись об итерации.

        Args:
            r: Размер условия
            tests: Число проверок на этой итерации
            edges: Число оставшихся классов ребер
            done: Признак завершения
        """
        self.iterations.append({'r': r, 'tests': tests, 'edges': edges, 'done': done})

    def finish(self, runtime: Optional[float] = None) -> None:
        self.runtime = time.time() - self.start_time if runtime is None else runtime

    def to_dict(self) -> Dict[str, Any]:
        """
        Преобразует отчет в словарь.

        Returns:
            Словарь с данными отчета
        """
        return {
            'test': self.test,
            'alpha': self.alpha,
            'order': self.order,
            'n': self.n,
            'window': self.window,
            'ci_histogram': {str(k): v for k, v in sorted(self.histogram.items())},
            'ci_total': self.total_tests,
            'iterations': [dict(it) for it in self.iterations],
            'conflicts': list(self.conflicts),
            'edges_total': self.edges_total,
            'edges_temporal': self.edges_temporal,
            'edges_contemporaneous': self.edges_contemporaneous,
            'runtime': self.runtime,
            'peak_memory_mb': self.peak_memory_mb,
            'metrics': dict(self.metrics),
            'start_time_str': datetime.fromtimestamp(self.start_time).strftime('%Y-%m-%d %H:%M:%S'),
        }

    @classmethod
    def from_dict(cls, report_dict: Dict[str, Any]) -> "RunReport":
        """
        Восстанавливает отчет из словаря.

        Args:
            report_dict: Словарь, полученный из to_dict

        Returns:
            Отчет
        """
        report = cls(report_dict.get('test', ''), report_dict.get('alpha', 0.01),
                     report_dict.get('order', 'default'), report_dict.get('n', 0),
                     report_dict.get('window', 0))
        report.histogram = Counter({int(k): v for k, v in report_dict.get('ci_histogram', {}).items()})
        report.iterations = [dict(it) for it in report_dict.get('iterations', [])]
        report.conflicts = list(report_dict.get('conflicts', []))
        for key in ('edges_total', 'edges_temporal', 'edges_contemporaneous', 'runtime', 'peak_memory_mb'):
            if key in report_dict:
                setattr(report, key, report_dict[key])
        report.metrics = dict(report_dict.get('metrics', {}))
        if 'start_time_str' in report_dict:
            report.start_time = datetime.strptime(report_dict['start_time_str'], '%Y-%m-%d %H:%M:%S').timestamp()
        return report

    def to_text(self) -> str:
        """
        Печатает отчет: строки "ключ: значение" и затем блок JSON.

        Returns:
            Текст отчета
        """
        lines = [
            f"test: {self.test}",
            f"alpha: {self.alpha:g}",
            f"order: {self.order}",
            f"variables: {self.n}",
            f"window: {self.window}",
            f"ci_total: {self.total_tests}",
        ]
        lines.extend(f"ci_size_{k}: {v}" for k, v in sorted(self.histogram.items()))
        lines.extend([
            f"edges_total: {self.edges_total}",
            f"edges_temporal: {self.edges_temporal}",
            f"edges_contemporaneous: {self.edges_contemporaneous}",
            f"conflicts: {len(self.conflicts)}",
            f"runtime_sec: {self.runtime:.3f}",
        ])
        if self.peak_memory_mb is not None:
            lines.append(f"peak_memory_mb: {self.peak_memory_mb:.1f}")
        lines.extend(f"{key}: {value:.4f}" for key, value in sorted(self.metrics.items()))
        lines.extend(f"conflict: {c}" for c in self.conflicts)
        lines.append("---")
        lines.append(json.dumps(self.to_dict(), indent=2, ensure_ascii=False))
        return "\n".join(lines) + "\n"

    @staticmethod
    def parse_text(text: str) -> "RunReport":
        """Восстанавливает отчет из текста, созданного to_text."""
        _, _, block = text.partition("\n---\n")
        if not block:
            raise ValueError("В тексте отчета нет блока JSON")
        return RunReport.from_dict(json.loads(block))
