import os
import time
import psutil
import logging
import threading
from typing import Dict, Any, Optional

logger = logging.getLogger(__name__)


class PerformanceMonitor:
    """Фоновый замер времени работы и пикового потребления памяти процессом."""

    def __init__(self, interval: float = 0.05, enable_logging: bool = False):
        """
        Инициализация монитора.

        Args:
            interval: Интервал опроса памяти (секунды)
            enable_logging: Логировать ли каждый замер
        """
        self.interval = interval
        self.enable_logging = enable_logging
        self.running = False
        self._stop_event = threading.Event()
        self._thread: Optional[threading.Thread] = None

        self.process = psutil.Process(os.getpid())
        self.start_time = 0.0
        self.wall_time = 0.0
        self.peak_rss = 0

    def __enter__(self) -> "PerformanceMonitor":
        self.start()
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.stop()

    def start(self) -> None:
        """Запускает замеры в отдельном потоке."""
        if self.running:
            logger.warning("Монитор производительности уже запущен")
            return
        self.running = True
        self.start_time = time.perf_counter()
        self.peak_rss = self._sample()
        self._stop_event.clear()
        self._thread = threading.Thread(target=self._monitor_loop, daemon=True)
        self._thread.start()
        logger.debug("Монитор производительности запущен")

    def stop(self) -> None:
        """Останавливает замеры и фиксирует время работы."""
        if not self.running:
            return
        self._stop_event.set()
        if self._thread and self._thread.is_alive():
            self._thread.join(timeout=2.0)
        self.peak_rss = max(self.peak_rss, self._sample())
        self.wall_time = time.perf_counter() - self.start_time
        self.running = False
        logger.debug(f"Монитор остановлен: {self.wall_time:.3f} с, пик {format_memory_size(self.peak_rss)}")

    def _sample(self) -> int:
        try:
            return self.process.memory_info().rss
        except psutil.Error as e:
            logger.error(f"Ошибка при замере памяти: {e}")
            return 0

    def _monitor_loop(self) -> None:
        while not self._stop_event.wait(self.interval):
            rss = self._sample()
            self.peak_rss = max(self.peak_rss, rss)
            if self.enable_logging:
                logger.debug(f"Память процесса: {format_memory_size(rss)}")

    @property
    def peak_memory_mb(self) -> float:
        return self.peak_rss / (1024 * 1024)

    def get_metrics(self) -> Dict[str, Any]:
        return {'wall_time': self.wall_time, 'peak_memory_mb': self.peak_memory_mb}


def format_memory_size(size_bytes: int) -> str:
    """
    Форматирует размер в байтах в человекочитаемый формат.

    Args:
        size_bytes: Размер в байтах

    Returns:
        Строка с отформатированным размером
    """
    if size_bytes < 1024:
        return f"{size_bytes} B"
    elif size_bytes < 1024 * 1024:
        return f"{size_bytes / 1024:.2f} KB"
    elif size_bytes < 1024 * 1024 * 1024:
        return f"{size_bytes / (1024 * 1024):.2f} MB"
    else:
        return f"{size_bytes / (1024 * 1024 * 1024):.2f} GB"
