import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from datetime import datetime
from typing import Optional, Union


def setup_logger(log_level: Union[int, str] = logging.INFO, log_to_file: bool = False,
                 log_dir: str = "logs") -> logging.Logger:
    """
    Настраивает систему логирования.

    Args:
        log_level: Уровень логирования (число или имя уровня)
        log_to_file: Флаг записи логов в файл
        log_dir: Папка для файлов логов

    Returns:
        Настроенный корневой логгер
    """
    if isinstance(log_level, str):
        level = logging.getLevelName(log_level.upper())
        if not isinstance(level, int):
            raise ValueError(f"Неизвестный уровень логирования: {log_level}")
        log_level = level

    logger = logging.getLogger()
    logger.setLevel(log_level)

    for handler in logger.handlers[:]:
        logger.removeHandler(handler)

    formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s', '%Y-%m-%d %H:%M:%S')

    # Отчеты и графы печатаются в stdout, поэтому логи идут в stderr
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(log_level)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_to_file:
        try:
            path = Path(log_dir)
            path.mkdir(parents=True, exist_ok=True)
            log_file = path / f"tsicd_{datetime.now().strftime('%Y%m%d')}.log"
            file_handler = RotatingFileHandler(
                log_file,
                maxBytes=10 * 1024 * 1024,  # 10 МБ
                backupCount=5,
                encoding='utf-8'
            )
            file_handler.setLevel(log_level)
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)
        except OSError as e:
            logger.error(f"Не удалось настроить запись логов в файл: {e}")

    return logger


class LoggerAdapter(logging.LoggerAdapter):
    """
    Адаптер для добавления контекста запуска в логи.
    """

    def __init__(self, logger: logging.Logger, context: Optional[dict] = None):
        super().__init__(logger, context or {})

    def process(self, msg, kwargs):
        """
        Обрабатывает сообщение, добавляя контекст вида [ключ=значение].

        Args:
            msg: Сообщение
            kwargs: Дополнительные аргументы

        Returns:
            Кортеж (обработанное сообщение, обработанные аргументы)
        """
        if self.extra:
            context_str = ' '.join([f"[{k}={v}]" for k, v in self.extra.items()])
            msg = f"{msg} {context_str}"
        return msg, kwargs


def get_run_logger(run_id: str, seed: Optional[int] = None) -> logging.LoggerAdapter:
    """
    Создает адаптер логгера для одного повторения серии запусков.

    Args:
        run_id: Идентификатор запуска
        seed: Начальное значение генератора

    Returns:
        Адаптер логгера с контекстом
    """
    logger = logging.getLogger(f"tsicd.run.{run_id}")
    context = {'run': run_id}
    if seed is not None:
        context['seed'] = seed
    return LoggerAdapter(logger, context)
