import os
import time
import logging
import tempfile
import functools
from typing import List

logger = logging.getLogger(__name__)


def handle_exceptions(logger=None, default_return=None, show_traceback=True):
    """
    Декоратор для обработки исключений в функциях.

    Args:
        logger: Логгер для записи ошибок
        default_return: Значение, возвращаемое в случае ошибки
        show_traceback: Показывать ли полный traceback

    Returns:
        Декорированная функция
    """

    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except Exception as e:
                log = logger or logging.getLogger(func.__module__)
                log_message = f"Ошибка в {func.__name__}: {e}"
                if show_traceback:
                    log.error(log_message, exc_info=True)
                else:
                    log.error(log_message)
                return default_return

        return wrapper

    return decorator


def retry(max_tries=3, delay=1, backoff=2, exceptions=(Exception,), logger=None):
    """
    Декоратор для повторного выполнения функции в случае ошибки.

    Args:
        max_tries: Максимальное количество попыток
        delay: Начальная задержка между попытками (секунды)
        backoff: Фактор увеличения задержки с каждой попыткой
        exceptions: Кортеж исключений, которые будут перехватываться
        logger: Логгер для записи ошибок

    Returns:
        Декорированная функция
    """

    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            log = logger or logging.getLogger(func.__module__)
            tries, _delay = 0, delay
            while True:
                try:
                    return func(*args, **kwargs)
                except exceptions as e:
                    tries += 1
                    if tries >= max_tries:
                        log.error(f"Функция {func.__name__} не выполнена после {max_tries} попыток. Ошибка: {e}")
                        raise
                    log.debug(f"Попытка {tries}/{max_tries} для {func.__name__} не удалась: {e}")
                    if _delay:
                        time.sleep(_delay)
                    _delay *= backoff

        return wrapper

    return decorator


def format_time(seconds: float) -> str:
    """
    Форматирует время в секундах в строку вида ЧЧ:ММ:СС.

    Args:
        seconds: Время в секундах

    Returns:
        Отформатированная строка
    """
    hours, remainder = divmod(int(seconds), 3600)
    minutes, seconds = divmod(remainder, 60)
    return f"{hours:02}:{minutes:02}:{seconds:02}"


def ensure_directory_exists(path: str) -> None:
    """
    Создает директорию, если ее нет.

    Args:
        path: Путь к директории
    """
    if path and not os.path.isdir(path):
        os.makedirs(path, exist_ok=True)
        logger.info(f"Создана директория: {path}")


def save_to_file(content: str, filename: str) -> None:
    """
    Атомарно записывает содержимое в файл через временный файл в той же папке.

    Args:
        content: Содержимое для сохранения
        filename: Имя файла
    """
    directory = os.path.dirname(filename) or '.'
    ensure_directory_exists(directory)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix='.tmp_', suffix=os.path.basename(filename))
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='\n') as f:
            f.write(content)
        os.replace(tmp_path, filename)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise
    logger.debug(f"Файл сохранен: {filename}")


def parse_int_range(text: str) -> List[int]:
    """
    Разбирает список целых чисел: "3", "0..9", "1,4,7" или их комбинацию "0..2,5".

    Args:
        text: Строка диапазона (границы включительно)

    Returns:
        Список чисел в порядке перечисления
    """
    values: List[int] = []
    for part in text.split(','):
        part = part.strip()
        if not part:
            continue
        if '..' in part:
            low_text, high_text = part.split('..', 1)
            low, high = int(low_text), int(high_text)
            if high < low:
                raise ValueError(f"Пустой диапазон: {part}")
            values.extend(range(low, high + 1))
        else:
            values.append(int(part))
    if not values:
        raise ValueError(f"Пустой список значений: {text!r}")
    return values
