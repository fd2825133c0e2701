import os
import json
import logging
from typing import Optional, Dict, Any

logger = logging.getLogger(__name__)

SEED_ENV_VAR = "TSICD_SEED"


class SettingsError(ValueError):
    """Некорректное значение настройки из окружения."""


class RunSettings:
    """Класс для хранения и управления настройками запусков поиска."""

    def __init__(self, config_path: Optional[str] = None):
        """
        Инициализирует настройки.

        Args:
            config_path: Путь к файлу конфигурации (None - только значения по умолчанию)
        """
        self.config_path = config_path
        self._set_defaults()
        if config_path:
            self._load_settings()

    def _set_defaults(self) -> None:
        # Поиск
        self.alpha = 0.01  # Порог p-значения
        self.window = 2  # Длина окна (число лагов в прошлое)
        self.test = "parcorr"  # Проверка независимости: parcorr, gsq, oracle
        self.order = "default"  # Порядок ребер: default, swapped, random
        self.strict_counts = False  # Ошибка при превышении оценки числа проверок
        self.fisher_method = "residual"  # Способ вычисления частной корреляции
        self.gsq_min_samples_factor = 10  # Минимум наблюдений на степень свободы G^2
        self.cache_tests = False  # Запоминать результаты одинаковых проверок

        # Моделирование
        self.seed = self._seed_from_environment()  # Начальное значение генератора
        self.burn_in = 200  # Число отбрасываемых начальных шагов
        self.exhaustive_limit = 8  # Предел размера окна для полного перебора разделяющих множеств

        # Вывод
        self.output_dir = "results"
        self.workers = 1  # Число процессов для серий запусков

        # Логирование
        self.log_level = "INFO"
        self.log_to_file = False

    @staticmethod
    def _seed_from_environment() -> int:
        raw = os.environ.get(SEED_ENV_VAR)
        if raw is None or not raw.strip():
            return 0
        try:
            return int(raw)
        except ValueError:
            raise SettingsError(f"Переменная окружения {SEED_ENV_VAR} должна быть целым числом: {raw!r}") from None

    def _load_settings(self) -> None:
        """Загружает настройки из файла конфигурации."""
        if not os.path.exists(self.config_path):
            logger.info(f"Файл конфигурации {self.config_path} не найден, используются настройки по умолчанию")
            return
        with open(self.config_path, 'r', encoding='utf-8') as f:
            settings = json.load(f)
        self.from_dict(settings)
        logger.info(f"Настройки загружены из {self.config_path}")

    def save_settings(self, path: Optional[str] = None) -> bool:
        """
        Сохраняет настройки в файл конфигурации.

        Args:
            path: Путь к файлу (по умолчанию config_path)

        Returns:
            True в случае успеха, False в случае ошибки
        """
        path = path or self.config_path
        if not path:
            logger.error("Не задан путь для сохранения настроек")
            return False
        try:
            config_dir = os.path.dirname(path)
            if config_dir:
                os.makedirs(config_dir, exist_ok=True)
            with open(path, 'w', encoding='utf-8') as f:
                json.dump(self.to_dict(), f, indent=4, ensure_ascii=False)
            logger.info(f"Настройки сохранены в {path}")
            return True
        except OSError as e:
            logger.error(f"Ошибка при сохранении настроек: {e}")
            return False

    def to_dict(self) -> Dict[str, Any]:
        """
        Преобразует настройки в словарь.

        Returns:
            Словарь с настройками
        """
        return {key: value for key, value in vars(self).items() if key != 'config_path'}

    def from_dict(self, settings_dict: Dict[str, Any]) -> None:
        """
        Обновляет настройки из словаря; неизвестные ключи пропускаются с предупреждением.

        Args:
            settings_dict: Словарь с настройками
        """
        for key, value in settings_dict.items():
            if key != 'config_path' and hasattr(self, key):
                setattr(self, key, value)
            else:
                logger.warning(f"Неизвестная настройка {key} пропущена")

    def reset_to_defaults(self) -> None:
        """Сбрасывает настройки к значениям по умолчанию."""
        self._set_defaults()
        logger.info("Настройки сброшены к значениям по умолчанию")
