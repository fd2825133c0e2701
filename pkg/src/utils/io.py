import json
import logging
import re
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.core.graph import DynamicPag, TimedNode, format_marks, parse_marks
from src.utils.helpers import save_to_file

logger = logging.getLogger(__name__)

_EDGE_LINE = re.compile(r"^(?P<a>.+?\(t(?:-\d+)?\))\s+(?P<marks>\S-\S)\s+(?P<b>.+\(t(?:-\d+)?\))$")
_NODE_LABEL = re.compile(r"^(?P<name>.+)\(t(?:-(?P<lag>\d+))?\)$")


class DataFormatError(ValueError):
    """Некорректный входной файл."""


def read_series_csv(path: str) -> pd.DataFrame:
    """
    Читает временной ряд из CSV: первая строка - имена переменных, строки упорядочены по времени.

    Args:
        path: Путь к файлу

    Returns:
        Таблица с числовыми столбцами
    """
    try:
        frame = pd.read_csv(path, sep=',', encoding='utf-8')
    except (pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError) as e:
        raise DataFormatError(f"Не удалось прочитать {path}: {e}") from e
    if frame.shape[1] == 0 or frame.shape[0] == 0:
        raise DataFormatError(f"Файл {path} не содержит данных")
    try:
        frame = frame.apply(pd.to_numeric, errors='raise')
    except (ValueError, TypeError) as e:
        raise DataFormatError(f"Нечисловое значение в {path}: {e}") from e
    if frame.isna().any().any():
        raise DataFormatError(f"В {path} есть пропущенные значения")
    if not np.all(np.isfinite(frame.to_numpy(dtype=float))):
        raise DataFormatError(f"В {path} есть бесконечные значения")
    logger.info(f"Прочитан ряд {path}: {frame.shape[0]} строк, {frame.shape[1]} переменных")
    return frame


def write_series_csv(table: np.ndarray, names: Sequence[str], path: str) -> None:
    frame = pd.DataFrame(np.asarray(table), columns=list(names))
    save_to_file(frame.to_csv(index=False, float_format='%.10g', lineterminator='\n'), path)


def format_graph(g: DynamicPag, names: Optional[List[str]] = None,
                 conflicts: Sequence[str] = ()) -> str:
    """
    Печатает граф в текстовом формате: заголовок из комментариев и по ребру на строку.

    Args:
        g: Динамический PAG
        names: Имена переменных
        conflicts: Описания конфликтов меток

    Returns:
        Текст графа
    """
    names = list(names) if names else [f"X{i}" for i in range(g.n)]
    if len(names) != g.n:
        raise ValueError(f"Число имен {len(names)} не совпадает с числом переменных {g.n}")
    lines = [f"# variables: {json.dumps(names, ensure_ascii=False)}", f"# window: {g.w}"]
    lines.extend(f"# conflict: {c}" for c in conflicts)
    for edge in g.minimal_edges():
        lines.append(f"{edge.a.label(names)} {format_marks(edge.mark_at_a, edge.mark_at_b)} {edge.b.label(names)}")
    return "\n".join(lines) + "\n"


def _parse_node(label: str, index: dict) -> TimedNode:
    match = _NODE_LABEL.match(label.strip())
    if not match or match.group('name') not in index:
        raise DataFormatError(f"Неизвестный узел: {label!r}")
    return TimedNode(index[match.group('name')], int(match.group('lag') or 0))


def parse_graph(text: str) -> Tuple[DynamicPag, List[str]]:
    """
    Разбирает граф из текстового формата; ребра восстанавливаются по гомологии.

    Args:
        text: Текст графа

    Returns:
        Кортеж (граф, имена переменных)
    """
    names: Optional[List[str]] = None
    window: Optional[int] = None
    edge_lines = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith('#'):
            key, _, value = line[1:].partition(':')
            key = key.strip()
            if key == 'variables':
                names = json.loads(value)
            elif key == 'window':
                window = int(value)
            continue
        edge_lines.append(line)
    if names is None or window is None:
        raise DataFormatError("В заголовке графа нет строк variables и window")

    g = DynamicPag(len(names), window)
    index = {name: i for i, name in enumerate(names)}
    for line in edge_lines:
        match = _EDGE_LINE.match(line)
        if not match:
            raise DataFormatError(f"Некорректная строка ребра: {line!r}")
        a = _parse_node(match.group('a'), index)
        b = _parse_node(match.group('b'), index)
        mark_a, mark_b = parse_marks(match.group('marks'))
        if not (0 <= a.lag <= window and 0 <= b.lag <= window):
            raise DataFormatError(f"Ребро {line!r} выходит за окно {window}")
        g.add_edge_homologous(a, b, mark_a, mark_b)
    return g, names


def write_graph(g: DynamicPag, path: str, names: Optional[List[str]] = None,
                conflicts: Sequence[str] = ()) -> None:
    save_to_file(format_graph(g, names, conflicts), path)


def read_graph(path: str) -> Tuple[DynamicPag, List[str]]:
    with open(path, 'r', encoding='utf-8') as f:
        return parse_graph(f.read())
