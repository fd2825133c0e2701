#!/usr/bin/env python
# -*- coding: utf-8 -*-

import sys
import logging
import argparse
import os
from pathlib import Path
from typing import List, Optional

import pandas as pd

from src.core.benchmark import (BenchmarkParams, BenchmarkRunner, cumulative_ci_table,
                                lowest_fnr_order, summarize)
from src.core.ci.base import InsufficientSamplesError
from src.core.ci.dataset import window_embed
from src.core.ci.factory import TEST_KINDS, CITestFactory
from src.core.discovery import BoundViolationError, DiscoveryConfig, OrderingKind, OrderingPolicy, ts_icd
from src.core.graph import FixedOrientationError, describe_conflict
from src.core.metrics import icd_bound, score, tsicd_bound
from src.core.simulation.sampler import (ModelSamplingError, SimulationParams, binarize,
                                         export_ground_truth, sample_model, simulate)
from src.models.settings import RunSettings, SettingsError
from src.utils.helpers import ensure_directory_exists, format_time, parse_int_range, save_to_file
from src.utils.io import DataFormatError, read_graph, read_series_csv, write_graph, write_series_csv
from src.utils.logger import setup_logger

logger = logging.getLogger("tsicd")

# Ошибки входных данных и аргументов (код выхода 2)
USAGE_ERRORS = (ValueError, TypeError, KeyError, FileNotFoundError, DataFormatError,
                InsufficientSamplesError, ModelSamplingError, BoundViolationError, FixedOrientationError)

ORDER_CHOICES = [kind.value for kind in OrderingKind]


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Парсинг аргументов командной строки."""
    parser = argparse.ArgumentParser(description='Поиск причинных связей во временных рядах (TS-ICD)')
    parser.add_argument('--config', type=str, help='Путь к файлу конфигурации JSON')
    parser.add_argument('--log-level', type=str, choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'],
                        default=None, help='Уровень логирования')
    parser.add_argument('--log-file', action='store_true', help='Записывать логи в файл')
    parser.add_argument('--reset-config', action='store_true',
                        help='Сбросить файл конфигурации к значениям по умолчанию перед запуском')
    commands = parser.add_subparsers(dest='command', required=True)

    sim = commands.add_parser('simulate', help='Сгенерировать модели, ряды и истинные графы')
    _add_model_arguments(sim)
    sim.add_argument('--t', type=int, default=500, help='Длина ряда')
    sim.add_argument('--seeds', type=str, default=None, help='Список seed: "0..9" или "1,5"')
    sim.add_argument('--binary', action='store_true', help='Бинаризовать ряды по медиане')
    sim.add_argument('--window', type=int, default=None, help='Длина окна истинного графа (по умолчанию tau)')
    sim.add_argument('--out', type=str, default=None, help='Папка результатов')

    disc = commands.add_parser('discover', help='Найти граф по ряду из CSV')
    disc.add_argument('--data', type=str, required=True, help='CSV с заголовком из имен переменных')
    disc.add_argument('--window', type=int, default=None, help='Длина окна')
    disc.add_argument('--alpha', type=float, nargs='+', default=None, help='Уровни значимости')
    disc.add_argument('--test', type=str, choices=['parcorr', 'gsq'], default=None, help='Проверка независимости')
    disc.add_argument('--order', type=str, choices=ORDER_CHOICES, default=None, help='Порядок проверки ребер')
    disc.add_argument('--rng-seed', type=int, default=None, help='Seed для случайного порядка')
    disc.add_argument('--max-r', type=int, default=None, help='Максимальный размер условия')
    disc.add_argument('--strict-counts', action='store_true', help='Ошибка при превышении оценки числа проверок')
    disc.add_argument('--truth', type=str, default=None, help='Истинный граф для оценки качества')
    disc.add_argument('--out', type=str, default=None, help='Папка результатов')

    bench = commands.add_parser('benchmark', help='Серия запусков на случайных моделях')
    _add_model_arguments(bench)
    bench.add_argument('--reps', type=int, default=100, help='Число повторов')
    bench.add_argument('--seeds', type=str, default=None, help='Явный список seed (заменяет --reps)')
    bench.add_argument('--t', type=int, default=500, help='Длина ряда')
    bench.add_argument('--binary', action='store_true', help='Бинаризовать ряды по медиане')
    bench.add_argument('--window', type=int, default=None, help='Длина окна (по умолчанию tau)')
    bench.add_argument('--test', type=str, choices=list(TEST_KINDS), default=None, help='Проверка независимости')
    bench.add_argument('--alpha', type=float, default=None, help='Уровень значимости')
    bench.add_argument('--order', type=str, nargs='+', choices=ORDER_CHOICES + ['all'], default=None,
                       help='Порядки проверки ребер')
    bench.add_argument('--workers', type=int, default=None, help='Число процессов')
    bench.add_argument('--out', type=str, default=None, help='Папка результатов')

    bounds = commands.add_parser('bounds', help='Оценки числа проверок независимости')
    bounds.add_argument('--n', type=str, default='5', help='Число переменных (список)')
    bounds.add_argument('--tau', type=str, default='3', help='Длина окна (список)')
    bounds.add_argument('--r', type=str, default='0..3', help='Размеры условия (список)')
    bounds.add_argument('--rho', type=float, nargs='+', default=[0.4], help='Доли оставшихся ребер')
    bounds.add_argument('--generalized', action='store_true', help='Биномиальный коэффициент через гамма-функцию')

    return parser.parse_args(argv)


def _add_model_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--n', type=int, default=5, help='Число наблюдаемых переменных')
    parser.add_argument('--tau', type=int, default=3, help='Порядок модели')
    parser.add_argument('--latent-frac', type=float, default=0.3, help='Доля латентных переменных')
    parser.add_argument('--extra-links', type=int, default=5, help='Число дополнительных связей')
    parser.add_argument('--contemporaneous-frac', type=float, default=0.3,
                        help='Доля одновременных среди дополнительных связей')


def _simulation_params(args: argparse.Namespace) -> SimulationParams:
    return SimulationParams(n_observed=args.n, latent_fraction=args.latent_frac, tau=args.tau,
                            extra_links=args.extra_links, contemporaneous_fraction=args.contemporaneous_frac)


def cmd_simulate(args: argparse.Namespace, settings: RunSettings) -> int:
    """Генерирует наборы данных, описания моделей и истинные графы по каждому seed."""
    params = _simulation_params(args)
    seeds = parse_int_range(args.seeds) if args.seeds else [settings.seed]
    out_dir = args.out or settings.output_dir
    ensure_directory_exists(out_dir)
    names = [f"X{i}" for i in range(params.n_observed)]
    for seed in seeds:
        model = sample_model(seed, params)
        w = args.window if args.window is not None else model.tau
        series = simulate(model, args.t, seed, settings.burn_in)
        if args.binary:
            series = binarize(series)
        _, pag = export_ground_truth(model, w, settings.exhaustive_limit)
        write_series_csv(series, names, os.path.join(out_dir, f"data_{seed}.csv"))
        save_to_file(model.to_text(), os.path.join(out_dir, f"model_{seed}.txt"))
        model.save_to_file(os.path.join(out_dir, f"model_{seed}.json"))
        write_graph(pag, os.path.join(out_dir, f"truth_{seed}.graph"), names)
        logger.info(f"seed={seed}: {len(pag.minimal_edges())} классов истинных ребер")
    print(f"Записано наборов: {len(seeds)} в {out_dir}")
    return 0


def cmd_discover(args: argparse.Namespace, settings: RunSettings) -> int:
    """Ищет граф по ряду из CSV для каждого уровня значимости."""
    frame = read_series_csv(args.data)
    window = args.window if args.window is not None else settings.window
    test_kind = args.test or settings.test
    if test_kind == 'oracle':
        raise ValueError("Оракул доступен только в серии запусков на моделях")
    order = args.order or settings.order
    seed = args.rng_seed if args.rng_seed is not None else settings.seed
    alphas = args.alpha or [settings.alpha]
    names = [str(c) for c in frame.columns]
    dataset = window_embed(frame, window)
    truth = read_graph(args.truth)[0] if args.truth else None

    out_dir = args.out or settings.output_dir
    stem = Path(args.data).stem
    for alpha in alphas:
        test = CITestFactory.create_test(test_kind, data=dataset, alpha=alpha, method=settings.fisher_method,
                                         min_samples_factor=settings.gsq_min_samples_factor,
                                         cache=settings.cache_tests)
        config = DiscoveryConfig(len(names), window, OrderingPolicy.from_name(order, seed), alpha,
                                 args.max_r, args.strict_counts or settings.strict_counts)
        g, report = ts_icd(config, test)
        if truth is not None:
            report.metrics.update(score(truth, g))
        conflicts = [describe_conflict(c, names) for c in g.conflicts]
        report.conflicts = conflicts
        tag = f"{stem}_{test_kind}_a{alpha:g}"
        write_graph(g, os.path.join(out_dir, f"{tag}.graph"), names, conflicts)
        save_to_file(report.to_text(), os.path.join(out_dir, f"{tag}.report"))
        print(g.format(names))
        print(f"alpha={alpha:g}: проверок {report.total_tests}, время {format_time(report.runtime)}")
    return 0


def cmd_benchmark(args: argparse.Namespace, settings: RunSettings) -> int:
    """Запускает серию повторов и печатает медианы показателей."""
    orders = args.order or [settings.order]
    if 'all' in orders:
        orders = ORDER_CHOICES
    params = BenchmarkParams(
        simulation=_simulation_params(args),
        length=args.t,
        window=args.window,
        binary=args.binary,
        test=args.test or ('gsq' if args.binary else settings.test),
        alpha=args.alpha if args.alpha is not None else settings.alpha,
        orders=tuple(orders),
        burn_in=settings.burn_in,
        exhaustive_limit=settings.exhaustive_limit,
        fisher_method=settings.fisher_method,
        gsq_min_samples_factor=settings.gsq_min_samples_factor,
    )
    seeds = parse_int_range(args.seeds) if args.seeds else list(range(settings.seed, settings.seed + args.reps))
    workers = args.workers if args.workers is not None else settings.workers
    frame = BenchmarkRunner(params, workers).run(seeds)
    if frame.empty:
        logger.error("Ни один повтор не выполнен")
        return 1

    out_dir = args.out or settings.output_dir
    summary = summarize(frame)
    cumulative = cumulative_ci_table(frame)
    save_to_file(frame.to_csv(index=False, lineterminator='\n'), os.path.join(out_dir, "runs.csv"))
    save_to_file(summary.to_csv(lineterminator='\n'), os.path.join(out_dir, "summary.csv"))
    save_to_file(cumulative.to_csv(index=False, lineterminator='\n'), os.path.join(out_dir, "ci_cumulative.csv"))
    print(summary.to_string(float_format=lambda v: f"{v:.4f}"))
    print()
    print(cumulative.to_string(index=False, float_format=lambda v: f"{v:.1f}"))
    if len(summary) > 1:
        print(f"\nНаименьшая доля пропущенных ребер: {lowest_fnr_order(summary)}")
    return 0


def cmd_bounds(args: argparse.Namespace, settings: RunSettings) -> int:
    """Печатает оценки числа проверок по сетке параметров."""
    for rho in args.rho:
        if not 0 < rho < 1:
            raise ValueError(f"Доля оставшихся ребер должна лежать в (0, 1): {rho}")
    rows = []
    for n in parse_int_range(args.n):
        for tau in parse_int_range(args.tau):
            for r in parse_int_range(args.r):
                icd = icd_bound(n, tau, r)
                for rho in args.rho:
                    rows.append({'n': n, 'tau': tau, 'r': r, 'rho': rho, 'icd': icd,
                                 'tsicd': tsicd_bound(n, tau, r, rho, args.generalized)})
    table = pd.DataFrame(rows)
    print(table.to_string(index=False, float_format=lambda v: f"{v:.2f}"))
    return 0


COMMANDS = {
    'simulate': cmd_simulate,
    'discover': cmd_discover,
    'benchmark': cmd_benchmark,
    'bounds': cmd_bounds,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Основная функция запуска приложения."""
    args = parse_arguments(argv)
    try:
        settings = RunSettings(args.config)
    except SettingsError as e:
        print(f"Ошибка настроек: {e}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as e:
        print(f"Ошибка чтения конфигурации {args.config}: {e}", file=sys.stderr)
        return 2
    if args.reset_config:
        settings.reset_to_defaults()
        if args.config and not settings.save_settings():
            return 1
    log_level = args.log_level or settings.log_level
    setup_logger(log_level, args.log_file or settings.log_to_file)
    logger.debug(f"Команда {args.command} с уровнем логирования {log_level}")

    try:
        return COMMANDS[args.command](args, settings)
    except USAGE_ERRORS as e:
        logger.error(f"Ошибка: {e}")
        return 2
    except Exception as e:
        logger.error(f"Непредвиденная ошибка: {e}", exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
