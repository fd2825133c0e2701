import pandas as pd
import pytest

from src.core.benchmark import (BenchmarkParams, BenchmarkRunner, count_bound_violations, cumulative_ci_table,
                                lowest_fnr_order, run_repetition, summarize)
from src.core.simulation import SimulationParams

SMALL = SimulationParams(n_observed=3, tau=1, extra_links=3)


@pytest.fixture
def oracle_params():
    return BenchmarkParams(simulation=SMALL, test="oracle", orders=("default", "swapped"))


def test_oracle_repetition(oracle_params):
    rows = run_repetition(oracle_params, 7)
    assert [row['order'] for row in rows] == ["default", "swapped"]
    for row in rows:
        assert row['seed'] == 7
        assert row['recall'] == 1.0
        assert row['ci_size_0'] == 12
        assert row['ci_total'] == sum(v for k, v in row.items() if k.startswith('ci_size_'))
        assert row['bound_violations'] == 0


def test_statistical_repetition():
    params = BenchmarkParams(simulation=SMALL, length=300)
    row, = run_repetition(params, 3)
    assert 0.0 <= row['skeleton_f1'] <= 1.0
    assert row['ci_size_0'] == 12
    assert row['bound_violations'] == 0


def test_bound_violations_are_counted_per_iteration():
    iterations = [{'r': 0, 'tests': 12, 'edges': 9, 'done': False},
                  {'r': 1, 'tests': 2 * 9 * 4 + 1, 'edges': 9, 'done': False},
                  {'r': 2, 'tests': 0, 'edges': 9, 'done': True}]
    assert count_bound_violations(iterations, 3, 1) == 1
    assert count_bound_violations(iterations[:1], 3, 1) == 0


def test_unknown_order():
    with pytest.raises(ValueError):
        BenchmarkParams(orders=("default", "backwards"))


def test_runner_sorts_rows(oracle_params):
    frame = BenchmarkRunner(oracle_params, workers=1).run([2, 1])
    assert list(frame['seed']) == [1, 1, 2, 2]
    assert list(frame['order']) == ["default", "swapped"] * 2
    assert frame['ci_size_0'].dtype.kind == 'i'


def test_failed_repetitions_are_skipped(monkeypatch, oracle_params):
    import src.core.benchmark as benchmark

    def broken(params, seed):
        if seed == 1:
            raise RuntimeError("сбой")
        return [{'seed': seed, 'order': 'default', 'ci_size_0': 1}]

    monkeypatch.setattr(benchmark, "run_repetition", broken)
    frame = BenchmarkRunner(oracle_params).run([0, 1])
    assert list(frame['seed']) == [0]


def test_summaries():
    frame = pd.DataFrame([
        {'seed': 0, 'order': 'default', 'skeleton_f1': 1.0, 'causal_accuracy': 1.0, 'precision': 1.0,
         'recall': 1.0, 'fpr': 0.0, 'fnr': 0.0, 'ci_total': 10, 'ci_size_0': 6, 'ci_size_1': 4},
        {'seed': 1, 'order': 'default', 'skeleton_f1': 0.5, 'causal_accuracy': 0.5, 'precision': 0.5,
         'recall': 0.5, 'fpr': 0.1, 'fnr': 0.5, 'ci_total': 14, 'ci_size_0': 6, 'ci_size_1': 8},
        {'seed': 0, 'order': 'swapped', 'skeleton_f1': 1.0, 'causal_accuracy': 1.0, 'precision': 1.0,
         'recall': 1.0, 'fpr': 0.0, 'fnr': 0.0, 'ci_total': 20, 'ci_size_0': 6, 'ci_size_1': 14},
    ])
    summary = summarize(frame)
    assert summary.loc['default', 'runs'] == 2
    assert summary.loc['default', 'ci_total_median'] == 12
    assert summary.loc['default', 'ci_total_mad'] == 2
    assert lowest_fnr_order(summary) == 'swapped'

    table = cumulative_ci_table(frame)
    default = table[table['order'] == 'default']
    assert list(default['median']) == [6.0, 6.0]
    assert list(default['cumulative']) == [6.0, 12.0]
    assert list(default['cumulative_pct']) == [50.0, 100.0]


@pytest.mark.slow
def test_descending_lag_order_needs_fewest_tests_on_binary_data():
    params = BenchmarkParams(simulation=SimulationParams(n_observed=5, tau=3), length=500, window=4,
                             binary=True, test="gsq", orders=("default", "swapped", "random"))
    frame = BenchmarkRunner(params, workers=4).run(range(100))
    assert frame['bound_violations'].sum() == 0
    summary = summarize(frame)
    tests = summary['ci_total_median']
    assert tests['default'] < tests['swapped']
    assert tests['default'] < tests['random']
    f1 = summary['skeleton_f1_median']
    assert f1.max() - f1.min() < 0.02
