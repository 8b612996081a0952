import os

import pandas as pd
import pytest

from app.bench import (
    bench_cycle_restriction,
    bench_paths,
    bench_prune,
    path_times_nondecreasing,
    run_benchmarks,
    save_benchmark,
)
from app.config import Config


def test_bench_paths_rows():
    rows = bench_paths((5, 9))
    assert [row["n"] for row in rows] == [5, 9]
    assert rows[0]["max_tone"] == "1/4"
    assert rows[1]["iterations"] == 1
    assert all(row["mode"] == "rmigg-both" for row in rows)


def test_bench_cycle_restriction_is_identical():
    restricted, unrestricted = bench_cycle_restriction(n=6)
    assert restricted["identical"] and unrestricted["identical"]
    assert restricted["candidates"] == 3
    assert unrestricted["candidates"] == 15


def test_bench_prune_is_identical():
    plain, pruned = bench_prune(n=7, seed=1)
    assert plain["identical"] and pruned["identical"]
    assert plain["pruned"] == 0
    assert plain["solutions"] == pruned["solutions"]


def test_run_benchmarks_frame():
    df = run_benchmarks(path_sizes=(4, 8), sweep_sizes=(6,), show_progress=False)
    assert set(df["family"]) == {"path", "cycle", "random"}
    assert {"seconds", "candidates", "pruned", "identical"} <= set(df.columns)
    assert df["identical"].dropna().all()


def test_path_times_nondecreasing():
    df = pd.DataFrame([
        {"family": "path", "n": 10, "seconds": 0.1},
        {"family": "path", "n": 20, "seconds": 0.3},
        {"family": "cycle", "n": 10, "seconds": 0.0},
    ])
    assert path_times_nondecreasing(df)
    df.loc[1, "seconds"] = 0.05
    assert not path_times_nondecreasing(df)


def test_save_benchmark(tmp_path):
    config = Config()
    config.set('OUTPUT_DIR', str(tmp_path))
    config.set('OUTPUT_FILE_PREFIX', 'bench')
    df = pd.DataFrame([{"family": "path", "n": 4, "seconds": 0.01}])

    output_file = save_benchmark(df, config)

    assert os.path.dirname(output_file) == str(tmp_path)
    assert os.path.basename(output_file).startswith("bench_results_")
    assert pd.read_csv(output_file)["n"].tolist() == [4]


def test_save_benchmark_keeps_sparse_columns(tmp_path):
    config = Config()
    config.set('OUTPUT_DIR', str(tmp_path))
    config.set('OUTPUT_FILE_PREFIX', 'bench')
    df = pd.DataFrame([
        {"family": "path", "n": 4, "seconds": 0.01},
        {"family": "cycle", "n": 6, "seconds": 0.02, "identical": True},
    ])

    saved = pd.read_csv(save_benchmark(df, config))

    assert list(saved.columns) == ["family", "n", "seconds", "identical"]
    assert saved["identical"].isna().tolist() == [True, False]


if __name__ == '__main__':
    pytest.main()
