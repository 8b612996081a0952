"""
Timing runs over generated graph families.

Every family is built from a fixed seed, so two runs differ only in their
wall times.
"""
import logging
import time
from typing import Any, Callable, Dict, List, Sequence, Tuple

import networkx as nx
import pandas as pd
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn, TimeElapsedColumn

from app.config import Config, get_config
from app.graph import Graph, random_connected_graph
from app.greyscale import ONE, ZERO, IncompleteGreyscale
from app.solver import SolutionSet, migg, rmigg_both_extremes, single_solution_set
from app.utils import console, get_versioned_filename

logger = logging.getLogger(__name__)

PATH_SIZES = (50, 100, 200)
SWEEP_SIZES = (6, 8, 10, 12)
CYCLE_SIZE = 10
PRUNE_SIZE = 12
EDGE_PROBABILITY = 0.25

Job = Tuple[str, Callable[[], List[Dict[str, Any]]]]


def _timed(solve: Callable[[], SolutionSet]) -> Tuple[SolutionSet, float]:
    start = time.perf_counter()
    solution_set = solve()
    return solution_set, time.perf_counter() - start


def _row(family: str, graph: Graph, mode: str, variant: str, solution_set: SolutionSet,
         seconds: float, **extra: Any) -> Dict[str, Any]:
    first = solution_set.solutions[0]
    return {
        "family": family,
        "n": graph.n,
        "m": graph.m,
        "mode": mode,
        "variant": variant,
        "seconds": seconds,
        "iterations": len(first.trace.iterations),
        "candidates": solution_set.stats.candidates,
        "pruned": solution_set.stats.pruned,
        "solutions": len(solution_set.solutions),
        "max_tone": str(solution_set.vector[0]) if len(solution_set.vector) else "",
        **extra,
    }


def bench_paths(sizes: Sequence[int] = PATH_SIZES) -> List[Dict[str, Any]]:
    rows = []
    for n in sizes:
        graph = Graph.from_networkx(nx.path_graph(n))
        fixed = IncompleteGreyscale.from_mapping({0: ZERO, n - 1: ONE})
        solution_set, seconds = _timed(lambda: single_solution_set(rmigg_both_extremes(graph, fixed)))
        rows.append(_row("path", graph, "rmigg-both", "-", solution_set, seconds))
    return rows


def bench_cycle_restriction(n: int = CYCLE_SIZE, jobs: int = 1) -> List[Dict[str, Any]]:
    graph = Graph.from_networkx(nx.cycle_graph(n))
    restricted, restricted_seconds = _timed(lambda: migg(graph, restrict_antipodal=True, jobs=jobs))
    unrestricted, unrestricted_seconds = _timed(lambda: migg(graph, restrict_antipodal=False, jobs=jobs))
    identical = restricted.same_solutions(unrestricted)
    if not identical:
        logger.error(f"Antipodal restriction changed the result on C{n}")
    return [
        _row("cycle", graph, "migg", "antipodal", restricted, restricted_seconds, identical=identical),
        _row("cycle", graph, "migg", "all-pairs", unrestricted, unrestricted_seconds, identical=identical),
    ]


def bench_prune(n: int = PRUNE_SIZE, seed: int = 0, jobs: int = 1) -> List[Dict[str, Any]]:
    graph = random_connected_graph(n, EDGE_PROBABILITY, seed)
    plain, plain_seconds = _timed(lambda: migg(graph, restrict_antipodal=False, jobs=jobs))
    pruned, pruned_seconds = _timed(lambda: migg(graph, restrict_antipodal=False, prune=True))
    identical = plain.same_solutions(pruned)
    if not identical:
        logger.error(f"Pruning changed the result on the random n={n} graph (seed {seed})")
    return [
        _row("random", graph, "migg", "prune-off", plain, plain_seconds, identical=identical),
        _row("random", graph, "migg", "prune-on", pruned, pruned_seconds, identical=identical),
    ]


def bench_random_sweep(sizes: Sequence[int] = SWEEP_SIZES, seed: int = 0, jobs: int = 1) -> List[Dict[str, Any]]:
    rows = []
    for offset, n in enumerate(sizes):
        graph = random_connected_graph(n, EDGE_PROBABILITY, seed + offset)
        solution_set, seconds = _timed(lambda: migg(graph, jobs=jobs))
        rows.append(_row("random", graph, "migg", "sweep", solution_set, seconds))
    return rows


def benchmark_jobs(seed: int = 0, jobs: int = 1, path_sizes: Sequence[int] = PATH_SIZES,
                   sweep_sizes: Sequence[int] = SWEEP_SIZES) -> List[Job]:
    return [
        ("paths", lambda: bench_paths(path_sizes)),
        ("cycle restriction", lambda: bench_cycle_restriction(jobs=jobs)),
        ("pruning", lambda: bench_prune(seed=seed, jobs=jobs)),
        ("random sweep", lambda: bench_random_sweep(sweep_sizes, seed=seed, jobs=jobs)),
    ]


def run_benchmarks(seed: int = 0, jobs: int = 1, path_sizes: Sequence[int] = PATH_SIZES,
                   sweep_sizes: Sequence[int] = SWEEP_SIZES, show_progress: bool = True) -> pd.DataFrame:
    rows: List[Dict[str, Any]] = []
    jobs_list = benchmark_jobs(seed, jobs, path_sizes, sweep_sizes)
    with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            TextColumn("({task.completed}/{task.total})"),
            TimeElapsedColumn(),
            console=console,
            disable=not show_progress,
    ) as progress:
        task = progress.add_task("[cyan]Benchmarking...", total=len(jobs_list))
        for name, job in jobs_list:
            progress.update(task, description=f"[cyan]Benchmarking {name}...")
            rows.extend(job())
            progress.advance(task)
    df = pd.DataFrame(rows)
    logger.info(f"Benchmark finished: {len(df)} rows, {df['seconds'].sum():.2f}s solver time")
    return df


def path_times_nondecreasing(df: pd.DataFrame) -> bool:
    times = df[df["family"] == "path"].sort_values("n")["seconds"].tolist()
    return all(b >= a for a, b in zip(times, times[1:]))


def save_benchmark(df: pd.DataFrame, config: Config) -> str:
    output_file = get_versioned_filename(config.get('OUTPUT_FILE_PREFIX'), "results", "csv",
                                         config.get('OUTPUT_DIR'))
    df.to_csv(output_file, index=False, encoding='utf-8')
    logger.info(f"Benchmark saved to {output_file}")
    return output_file


# Example usage
if __name__ == "__main__":
    frame = run_benchmarks(path_sizes=(20, 40), sweep_sizes=(6, 8))
    print(frame.to_string(index=False))
    print("Saved to", save_benchmark(frame, get_config()))
