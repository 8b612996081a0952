import networkx as nx
import pytest

from app.config import Config
from app.graph import Graph
from app.runner import AsyncCandidateRunner
from app.solver import migg


@pytest.fixture
def mock_config():
    config = Config()
    config.set('SOLVER_JOBS', '2')
    config.set('INITIAL_BATCH_SIZE', '2')
    config.set('MAX_BATCH_SIZE', '4')
    config.set('BATCH_SIZE_FACTOR', '2.0')
    return config


@pytest.fixture
def runner(mock_config):
    return AsyncCandidateRunner(mock_config)


def test_runner_reads_config(runner):
    assert runner.jobs == 2
    assert runner.initial_batch_size == 2
    assert runner.max_batch_size == 4
    assert runner.batch_size_factor == 2.0


@pytest.mark.asyncio
async def test_run_all_keeps_input_order(runner):
    assert await runner.run_all(abs, [-5, 3, -1, 0, -7]) == [5, 3, 1, 0, 7]


@pytest.mark.asyncio
async def test_run_batches_grows_batch_size(runner):
    batches = [batch async for batch in runner.run_batches(abs, [-1, -2, -3, -4, -5])]

    assert [batch["batch_size"] for batch in batches] == [2, 4]
    assert [batch["processed_items"] for batch in batches] == [2, 5]
    assert batches[-1]["total_items"] == 5
    assert batches[0]["batch_results"] == [1, 2]


def test_run_with_shared_arguments(runner):
    assert runner.run(pow, [1, 2, 3], 2) == [2, 4, 8]


def test_parallel_migg_matches_serial():
    c6 = Graph.from_networkx(nx.cycle_graph(6))
    serial = migg(c6, restrict_antipodal=False)
    parallel = migg(c6, restrict_antipodal=False, jobs=2)

    assert parallel.same_solutions(serial)
    assert parallel.stats == serial.stats


if __name__ == '__main__':
    pytest.main()
