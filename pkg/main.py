import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional, Tuple

from rich.console import Console
from rich.markup import escape

from app.bench import path_times_nondecreasing, run_benchmarks, save_benchmark
from app.config import FORMATS, GRAPH_FORMATS, MODES, RunConfig, get_config
from app.graph import DisconnectedGraphError, Graph, GraphFormatError
from app.greyscale import ONE, ZERO, IncompleteGreyscale, ToneError
from app.logging_config import setup_logging
from app.postprocessor import emit_solution_set, format_report_text, report_to_dict, to_json
from app.preprocessor import ProblemFormatError, detect_graph_format, preprocess_problem
from app.solver import InvariantViolation, PreconditionError, solve
from app.utils import calculate_statistics, display_dataframe, read_input_file, write_output
from app.verify import verify_problem

console = Console()
error_console = Console(stderr=True)
logger = logging.getLogger("app.main")

EXIT_OK = 0
EXIT_INVALID_INPUT = 1
EXIT_DISCONNECTED = 2
EXIT_INVARIANT = 3
EXIT_VERIFY_FAILED = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="min-gradation",
        description="Exact minimum gradation greyscales of connected graphs.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    problem = argparse.ArgumentParser(add_help=False)
    problem.add_argument("--input", help="Problem or graph file; '-' or omitted reads standard input")
    problem.add_argument("--graph-format", choices=GRAPH_FORMATS, default="auto",
                         help="Input format; 'auto' picks by file extension")
    problem.add_argument("--fixed", help="Prefixed tones for non-JSON inputs, e.g. \"0=0,3=1/2\"")
    problem.add_argument("--mode", choices=MODES, default="auto")
    problem.add_argument("--all-solutions", action="store_true",
                         help="Show every optimal greyscale in text and DOT output")
    problem.add_argument("--prune", action="store_true", default=None,
                         help="Discard dominated candidate runs while solving")
    problem.add_argument("--no-antipodal-restriction", action="store_true",
                         help="Try every vertex pair as the extremes instead of antipodal pairs only")
    problem.add_argument("--jobs", type=int, help="Worker processes for candidate runs")
    problem.add_argument("--output", help="Write the result here instead of standard output")

    solve_parser = subparsers.add_parser("solve", parents=[problem], help="Solve MIGG or RMIGG")
    solve_parser.add_argument("--format", choices=FORMATS)

    verify_parser = subparsers.add_parser("verify", parents=[problem], help="Solve and check the result")
    verify_parser.add_argument("--format", choices=('json', 'text'))
    verify_parser.add_argument("--oracle", type=int, metavar="L", help="Grid denominator of the brute-force oracle")
    verify_parser.add_argument("--seed", type=int)
    verify_parser.add_argument("--trials", type=int, help="Random greyscales for the lemma suite")

    render_parser = subparsers.add_parser("render", parents=[problem], help="Solve and emit Graphviz DOT")
    render_parser.set_defaults(format="dot")

    bench_parser = subparsers.add_parser("bench", help="Time the solvers on generated families")
    bench_parser.add_argument("--format", choices=('json', 'text'))
    bench_parser.add_argument("--jobs", type=int)
    bench_parser.add_argument("--seed", type=int)
    bench_parser.add_argument("--output", help="Also write the table here")
    return parser


def load_problem(cfg: RunConfig) -> Tuple[Graph, Optional[IncompleteGreyscale], str]:
    text = read_input_file(cfg.input_path)
    graph_format = detect_graph_format(cfg.input_path, cfg.graph_format)
    problem = preprocess_problem(text, graph_format, cfg.fixed_spec)
    fixed = problem.fixed if problem.has_fixed else None
    mode = cfg.resolve_mode(
        has_zero=fixed is not None and fixed.attains(ZERO),
        has_one=fixed is not None and fixed.attains(ONE),
        has_fixed=fixed is not None,
    )
    logger.info(f"Graph statistics: {calculate_statistics(problem.graph)}")
    logger.info(f"Mode {cfg.mode} resolved to {mode}")
    if not problem.graph.is_connected():
        raise DisconnectedGraphError(
            "Graph is disconnected; the problem is posed for connected graphs, "
            "so solve each connected component separately")
    return problem.graph, fixed, mode


def cmd_solve(cfg: RunConfig) -> int:
    graph, fixed, mode = load_problem(cfg)
    solution_set = solve(graph, fixed, mode, restrict_antipodal=cfg.restrict_antipodal,
                         prune=cfg.prune, jobs=cfg.jobs)
    write_output(emit_solution_set(solution_set, cfg.output_format, graph, cfg.all_solutions), cfg.output_path)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    graph, fixed, mode = load_problem(cfg)
    _, report = verify_problem(
        graph, fixed, mode,
        restrict_antipodal=cfg.restrict_antipodal, prune=cfg.prune, jobs=cfg.jobs,
        grid_denominator=cfg.oracle_denominator, budget=cfg.oracle_budget, max_free=cfg.oracle_max_free,
        trials=cfg.trials, seed=cfg.seed,
    )
    if cfg.output_format == 'text':
        write_output(format_report_text(report), cfg.output_path)
    else:
        write_output(to_json(report_to_dict(report)), cfg.output_path)
    if not report.overall:
        for check in report.failures():
            logger.error(f"Check {check.name} failed: {check.witness}")
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def cmd_render(cfg: RunConfig) -> int:
    graph, fixed, mode = load_problem(cfg)
    solution_set = solve(graph, fixed, mode, restrict_antipodal=cfg.restrict_antipodal,
                         prune=cfg.prune, jobs=cfg.jobs)
    write_output(emit_solution_set(solution_set, 'dot', graph, cfg.all_solutions), cfg.output_path)
    return EXIT_OK


def cmd_bench(cfg: RunConfig) -> int:
    config = get_config()
    df = run_benchmarks(seed=cfg.seed, jobs=cfg.jobs, show_progress=cfg.output_format == 'text')
    output_file = save_benchmark(df, config)
    if cfg.output_format == 'json':
        write_output(df.to_json(orient="records", indent=2) + "\n", cfg.output_path)
    else:
        display_dataframe(df, title="Solver timings")
        if cfg.output_path:
            write_output(df.to_string(index=False) + "\n", cfg.output_path)
        console.print(f"Results saved to: {output_file}")
    if not path_times_nondecreasing(df):
        logger.warning("Path timings are not monotone; the machine was probably busy")
    if "identical" in df.columns and not df["identical"].dropna().all():
        logger.error("An optimisation changed a solution set")
        return EXIT_INVARIANT
    return EXIT_OK


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "solve": cmd_solve,
    "verify": cmd_verify,
    "render": cmd_render,
    "bench": cmd_bench,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging()
    config = get_config()
    cfg = RunConfig.from_args(args, config)
    try:
        return COMMANDS[cfg.command](cfg)
    except DisconnectedGraphError as e:
        logger.error(str(e))
        error_console.print(f"[bold red]Error: {escape(str(e))}[/bold red]")
        return EXIT_DISCONNECTED
    except InvariantViolation as e:
        logger.exception(f"Invariant violation: {e}")
        error_console.print(f"[bold red]Internal error: {escape(str(e))}[/bold red]")
        return EXIT_INVARIANT
    except (GraphFormatError, ToneError, PreconditionError, ProblemFormatError, FileNotFoundError, ValueError) as e:
        logger.error(f"Invalid input: {e}")
        error_console.print(f"[bold red]Invalid input: {escape(str(e))}[/bold red]")
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
