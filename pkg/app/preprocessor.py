import json
import logging
import os
import re
from dataclasses import dataclass
from typing import Any, Dict, Optional

from app.graph import Graph, GraphFormatError, graph_from_json_object, parse_graph
from app.greyscale import IncompleteGreyscale, ToneError, tone_from_string

logger = logging.getLogger(__name__)

_FIXED_ITEM = re.compile(r"^\s*(\d+)\s*=\s*(\S+)\s*$")

_EXTENSIONS = {
    '.json': 'json',
    '.col': 'dimacs',
    '.dimacs': 'dimacs',
}


class ProblemFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Problem:
    graph: Graph
    fixed: Optional[IncompleteGreyscale] = None

    @property
    def has_fixed(self) -> bool:
        return self.fixed is not None and len(self.fixed) > 0


def detect_graph_format(path: Optional[str], declared: str = 'auto') -> str:
    """Pick the parser: an explicit format wins, otherwise the file extension, otherwise edge-list."""
    if declared != 'auto':
        return declared
    if path:
        return _EXTENSIONS.get(os.path.splitext(path)[1].lower(), 'edge-list')
    return 'edge-list'


def parse_fixed_spec(text: str) -> IncompleteGreyscale:
    """
    Parse prefixed tones written as "v=p/q,...".

    Raises:
        ProblemFormatError: On a malformed item or a vertex given twice.
        ToneError: On a malformed or out-of-range tone.
    """
    fixed: Dict[int, Any] = {}
    for item in filter(None, (part.strip() for part in text.split(','))):
        match = _FIXED_ITEM.match(item)
        if not match:
            raise ProblemFormatError(f"Malformed prefixed tone {item!r}; expected 'vertex=p/q'")
        vertex = int(match.group(1))
        if vertex in fixed:
            raise ProblemFormatError(f"Vertex {vertex} prefixed twice")
        fixed[vertex] = tone_from_string(match.group(2))
    return IncompleteGreyscale.from_mapping(fixed)


def fixed_from_json_object(data: Any) -> IncompleteGreyscale:
    if data is None:
        return IncompleteGreyscale()
    if not isinstance(data, dict):
        raise ProblemFormatError("'fixed' must map vertex strings to 'p/q' tones")
    fixed = {}
    for key, value in data.items():
        if not str(key).isdigit():
            raise ProblemFormatError(f"Prefixed vertex {key!r} is not a non-negative integer")
        if not isinstance(value, str):
            raise ToneError(f"Tone of vertex {key} must be written as a 'p/q' string, got {value!r}")
        fixed[int(key)] = tone_from_string(value)
    return IncompleteGreyscale.from_mapping(fixed)


def _problem_from_json(text: str) -> Problem:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphFormatError(f"invalid JSON: {e.msg}", e.lineno) from e
    if isinstance(data, dict) and 'graph' in data:
        return Problem(graph=graph_from_json_object(data['graph']), fixed=fixed_from_json_object(data.get('fixed')))
    return Problem(graph=graph_from_json_object(data))


def preprocess_problem(text: str, graph_format: str = 'edge-list', fixed_spec: Optional[str] = None) -> Problem:
    """
    Turn input text into a Problem.

    Args:
        text (str): A problem JSON object ({"graph": ..., "fixed": ...}), a
            bare graph JSON object, an edge list or a DIMACS file.
        graph_format (str): 'json', 'edge-list' or 'dimacs'.
        fixed_spec (Optional[str]): Prefixed tones as "v=p/q,..."; not
            allowed when the input already carries a "fixed" object.

    Returns:
        Problem: The graph and its prefixed tones, validated against each other.
    """
    if graph_format == 'json':
        problem = _problem_from_json(text)
    else:
        problem = Problem(graph=parse_graph(text, graph_format))

    if fixed_spec:
        if problem.has_fixed:
            raise ProblemFormatError("Prefixed tones given both in the input file and on the command line")
        problem = Problem(graph=problem.graph, fixed=parse_fixed_spec(fixed_spec))

    if problem.fixed is not None:
        problem.fixed.validate_for(problem.graph)
        if len(problem.fixed) == problem.graph.n and problem.graph.n > 0:
            raise ProblemFormatError("Every vertex is prefixed; nothing is left to solve")
    logger.info(f"Loaded problem: n={problem.graph.n}, m={problem.graph.m}, "
                f"prefixed={len(problem.fixed) if problem.fixed is not None else 0}")
    return problem


# Example usage
if __name__ == "__main__":
    sample = '{"graph": {"n": 3, "edges": [[0, 1], [1, 2]]}, "fixed": {"0": "0"}}'
    problem = preprocess_problem(sample, 'json')
    print(f"n={problem.graph.n}, edges={problem.graph.sorted_edges()}, fixed={problem.fixed.items}")
