"""
Simple undirected graphs on dense vertex indices 0..n-1.

Distances, components, diameter queries and geodesic intervals are all
computed on demand; every value here is immutable once built.
"""
import enum
import json
import logging
import random
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Literal, Optional, Sequence, Tuple, Union

import networkx as nx

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


class GraphFormatError(ValueError):
    """Malformed graph text; `line` is 1-based when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class DisconnectedGraphError(ValueError):
    pass


class _Unreachable(enum.Enum):
    UNREACHABLE = "unreachable"

    def __repr__(self) -> str:
        return "UNREACHABLE"


UNREACHABLE = _Unreachable.UNREACHABLE
Distance = Union[int, Literal[_Unreachable.UNREACHABLE]]


def normalize_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: FrozenSet[Edge]
    labels: Optional[Tuple[str, ...]] = None
    vertices: Optional[FrozenSet[int]] = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"Vertex count must be non-negative, got {self.n}")
        edges = frozenset(normalize_edge(u, v) for u, v in self.edges)
        for u, v in edges:
            if u == v:
                raise ValueError(f"Self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"Edge {u}-{v} out of range for n={self.n}")
        object.__setattr__(self, 'edges', edges)
        if self.vertices is None:
            object.__setattr__(self, 'vertices', frozenset(range(self.n)))
        else:
            vertices = frozenset(self.vertices)
            for u, v in edges:
                if u not in vertices or v not in vertices:
                    raise ValueError(f"Edge {u}-{v} touches a removed vertex")
            object.__setattr__(self, 'vertices', vertices)
        if self.labels is not None:
            if len(self.labels) != self.n:
                raise ValueError(f"Expected {self.n} labels, got {len(self.labels)}")
            object.__setattr__(self, 'labels', tuple(str(label) for label in self.labels))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], labels: Optional[Sequence[str]] = None) -> "Graph":
        return cls(n=n, edges=frozenset(normalize_edge(int(u), int(v)) for u, v in edges),
                   labels=tuple(labels) if labels is not None else None)

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> "Graph":
        """Relabel an arbitrary networkx graph onto 0..n-1 in sorted node order."""
        nodes = sorted(graph.nodes())
        index = {node: i for i, node in enumerate(nodes)}
        labels = None
        if any(not isinstance(node, int) or index[node] != node for node in nodes):
            labels = tuple(str(node) for node in nodes)
        return cls.from_edges(len(nodes), ((index[u], index[v]) for u, v in graph.edges()), labels)

    @cached_property
    def nx_graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(sorted(self.vertices))
        graph.add_edges_from(sorted(self.edges))
        return graph

    def to_networkx(self) -> nx.Graph:
        return self.nx_graph.copy()

    @cached_property
    def adjacency(self) -> Dict[int, Tuple[int, ...]]:
        neighbours: Dict[int, List[int]] = {v: [] for v in self.vertices}
        for u, v in self.edges:
            neighbours[u].append(v)
            neighbours[v].append(u)
        return {v: tuple(sorted(ns)) for v, ns in neighbours.items()}

    @property
    def m(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> List[Edge]:
        return sorted(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adjacency.get(v, ()))

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels is not None else str(v)

    def is_connected(self) -> bool:
        return len(self.vertices) > 0 and nx.is_connected(self.nx_graph)


@dataclass(frozen=True)
class DistanceMatrix:
    n: int
    rows: Tuple[Tuple[Distance, ...], ...]

    def __getitem__(self, pair: Tuple[int, int]) -> Distance:
        u, v = pair
        return self.rows[u][v]

    def reachable(self, u: int, v: int) -> bool:
        return self.rows[u][v] is not UNREACHABLE

    def distance(self, u: int, v: int) -> int:
        value = self.rows[u][v]
        if value is UNREACHABLE:
            raise DisconnectedGraphError(f"Vertices {u} and {v} are mutually unreachable")
        return value


# Parsing

_INT = re.compile(r"^[+-]?\d+$")


def _to_int(token: str, line: int) -> int:
    if not _INT.match(token):
        raise GraphFormatError(f"expected an integer vertex, got {token!r}", line)
    return int(token)


def _add_edge(edges: Dict[Edge, int], n: Optional[int], u: int, v: int, line: int) -> None:
    if u == v:
        raise GraphFormatError(f"self-loop at vertex {u}", line)
    if u < 0 or v < 0 or (n is not None and (u >= n or v >= n)):
        raise GraphFormatError(f"vertex index out of range in edge {u}-{v}", line)
    edge = normalize_edge(u, v)
    if edge in edges:
        raise GraphFormatError(f"duplicate edge {u}-{v} (first seen on line {edges[edge]})", line)
    edges[edge] = line


def _parse_edge_list(text: str) -> Graph:
    edges: Dict[Edge, int] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise GraphFormatError(f"expected 'u v', got {raw.strip()!r}", number)
        _add_edge(edges, None, _to_int(tokens[0], number), _to_int(tokens[1], number), number)
    n = max((max(edge) for edge in edges), default=-1) + 1
    return Graph.from_edges(n, edges)


def _parse_dimacs(text: str) -> Graph:
    edges: Dict[Edge, int] = {}
    n: Optional[int] = None
    declared_m = 0
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('c'):
            continue
        tokens = line.split()
        if tokens[0] == 'p':
            if n is not None:
                raise GraphFormatError("second problem line", number)
            if len(tokens) != 4 or tokens[1] not in ('edge', 'col'):
                raise GraphFormatError(f"expected 'p edge n m', got {line!r}", number)
            n = _to_int(tokens[2], number)
            declared_m = _to_int(tokens[3], number)
        elif tokens[0] == 'e':
            if n is None:
                raise GraphFormatError("edge line before the problem line", number)
            if len(tokens) != 3:
                raise GraphFormatError(f"expected 'e u v', got {line!r}", number)
            u, v = _to_int(tokens[1], number) - 1, _to_int(tokens[2], number) - 1
            _add_edge(edges, n, u, v, number)
        else:
            raise GraphFormatError(f"unknown line type {tokens[0]!r}", number)
    if n is None:
        raise GraphFormatError("missing 'p edge n m' problem line")
    if declared_m != len(edges):
        logger.warning(f"DIMACS header declares {declared_m} edges, found {len(edges)}")
    return Graph.from_edges(n, edges)


def graph_from_json_object(data: object) -> Graph:
    if not isinstance(data, dict) or 'n' not in data or 'edges' not in data:
        raise GraphFormatError("graph object needs 'n' and 'edges'")
    n = data['n']
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise GraphFormatError(f"'n' must be a positive integer, got {n!r}")
    edges: Dict[Edge, int] = {}
    for position, pair in enumerate(data['edges'], start=1):
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(x, int) and not isinstance(x, bool) for x in pair)):
            raise GraphFormatError(f"edge #{position} must be a pair of integers, got {pair!r}")
        # JSON has no useful line numbers; the edge position stands in for them
        _add_edge(edges, n, pair[0], pair[1], position)
    labels = data.get('labels')
    if labels is not None and (not isinstance(labels, list) or len(labels) != n):
        raise GraphFormatError(f"'labels' must be a list of {n} strings")
    return Graph.from_edges(n, edges, labels)


def _parse_json(text: str) -> Graph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphFormatError(f"invalid JSON: {e.msg}", e.lineno) from e
    return graph_from_json_object(data)


_PARSERS = {
    'edge-list': _parse_edge_list,
    'dimacs': _parse_dimacs,
    'json': _parse_json,
}


def parse_graph(text: str, format: str = 'edge-list') -> Graph:
    """
    Parse a graph from text.

    Args:
        text (str): The graph description.
        format (str): One of 'edge-list' (0-based "u v" lines), 'dimacs'
            ("p edge n m" then 1-based "e u v" lines) or 'json'
            ({"n": int, "edges": [[u, v], ...]}).

    Returns:
        Graph: The described simple graph.

    Raises:
        GraphFormatError: On malformed lines, duplicate edges, self-loops or
            out-of-range indices, where the message carries the line number,
            and on input that describes no vertex at all.
    """
    try:
        parser = _PARSERS[format]
    except KeyError:
        raise ValueError(f"Unsupported graph format: {format}") from None
    graph = parser(text)
    if graph.n == 0:
        raise GraphFormatError("no edges or vertices found")
    logger.debug(f"Parsed {format} graph with n={graph.n}, m={graph.m}")
    return graph


# Distances and structure

def all_pairs_distances(g: Graph) -> DistanceMatrix:
    """Hop distances by one BFS per vertex; cross-component entries are UNREACHABLE."""
    rows: List[List[Distance]] = [[UNREACHABLE] * g.n for _ in range(g.n)]
    for v in range(g.n):
        rows[v][v] = 0
    for source, lengths in nx.all_pairs_shortest_path_length(g.nx_graph):
        row = rows[source]
        for target, length in lengths.items():
            row[target] = length
    return DistanceMatrix(n=g.n, rows=tuple(tuple(row) for row in rows))


def connected_components(g: Graph) -> List[Tuple[int, ...]]:
    components = [tuple(sorted(component)) for component in nx.connected_components(g.nx_graph)]
    return sorted(components, key=lambda component: component[0])


def diameter_and_antipodal_pairs(g: Graph, d: DistanceMatrix) -> Tuple[int, Tuple[Edge, ...]]:
    if not g.is_connected():
        raise DisconnectedGraphError("Diameter is only defined for connected graphs")
    vertices = sorted(g.vertices)
    diameter = max((d.distance(u, v) for u in vertices for v in vertices), default=0)
    pairs = tuple((u, v) for i, u in enumerate(vertices) for v in vertices[i + 1:]
                  if d.distance(u, v) == diameter)
    return diameter, pairs


def geodesic_interval(d: DistanceMatrix, u: int, v: int) -> FrozenSet[int]:
    """All vertices lying on at least one u-v geodesic, u and v included."""
    length = d.distance(u, v)
    interval = set()
    for w in range(d.n):
        to_u, to_v = d[u, w], d[w, v]
        if to_u is UNREACHABLE or to_v is UNREACHABLE:
            continue
        if to_u + to_v == length:
            interval.add(w)
    return frozenset(interval)


def delete_saturated_edges(g: Graph, a: Iterable[int]) -> Tuple[Graph, FrozenSet[int]]:
    """
    Remove every edge with both endpoints in `a`, then every vertex left
    with degree zero.

    Returns:
        Tuple[Graph, FrozenSet[int]]: The reduced graph and the removed vertices.
    """
    saturated = frozenset(a)
    kept = frozenset((u, v) for u, v in g.edges if not (u in saturated and v in saturated))
    if len(kept) == len(g.edges) and all(g.degree(v) > 0 for v in g.vertices):
        return g, frozenset()
    touched = {v for edge in kept for v in edge}
    removed = frozenset(v for v in g.vertices if v not in touched)
    return Graph(n=g.n, edges=kept, labels=g.labels, vertices=g.vertices - removed), removed


# Generators

def random_connected_graph(n: int, edge_probability: float, seed: int) -> Graph:
    """A random spanning tree on 0..n-1 plus each remaining pair with the given probability."""
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    edges = set()
    for position in range(1, n):
        edges.add(normalize_edge(order[position], order[rng.randrange(position)]))
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in edges and rng.random() < edge_probability:
                edges.add((u, v))
    return Graph.from_edges(n, edges)


def relabel(g: Graph, permutation: Sequence[int]) -> Graph:
    """Vertex v of `g` becomes vertex permutation[v]."""
    if sorted(permutation) != list(range(g.n)):
        raise ValueError("Not a permutation of the vertex set")
    labels = None
    if g.labels is not None:
        relabelled = [''] * g.n
        for v, image in enumerate(permutation):
            relabelled[image] = g.labels[v]
        labels = tuple(relabelled)
    return Graph(n=g.n, edges=frozenset(normalize_edge(permutation[u], permutation[v]) for u, v in g.edges),
                 labels=labels, vertices=frozenset(permutation[v] for v in g.vertices))
