import logging
import os
import sys
from datetime import datetime
from typing import Any, Dict, Optional

import pandas as pd
from rich.console import Console
from rich.table import Table

from app.graph import Graph, all_pairs_distances, connected_components, diameter_and_antipodal_pairs

console = Console()
logger = logging.getLogger(__name__)


def get_versioned_filename(output_file_prefix: str, label: str, extension: str = "csv",
                           output_dir: str = "output") -> str:
    timestamp = datetime.now().strftime('%Y%m%d_%H%M%S')
    label_name = label.replace('-', '_')  # Replace hyphens with underscores for filename
    version = 1
    os.makedirs(output_dir, exist_ok=True)
    while True:
        output_file = os.path.join(output_dir, f"{output_file_prefix}_{label_name}_{timestamp}_v{version}.{extension}")
        if not os.path.exists(output_file):
            return output_file
        version += 1


def read_input_file(path: Optional[str] = None) -> str:
    """
    Read a problem or graph file as text.

    Args:
        path (Optional[str]): Path to the input file; None or "-" reads standard input.

    Returns:
        str: The file contents.

    Raises:
        FileNotFoundError: If the path does not exist.
    """
    if path is None or path == '-':
        return sys.stdin.read()
    if not os.path.isfile(path):
        raise FileNotFoundError(f"Input file not found: {path}")
    with open(path, encoding='utf-8') as handle:
        return handle.read()


def write_output(text: str, path: Optional[str] = None) -> None:
    """Write to `path`, or to standard output unchanged so that repeated runs are byte-identical."""
    if path is None or path == '-':
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        handle.write(text)
    logger.info(f"Output written to {path}")


def calculate_statistics(graph: Graph) -> Dict[str, Any]:
    """
    Basic structural statistics of a graph.

    Args:
        graph (Graph): The input graph.

    Returns:
        Dict[str, Any]: Vertex and edge counts, degree range, component count
            and, for connected graphs, diameter and antipodal pair count.
    """
    degrees = [graph.degree(v) for v in range(graph.n)]
    stats = {
        "vertices": graph.n,
        "edges": graph.m,
        "min_degree": min(degrees, default=0),
        "max_degree": max(degrees, default=0),
        "components": len(connected_components(graph)),
    }
    if graph.is_connected():
        diameter, pairs = diameter_and_antipodal_pairs(graph, all_pairs_distances(graph))
        stats["diameter"] = diameter
        stats["antipodal_pairs"] = len(pairs)
    return stats


def display_dataframe(df: pd.DataFrame, title: Optional[str] = None, target: Optional[Console] = None) -> None:
    """Render a DataFrame as a rich table."""
    table = Table(title=title)
    for column in df.columns:
        table.add_column(str(column), justify="right" if pd.api.types.is_numeric_dtype(df[column]) else "left")
    for row in df.itertuples(index=False):
        table.add_row(*(f"{value:.4f}" if isinstance(value, float) else str(value) for value in row))
    (target or console).print(table)


# Example usage
if __name__ == "__main__":
    print(get_versioned_filename("test_output", "sample"))
    print(calculate_statistics(Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])))
