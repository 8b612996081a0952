import json
import logging
import math
from fractions import Fraction
from itertools import groupby
from typing import Any, Dict, List, Optional, Sequence

from app.graph import Graph
from app.greyscale import GradationVector, Greyscale, ONE, tone_from_string, tone_to_string
from app.solver import (
    Anchor,
    CcmTrace,
    FloodFill,
    FloodFillGroup,
    IterationRecord,
    Solution,
    SolutionSet,
    SolveStats,
)
from app.verify import VerificationReport

logger = logging.getLogger(__name__)


def _tones(values: Sequence[Fraction]) -> List[str]:
    return [tone_to_string(t) for t in values]


def _parse_tones(values: Sequence[str]) -> tuple:
    return tuple(tone_from_string(text) for text in values)


def greyscale_to_dict(f: Greyscale) -> Dict[str, Any]:
    return {"tones": _tones(f.tones)}


def greyscale_from_dict(data: Dict[str, Any]) -> Greyscale:
    return Greyscale(_parse_tones(data["tones"]))


def trace_to_dict(trace: CcmTrace) -> Dict[str, Any]:
    flood_fill = None
    if trace.flood_fill is not None:
        flood_fill = {
            "after_iteration": trace.flood_fill.after_iteration,
            "groups": [
                {
                    "anchor": group.anchor,
                    "tone": tone_to_string(group.tone),
                    "vertices": list(group.vertices),
                    "edges": [list(e) for e in group.edges],
                }
                for group in trace.flood_fill.groups
            ],
        }
    return {
        "iterations": [
            {
                "index": record.index,
                "maximum": tone_to_string(record.maximum),
                "pairs": [list(pair) for pair in record.pairs],
                "coloured": [[w, tone_to_string(tone)] for w, tone in record.coloured],
                "saturated": [[u, v, tone_to_string(tone)] for u, v, tone in record.saturated],
                "components_before": record.components_before,
                "edges_before": [list(e) for e in record.edges_before],
            }
            for record in trace.iterations
        ],
        "flood_fill": flood_fill,
    }


def trace_from_dict(data: Dict[str, Any]) -> CcmTrace:
    iterations = tuple(
        IterationRecord(
            index=item["index"],
            maximum=tone_from_string(item["maximum"]),
            pairs=tuple(tuple(pair) for pair in item["pairs"]),
            coloured=tuple((w, tone_from_string(tone)) for w, tone in item["coloured"]),
            saturated=tuple((u, v, tone_from_string(tone)) for u, v, tone in item["saturated"]),
            components_before=item["components_before"],
            edges_before=tuple(tuple(e) for e in item["edges_before"]),
        )
        for item in data["iterations"]
    )
    flood_fill = None
    if data.get("flood_fill") is not None:
        fill = data["flood_fill"]
        flood_fill = FloodFill(
            after_iteration=fill["after_iteration"],
            groups=tuple(
                FloodFillGroup(anchor=group["anchor"], tone=tone_from_string(group["tone"]),
                               vertices=tuple(group["vertices"]), edges=tuple(tuple(e) for e in group["edges"]))
                for group in fill["groups"]
            ),
        )
    return CcmTrace(iterations=iterations, flood_fill=flood_fill)


def _anchor_to_dict(anchor: Optional[Anchor]) -> Optional[Dict[str, int]]:
    return {"zero": anchor.zero, "one": anchor.one} if anchor is not None else None


def solution_set_to_dict(solution_set: SolutionSet) -> Dict[str, Any]:
    """The solution JSON; "trace" is aligned with "solutions" by position."""
    return {
        "vector": _tones(solution_set.vector.components),
        "solutions": [
            {**greyscale_to_dict(s.greyscale), "anchor": _anchor_to_dict(s.anchor)}
            for s in solution_set.solutions
        ],
        "trace": [trace_to_dict(s.trace) for s in solution_set.solutions],
        "stats": {"candidates": solution_set.stats.candidates, "pruned": solution_set.stats.pruned},
    }


def solution_set_from_dict(data: Dict[str, Any]) -> SolutionSet:
    vector = GradationVector(_parse_tones(data["vector"]))
    traces = data.get("trace") or [{"iterations": [], "flood_fill": None}] * len(data["solutions"])
    if len(traces) != len(data["solutions"]):
        raise ValueError("'trace' must hold one entry per solution")
    solutions = []
    for item, trace in zip(data["solutions"], traces):
        greyscale = greyscale_from_dict(item)
        anchor = item.get("anchor")
        solutions.append(Solution(
            greyscale=greyscale,
            vector=vector,
            trace=trace_from_dict(trace),
            anchor=Anchor(zero=anchor["zero"], one=anchor["one"]) if anchor is not None else None,
        ))
    stats = data.get("stats", {})
    return SolutionSet(vector=vector, solutions=tuple(solutions),
                       stats=SolveStats(candidates=stats.get("candidates", 0), pruned=stats.get("pruned", 0)))


def report_to_dict(report: VerificationReport) -> Dict[str, Any]:
    checks = []
    for check in report.checks:
        item = {"name": check.name, "pass": check.passed, "status": check.status.value}
        if check.witness:
            item["witness"] = check.witness
        checks.append(item)
    return {"overall": report.overall, "checks": checks}


def to_json(data: Dict[str, Any]) -> str:
    return json.dumps(data, indent=2) + "\n"


def compress_vector(vector: GradationVector) -> str:
    """Run-length form of a vector, e.g. "1/4 ×4, 0 ×2"."""
    runs = []
    for tone, group in groupby(vector.components):
        count = len(list(group))
        runs.append(tone_to_string(tone) if count == 1 else f"{tone_to_string(tone)} ×{count}")
    return ", ".join(runs) if runs else "(empty)"


def format_solution_set_text(solution_set: SolutionSet, all_solutions: bool = False,
                             graph: Optional[Graph] = None) -> str:
    lines = [
        f"vector: {compress_vector(solution_set.vector)}",
        f"solutions: {len(solution_set.solutions)} (modulo complement)",
        f"candidates: {solution_set.stats.candidates}, pruned: {solution_set.stats.pruned}",
    ]
    shown = solution_set.solutions if all_solutions else solution_set.solutions[:1]
    for position, solution in enumerate(shown):
        lines.append("")
        header = f"solution {position}:"
        if solution.anchor is not None:
            header += f" 0 at {solution.anchor.zero}, 1 at {solution.anchor.one}"
        lines.append(header)
        for v, tone in enumerate(solution.greyscale):
            name = graph.label(v) if graph is not None else str(v)
            lines.append(f"  {name}: {tone_to_string(tone)}")
        maxima = ", ".join(tone_to_string(m) for m in solution.trace.maxima)
        fill = " + flood fill" if solution.trace.flood_fill is not None else ""
        lines.append(f"  iterations: {len(solution.trace.iterations)} (M = {maxima or '-'}){fill}")
    if not all_solutions and len(solution_set.solutions) > 1:
        lines.append("")
        lines.append(f"... {len(solution_set.solutions) - 1} more; use --all-solutions")
    return "\n".join(lines) + "\n"


def format_report_text(report: VerificationReport) -> str:
    lines = [f"overall: {'PASS' if report.overall else 'FAIL'}"]
    for check in report.checks:
        line = f"  [{check.status.value}] {check.name}"
        if check.witness:
            line += f": {check.witness}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def grey_fill(tone: Fraction) -> str:
    """Fill colour with grey level round(255 * (1 - tone)), halves rounded up."""
    level = math.floor(255 * (ONE - Fraction(tone)) + Fraction(1, 2))
    return f"#{level:02x}{level:02x}{level:02x}"


def dot_quote(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")


def render_dot(graph: Graph, solutions: Sequence[Solution]) -> str:
    blocks = []
    for position, solution in enumerate(solutions):
        name = "G" if len(solutions) == 1 else f"G{position}"
        lines = [f"graph {name} {{", "  node [style=filled, fontname=\"Helvetica\"];"]
        for v in range(graph.n):
            tone = solution.greyscale[v]
            fill = grey_fill(tone)
            font = "white" if fill == "#000000" else "black"
            lines.append(f"  {v} [label=\"{dot_quote(graph.label(v))}\\n{tone_to_string(tone)}\", "
                         f"fillcolor=\"{fill}\", fontcolor=\"{font}\"];")
        for u, v in graph.sorted_edges():
            label = tone_to_string(abs(solution.greyscale[u] - solution.greyscale[v]))
            lines.append(f"  {u} -- {v} [label=\"{label}\"];")
        lines.append("}")
        blocks.append("\n".join(lines))
    return "\n".join(blocks) + "\n"


def emit_solution_set(solution_set: SolutionSet, output_format: str, graph: Graph,
                      all_solutions: bool = False) -> str:
    if output_format == 'json':
        return to_json(solution_set_to_dict(solution_set))
    if output_format == 'text':
        return format_solution_set_text(solution_set, all_solutions, graph)
    if output_format == 'dot':
        shown = solution_set.solutions if all_solutions else solution_set.solutions[:1]
        return render_dot(graph, shown)
    raise ValueError(f"Unsupported output format: {output_format}")


# Example usage
if __name__ == "__main__":
    print(compress_vector(GradationVector(tuple(Fraction(1, 4) for _ in range(4)) + (Fraction(0),) * 2)))
    for sample in (Fraction(0), Fraction(1, 2), Fraction(1)):
        print(sample, grey_fill(sample))
