"""
Minimum gradation solvers.

`CcmRun` is the compatible-complete-mapping procedure as a resumable run:
each `step()` performs one pass of the main loop (distances of the current
graph, maximum colour increase over coloured pairs, geodesic colouring,
deletion of saturated edges) or the terminal flood fill. The problem
wrappers enumerate extreme placements, run one CCM per candidate and keep
the lexicographic minima.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Dict, List, Optional, Sequence, Tuple

from app.config import get_config
from app.graph import (
    DisconnectedGraphError,
    Edge,
    Graph,
    all_pairs_distances,
    connected_components,
    delete_saturated_edges,
    diameter_and_antipodal_pairs,
    geodesic_interval,
)
from app.greyscale import (
    ONE,
    ZERO,
    GradationVector,
    Greyscale,
    IncompleteGreyscale,
    complement,
    edge_colour_increase,
    gradation_vector,
    is_compatible,
    is_valid_greyscale,
)
from app.runner import AsyncCandidateRunner

logger = logging.getLogger(__name__)


class PreconditionError(ValueError):
    pass


class InvariantViolation(RuntimeError):
    """Raised when a run contradicts a property the procedure guarantees; always a bug."""


@dataclass(frozen=True)
class IterationRecord:
    index: int
    maximum: Fraction
    pairs: Tuple[Edge, ...]
    coloured: Tuple[Tuple[int, Fraction], ...]
    saturated: Tuple[Tuple[int, int, Fraction], ...]
    components_before: int
    edges_before: Tuple[Edge, ...]


@dataclass(frozen=True)
class FloodFillGroup:
    anchor: int
    tone: Fraction
    vertices: Tuple[int, ...]
    edges: Tuple[Edge, ...]


@dataclass(frozen=True)
class FloodFill:
    after_iteration: int
    groups: Tuple[FloodFillGroup, ...]


@dataclass(frozen=True)
class CcmTrace:
    iterations: Tuple[IterationRecord, ...] = ()
    flood_fill: Optional[FloodFill] = None

    @property
    def maxima(self) -> Tuple[Fraction, ...]:
        return tuple(record.maximum for record in self.iterations)


@dataclass(frozen=True)
class Anchor:
    zero: int
    one: int


@dataclass(frozen=True)
class Solution:
    greyscale: Greyscale
    vector: GradationVector
    trace: CcmTrace
    anchor: Anchor


@dataclass(frozen=True)
class SolveStats:
    candidates: int = 0
    pruned: int = 0


@dataclass(frozen=True)
class SolutionSet:
    vector: GradationVector
    solutions: Tuple[Solution, ...]
    stats: SolveStats = SolveStats()

    def same_solutions(self, other: "SolutionSet") -> bool:
        """Equality of everything but the exploration statistics."""
        return self.vector == other.vector and self.solutions == other.solutions


@dataclass(frozen=True)
class Candidate:
    key: Tuple[int, ...]
    fixed: IncompleteGreyscale
    anchor: Anchor


def _require_connected(graph: Graph) -> None:
    if not graph.is_connected():
        raise DisconnectedGraphError(
            "Graph is disconnected; solve each connected component separately")


class CcmRun:
    def __init__(self, graph: Graph, fixed: IncompleteGreyscale, key: Tuple[int, ...] = (),
                 anchor: Optional[Anchor] = None):
        _require_connected(graph)
        if len(fixed) == 0:
            raise PreconditionError("The compatible-complete mapping needs at least one prefixed tone")
        fixed.validate_for(graph)
        self.graph = graph
        self.fixed = fixed
        self.key = key
        self.anchor = anchor
        self._current = graph
        self._tones: Dict[int, Fraction] = fixed.as_dict()
        self._iterations: List[IterationRecord] = []
        self._flood_fill: Optional[FloodFill] = None
        self._saturated_tones: List[Fraction] = []
        self._steps = 0

    @property
    def done(self) -> bool:
        return len(self._tones) == self.graph.n

    @property
    def iterations(self) -> Tuple[IterationRecord, ...]:
        return tuple(self._iterations)

    def step(self) -> bool:
        """Run one pass of the main loop; returns False once every vertex is coloured."""
        if self.done:
            return False
        self._steps += 1
        if self._steps > self.graph.m + 2:
            raise InvariantViolation(f"Run {self.key} did not terminate after {self._steps} steps")

        current = self._current
        distances = all_pairs_distances(current)
        components = connected_components(current)
        maximum, pairs = self._maximum(distances, components)

        if not pairs:
            self._fill(components, single_anchor=True)
            return True

        if self._iterations and not maximum < self._iterations[-1].maximum:
            raise InvariantViolation(
                f"Run {self.key}: maximum {maximum} does not decrease below {self._iterations[-1].maximum}")

        assigned: Dict[int, Fraction] = {}
        for u, v in pairs:
            low = u if self._tones[u] <= self._tones[v] else v
            base = self._tones[low]
            for w in sorted(geodesic_interval(distances, u, v)):
                tone = base + distances.distance(w, low) * maximum
                existing = self._tones.get(w)
                if existing is not None and existing != tone:
                    raise InvariantViolation(
                        f"Run {self.key}: vertex {w} coloured {existing} and then {tone} in iteration "
                        f"{len(self._iterations) + 1}")
                self._tones[w] = tone
                assigned[w] = tone

        saturated = tuple((a, b, abs(self._tones[a] - self._tones[b]))
                          for a, b in current.sorted_edges() if a in assigned and b in assigned)
        next_graph, removed = delete_saturated_edges(current, assigned)
        record = IterationRecord(
            index=len(self._iterations) + 1,
            maximum=maximum,
            pairs=tuple(pairs),
            coloured=tuple(sorted(assigned.items())),
            saturated=saturated,
            components_before=len(components),
            edges_before=tuple(current.sorted_edges()),
        )
        self._iterations.append(record)
        self._saturated_tones.extend(tone for _, _, tone in saturated)
        self._current = next_graph
        logger.debug(f"Run {self.key} iteration {record.index}: M={maximum}, |S|={len(pairs)}, "
                     f"coloured={len(assigned)}, saturated={len(saturated)}, removed={len(removed)}")

        # Every remaining coloured pair shares a tone once the maximum is zero
        if maximum == 0 and not self.done:
            self._fill(connected_components(next_graph), single_anchor=False)
        return True

    def _maximum(self, distances, components) -> Tuple[Optional[Fraction], List[Edge]]:
        best: Optional[Fraction] = None
        pairs: List[Edge] = []
        for component in components:
            coloured = [w for w in component if w in self._tones]
            for a, b in combinations(coloured, 2):
                value = edge_colour_increase(self._tones, distances, a, b)
                if best is None or value > best:
                    best, pairs = value, [(a, b)]
                elif value == best:
                    pairs.append((a, b))
        return best, pairs

    def _fill(self, components: Sequence[Tuple[int, ...]], single_anchor: bool) -> None:
        groups = []
        for component in components:
            coloured = [w for w in component if w in self._tones]
            if single_anchor and len(coloured) != 1:
                raise InvariantViolation(
                    f"Run {self.key}: flood fill component {component} holds {len(coloured)} coloured vertices")
            if not coloured or len({self._tones[w] for w in coloured}) != 1:
                raise InvariantViolation(
                    f"Run {self.key}: flood fill component {component} has no single anchor tone")
            anchor = coloured[0]
            tone = self._tones[anchor]
            for w in component:
                self._tones[w] = tone
            members = set(component)
            edges = tuple(e for e in self._current.sorted_edges() if e[0] in members)
            groups.append(FloodFillGroup(anchor=anchor, tone=tone, vertices=tuple(component), edges=edges))
            self._saturated_tones.extend(ZERO for _ in edges)
        self._flood_fill = FloodFill(after_iteration=len(self._iterations), groups=tuple(groups))
        self._current = Graph(n=self.graph.n, edges=frozenset(), labels=self.graph.labels, vertices=frozenset())
        if not self.done:
            raise InvariantViolation(f"Run {self.key}: vertices left uncoloured after the flood fill")
        logger.debug(f"Run {self.key} flood fill over {len(groups)} component(s)")

    def certain_prefix(self) -> Tuple[Tuple[Fraction, ...], Optional[Fraction]]:
        """
        The leading part of the final gradation vector that is already known.

        Edges saturated at an iteration with maximum M carry tones of at most M,
        and every edge still present finishes below the latest M. So the
        saturated tones >= latest M are exactly the final vector's entries
        >= latest M. Returns (prefix, latest M); a finished run returns its
        whole vector.
        """
        if self.done:
            return self.mapping_vector().components, ZERO
        if not self._iterations:
            return (), None
        threshold = self._iterations[-1].maximum
        prefix = tuple(sorted((t for t in self._saturated_tones if t >= threshold), reverse=True))
        return prefix, threshold

    def mapping(self) -> Greyscale:
        if not self.done:
            raise InvariantViolation(f"Run {self.key} queried before completion")
        return Greyscale(tuple(self._tones[v] for v in range(self.graph.n)))

    def mapping_vector(self) -> GradationVector:
        return gradation_vector(self.graph, self.mapping())

    def trace(self) -> CcmTrace:
        return CcmTrace(iterations=tuple(self._iterations), flood_fill=self._flood_fill)

    def solution(self) -> Solution:
        greyscale = self.mapping()
        if not is_compatible(greyscale, self.fixed):
            raise InvariantViolation(f"Run {self.key} lost a prefixed tone")
        return Solution(greyscale=greyscale, vector=gradation_vector(self.graph, greyscale),
                        trace=self.trace(), anchor=self.anchor)


def ccm(g: Graph, fixed: IncompleteGreyscale) -> Tuple[Greyscale, CcmTrace]:
    """Drive one compatible-complete-mapping run to completion."""
    run = CcmRun(g, fixed)
    while run.step():
        pass
    return run.mapping(), run.trace()


def solve_candidate(graph: Graph, candidate: Candidate) -> Solution:
    run = CcmRun(graph, candidate.fixed, key=candidate.key, anchor=candidate.anchor)
    while run.step():
        pass
    solution = run.solution()
    valid, reason = is_valid_greyscale(graph, solution.greyscale)
    if not valid:
        raise InvariantViolation(f"Candidate {candidate.key} produced an invalid greyscale: {reason}")
    return solution


def dedupe_complementary(solutions: Sequence[Solution]) -> List[Solution]:
    """
    Merge exact duplicates (first occurrence wins), then keep only the
    lexicographically smaller member of every complementary pair.
    """
    unique: Dict[Tuple[Fraction, ...], Solution] = {}
    for solution in solutions:
        unique.setdefault(solution.greyscale.tones, solution)
    kept = []
    for tones, solution in unique.items():
        mirrored = complement(solution.greyscale).tones
        if mirrored in unique and mirrored < tones:
            continue
        kept.append(solution)
    return sorted(kept, key=lambda s: s.greyscale.tones)


def _dominates(summary: Tuple[Tuple[Fraction, ...], Optional[Fraction]], prefix: Tuple[Fraction, ...]) -> bool:
    known, threshold = summary
    common = min(len(known), len(prefix))
    for x, y in zip(known[:common], prefix[:common]):
        if x != y:
            return x < y
    if len(known) < len(prefix):
        return threshold is not None and prefix[len(known)] >= threshold
    return False


def prune_candidates(active: Sequence[CcmRun]) -> List[CcmRun]:
    """
    Drop runs whose final vector is certain to be lexicographically greater
    than another run's. All runs must sit at an iteration boundary.

    Dominance compares certain prefixes, not saturated-edge counts: a run
    with fewer saturated edges still prunes a run whose next certain tone
    reaches its current maximum. Every tone a run has yet to fix lies strictly
    below its current maximum.
    """
    summaries = [run.certain_prefix() for run in active]
    survivors = []
    for i, run in enumerate(active):
        prefix = summaries[i][0]
        if any(_dominates(summaries[j], prefix) for j in range(len(active)) if j != i):
            logger.debug(f"Pruned candidate {run.key} with prefix {[str(t) for t in prefix]}")
            continue
        survivors.append(run)
    return survivors


def _run_lockstep(graph: Graph, candidates: Sequence[Candidate]) -> Tuple[List[Solution], int]:
    active = [CcmRun(graph, c.fixed, key=c.key, anchor=c.anchor) for c in candidates]
    pruned = 0
    while any(not run.done for run in active):
        for run in active:
            run.step()
        survivors = prune_candidates(active)
        pruned += len(active) - len(survivors)
        active = survivors
    return [run.solution() for run in active], pruned


def _run_candidates(graph: Graph, candidates: Sequence[Candidate], prune: bool,
                    jobs: int) -> Tuple[List[Solution], int]:
    if prune:
        return _run_lockstep(graph, candidates)
    if jobs > 1 and len(candidates) > 1:
        runner = AsyncCandidateRunner(get_config(), jobs=jobs)
        return runner.run(solve_candidate, candidates, graph), 0
    return [solve_candidate(graph, candidate) for candidate in candidates], 0


def _canonical(graph: Graph, solution: Solution) -> Solution:
    """Re-run with swapped extremes when the complement is the canonical member."""
    mirrored = complement(solution.greyscale)
    if not mirrored.tones < solution.greyscale.tones:
        return solution
    anchor = Anchor(zero=solution.anchor.one, one=solution.anchor.zero)
    swapped = solve_candidate(graph, Candidate(
        key=(anchor.zero, anchor.one),
        fixed=IncompleteGreyscale.from_mapping({anchor.zero: ZERO, anchor.one: ONE}),
        anchor=anchor))
    if swapped.greyscale != mirrored:
        raise InvariantViolation(f"Swapping the extremes of {solution.anchor} did not yield the complement")
    return swapped


def _solve_set(graph: Graph, candidates: Sequence[Candidate], prune: bool, jobs: int,
               canonical: bool = False) -> SolutionSet:
    logger.info(f"Running {len(candidates)} candidate(s) (prune={prune}, jobs={jobs})")
    solutions, pruned = _run_candidates(graph, candidates, prune, jobs)
    minimum = min(s.vector.components for s in solutions)
    winners = [s for s in solutions if s.vector.components == minimum]
    if canonical:
        winners = [_canonical(graph, s) for s in winners]
    kept = dedupe_complementary(winners)
    logger.info(f"Minimum vector reached by {len(winners)} candidate(s), {len(kept)} after dedupe; "
                f"{pruned} pruned")
    return SolutionSet(vector=GradationVector(minimum), solutions=tuple(kept),
                       stats=SolveStats(candidates=len(candidates), pruned=pruned))


def rmigg_both_extremes(g: Graph, fixed: IncompleteGreyscale) -> Solution:
    _require_connected(g)
    fixed.validate_for(g)
    zeros, ones = fixed.vertices_with(ZERO), fixed.vertices_with(ONE)
    if not zeros or not ones:
        raise PreconditionError("Both extreme tones 0 and 1 must be prefixed")
    return solve_candidate(g, Candidate(key=(), fixed=fixed, anchor=Anchor(zero=zeros[0], one=ones[0])))


def _free_vertices(g: Graph, fixed: IncompleteGreyscale) -> List[int]:
    return [v for v in range(g.n) if v not in fixed]


def rmigg_one_extreme(g: Graph, fixed: IncompleteGreyscale, prune: bool = False, jobs: int = 1) -> SolutionSet:
    _require_connected(g)
    fixed.validate_for(g)
    has_zero, has_one = fixed.attains(ZERO), fixed.attains(ONE)
    if has_zero == has_one:
        raise PreconditionError("Exactly one extreme tone must be prefixed")
    free = _free_vertices(g, fixed)
    if not free:
        raise PreconditionError("No free vertex can take the missing extreme tone")
    candidates = []
    for w in free:
        if has_zero:
            anchor = Anchor(zero=fixed.vertices_with(ZERO)[0], one=w)
            extension = {w: ONE}
        else:
            anchor = Anchor(zero=w, one=fixed.vertices_with(ONE)[0])
            extension = {w: ZERO}
        candidates.append(Candidate(key=(w,), fixed=fixed.extended(extension), anchor=anchor))
    return _solve_set(g, candidates, prune, jobs)


def rmigg_no_extreme(g: Graph, fixed: IncompleteGreyscale, prune: bool = False, jobs: int = 1) -> SolutionSet:
    _require_connected(g)
    fixed.validate_for(g)
    if fixed.attains(ZERO) or fixed.attains(ONE):
        raise PreconditionError("No extreme tone may be prefixed")
    free = _free_vertices(g, fixed)
    if len(free) < 2:
        raise PreconditionError("fewer than two free vertices")
    # Ordered pairs: with other tones prefixed the orientation matters
    candidates = [Candidate(key=(w0, w1), fixed=fixed.extended({w0: ZERO, w1: ONE}), anchor=Anchor(zero=w0, one=w1))
                  for w0, w1 in permutations(free, 2)]
    return _solve_set(g, candidates, prune, jobs)


def migg(g: Graph, restrict_antipodal: bool = True, prune: bool = False, jobs: int = 1) -> SolutionSet:
    if g.n < 2:
        raise PreconditionError("The problem needs at least two vertices")
    _require_connected(g)
    if restrict_antipodal:
        _, pairs = diameter_and_antipodal_pairs(g, all_pairs_distances(g))
    else:
        pairs = tuple(combinations(range(g.n), 2))
    candidates = [Candidate(key=(u, v), fixed=IncompleteGreyscale.from_mapping({u: ZERO, v: ONE}),
                            anchor=Anchor(zero=u, one=v))
                  for u, v in pairs]
    return _solve_set(g, candidates, prune, jobs, canonical=True)


def single_solution_set(solution: Solution) -> SolutionSet:
    return SolutionSet(vector=solution.vector, solutions=(solution,), stats=SolveStats(candidates=1))


def solve(g: Graph, fixed: Optional[IncompleteGreyscale], mode: str, restrict_antipodal: bool = True,
          prune: bool = False, jobs: int = 1) -> SolutionSet:
    """Dispatch on a resolved mode: 'migg', 'rmigg-both', 'rmigg-one' or 'rmigg-none'."""
    fixed = fixed or IncompleteGreyscale()
    logger.info(f"Solving {mode} on n={g.n}, m={g.m} with {len(fixed)} prefixed tone(s)")
    if mode == 'migg':
        return migg(g, restrict_antipodal=restrict_antipodal, prune=prune, jobs=jobs)
    if mode == 'rmigg-both':
        return single_solution_set(rmigg_both_extremes(g, fixed))
    if mode == 'rmigg-one':
        return rmigg_one_extreme(g, fixed, prune=prune, jobs=jobs)
    if mode == 'rmigg-none':
        return rmigg_no_extreme(g, fixed, prune=prune, jobs=jobs)
    raise ValueError(f"Unknown mode: {mode}")
