"""
Independent correctness machinery.

Nothing here trusts the solver: the grid oracle searches tone assignments
directly, the certificate checks recompute every distance matrix from the
edge sets recorded in a trace, and the lemma suite samples random
greyscales against the geodesic properties the solver relies on.
"""
import enum
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import networkx as nx

from app.graph import (
    DisconnectedGraphError,
    DistanceMatrix,
    Graph,
    all_pairs_distances,
    connected_components,
    diameter_and_antipodal_pairs,
    geodesic_interval,
    relabel,
)
from app.greyscale import (
    ONE,
    ZERO,
    GradationVector,
    Greyscale,
    IncompleteGreyscale,
    ToneError,
    complement,
    edge_colour_increase,
    gradation_vector,
    is_compatible,
    is_valid_greyscale,
    support_greyscale,
)
from app.solver import CcmTrace, Solution, SolutionSet, rmigg_both_extremes, solve

logger = logging.getLogger(__name__)

ColourIncrease = Callable[[Sequence[Fraction], DistanceMatrix, int, int], Fraction]


class OracleBudgetExceeded(RuntimeError):
    pass


class CheckStatus(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    FLAG = "flag"
    SKIP = "skipped"


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: CheckStatus
    witness: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.status is not CheckStatus.FAIL


@dataclass
class VerificationReport:
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(check.passed for check in self.checks)

    def add(self, name: str, ok: bool, witness: Optional[str] = None) -> None:
        self.checks.append(CheckResult(name, CheckStatus.PASS if ok else CheckStatus.FAIL,
                                       None if ok else witness))

    def flag(self, name: str, witness: str) -> None:
        self.checks.append(CheckResult(name, CheckStatus.FLAG, witness))

    def skip(self, name: str, reason: str) -> None:
        self.checks.append(CheckResult(name, CheckStatus.SKIP, reason))

    def extend(self, other: "VerificationReport", prefix: str = "") -> None:
        for check in other.checks:
            self.checks.append(CheckResult(prefix + check.name, check.status, check.witness))

    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def get(self, name: str) -> Optional[CheckResult]:
        for check in self.checks:
            if check.name == name:
                return check
        return None


def _fmt(tones: Sequence[Fraction]) -> str:
    return "(" + ", ".join(str(t) for t in tones) + ")"


# Grid oracle

def greyscale_on_grid(f: Sequence[Fraction], denominator: int) -> bool:
    """True iff every tone is an integer multiple of 1/denominator."""
    return all((Fraction(t) * denominator).denominator == 1 for t in f)


class _GridSearch:
    """Depth-first branch and bound over integer tones 0..L."""

    def __init__(self, g: Graph, d: DistanceMatrix, denominator: int):
        self.g = g
        self.d = d
        self.L = denominator
        self.best: Optional[Tuple[int, ...]] = None
        self.nodes = 0

    def bound(self) -> int:
        return self.best[0] if self.best is not None else self.L

    def run(self, assigned: Dict[int, int]) -> None:
        self._visit(dict(assigned))

    def _known(self, assigned: Dict[int, int]) -> List[int]:
        return sorted((abs(assigned[u] - assigned[v]) for u, v in self.g.edges
                       if u in assigned and v in assigned), reverse=True)

    def _offer(self, vector: List[int]) -> None:
        candidate = tuple(vector)
        if self.best is None or candidate < self.best:
            self.best = candidate

    def _intervals(self, assigned: Dict[int, int], free: List[int]) -> Optional[Dict[int, Tuple[int, int]]]:
        bound = self.bound()
        for a, b in combinations(assigned, 2):
            if abs(assigned[a] - assigned[b]) > self.d.distance(a, b) * bound:
                return None
        intervals = {}
        for w in free:
            lo, hi = 0, self.L
            for a, tone in assigned.items():
                reach = self.d.distance(a, w) * bound
                lo, hi = max(lo, tone - reach), min(hi, tone + reach)
            if lo > hi:
                return None
            intervals[w] = (lo, hi)
        return intervals

    def _visit(self, assigned: Dict[int, int]) -> None:
        self.nodes += 1
        known = self._known(assigned)
        if self.best is not None and tuple(known + [0] * (self.g.m - len(known))) >= self.best:
            return
        free = [w for w in range(self.g.n) if w not in assigned]
        if not free:
            self._offer(known)
            return
        intervals = self._intervals(assigned, free)
        if intervals is None:
            return

        open_vertices = [w for w in free if any(x not in assigned for x in self.g.adjacency[w])]
        if not open_vertices:
            # Free vertices are pairwise non-adjacent now, so each one is chosen on its own
            tones = list(known)
            for w in free:
                tones.extend(self._best_local(assigned, w, intervals[w]))
            self._offer(sorted(tones, reverse=True))
            return

        w = min(open_vertices, key=lambda x: (intervals[x][1] - intervals[x][0], x))
        for value in _outward(*intervals[w]):
            assigned[w] = value
            self._visit(assigned)
            del assigned[w]

    def _best_local(self, assigned: Dict[int, int], w: int, interval: Tuple[int, int]) -> List[int]:
        # The largest distance is convex in the tone, so only the clamped midpoints can win
        neighbours = [assigned[x] for x in self.g.adjacency[w]]
        lo, hi = interval
        total = min(neighbours) + max(neighbours)
        candidates = {min(max(value, lo), hi) for value in (total // 2, (total + 1) // 2)}
        return min(sorted((abs(value - t) for t in neighbours), reverse=True) for value in candidates)


def _outward(lo: int, hi: int):
    middle = (lo + hi) // 2
    yield middle
    for step in range(1, hi - lo + 1):
        if middle + step <= hi:
            yield middle + step
        if middle - step >= lo:
            yield middle - step


def _placements(g: Graph, d: DistanceMatrix, fixed: IncompleteGreyscale) -> List[Dict[int, Fraction]]:
    free = [v for v in range(g.n) if v not in fixed]
    has_zero, has_one = fixed.attains(ZERO), fixed.attains(ONE)
    if has_zero and has_one:
        return [{}]
    if has_zero or has_one:
        missing = ONE if has_zero else ZERO
        return [{w: missing} for w in free]
    if len(fixed) == 0:
        # Complementing a grid assignment keeps its vector, so one orientation suffices
        pairs = sorted(combinations(free, 2), key=lambda p: (-d.distance(*p), p))
    else:
        pairs = list(permutations(free, 2))
    return [{u: ZERO, v: ONE} for u, v in pairs]


def brute_force_min_gradation(g: Graph, fixed: Optional[IncompleteGreyscale] = None,
                              grid_denominator: int = 840, budget: int = 100_000_000,
                              max_free: int = 4) -> GradationVector:
    """
    Lexicographically minimum gradation vector over all greyscales whose
    free tones lie on the grid {0, 1/L, ..., 1}.

    Equal to the true minimum when the optimum lies on the grid and an upper
    bound under lexicographic order otherwise.

    Raises:
        OracleBudgetExceeded: When some extreme placement leaves more than
            `max_free` free vertices and (L + 1) ** free exceeds `budget`.
        ToneError: When a prefixed tone is not a multiple of 1/L.
    """
    if not g.is_connected():
        raise DisconnectedGraphError("The oracle needs a connected graph")
    if g.n < 2:
        raise ValueError("The oracle needs at least two vertices")
    fixed = fixed or IncompleteGreyscale()
    fixed.validate_for(g)
    L = grid_denominator
    for v, tone in fixed.items:
        if (tone * L).denominator != 1:
            raise ToneError(f"Prefixed tone {tone} of vertex {v} is not on the 1/{L} grid")

    d = all_pairs_distances(g)
    placements = _placements(g, d, fixed)
    if not placements:
        raise ValueError("Too few free vertices to place the extreme tones")
    for placement in placements:
        free = g.n - len(fixed) - len(placement)
        if free > max_free and (L + 1) ** free > budget:
            raise OracleBudgetExceeded(
                f"{free} free vertices on a 1/{L} grid exceed the budget of {budget} assignments")

    search = _GridSearch(g, d, L)
    base = {v: int(tone * L) for v, tone in fixed.items}
    for placement in placements:
        assigned = dict(base)
        assigned.update({v: int(tone * L) for v, tone in placement.items()})
        search.run(assigned)
    logger.debug(f"Grid oracle (L={L}) visited {search.nodes} nodes over {len(placements)} placement(s)")
    return GradationVector(tuple(Fraction(k, L) for k in search.best))


# Certificate checks

def _check_trace(g: Graph, fixed: Optional[IncompleteGreyscale], s: Solution, report: VerificationReport) -> None:
    f, trace = s.greyscale, s.trace
    maxima = trace.maxima
    decreasing = all(b < a for a, b in zip(maxima, maxima[1:]))
    report.add("trace_strict_decrease", decreasing, f"maxima {_fmt(maxima)}")

    coloured = set(fixed.domain) if fixed is not None else set()
    if s.anchor is not None:
        coloured.update((s.anchor.zero, s.anchor.one))
    maximum_problems: List[str] = []
    colouring_problems: List[str] = []
    saturation_problems: List[str] = []
    for record in trace.iterations:
        current = Graph(n=g.n, edges=frozenset(record.edges_before),
                        vertices=frozenset(v for e in record.edges_before for v in e))
        d = all_pairs_distances(current)

        recomputed = max((edge_colour_increase(f, d, a, b)
                          for component in connected_components(current)
                          for a, b in combinations([w for w in component if w in coloured], 2)),
                         default=None)
        if recomputed != record.maximum:
            maximum_problems.append(f"iteration {record.index}: recorded {record.maximum}, recomputed {recomputed}")

        geodesic_edges = set()
        for u, v in record.pairs:
            if edge_colour_increase(f, d, u, v) != record.maximum:
                colouring_problems.append(f"iteration {record.index}: pair {u}-{v} does not attain the maximum")
            low = u if f[u] <= f[v] else v
            interval = geodesic_interval(d, u, v)
            for w in interval:
                expected = f[low] + d.distance(w, low) * record.maximum
                if f[w] != expected:
                    colouring_problems.append(
                        f"iteration {record.index}: vertex {w} has {f[w]}, expected {expected}")
            for a, b in record.edges_before:
                if a in interval and b in interval and abs(d.distance(a, low) - d.distance(b, low)) == 1:
                    geodesic_edges.add((a, b))
        for w, tone in record.coloured:
            if f[w] != tone:
                colouring_problems.append(f"iteration {record.index}: vertex {w} recorded {tone}, final {f[w]}")
        for a, b, tone in record.saturated:
            if abs(f[a] - f[b]) != tone:
                saturation_problems.append(f"edge {a}-{b} recorded {tone}, final {abs(f[a] - f[b])}")
            elif (a, b) in geodesic_edges and tone != record.maximum:
                saturation_problems.append(
                    f"geodesic edge {a}-{b} has {tone}, iteration {record.index} maximum {record.maximum}")
        coloured.update(w for w, _ in record.coloured)

    report.add("trace_maximum", not maximum_problems, "; ".join(maximum_problems[:3]))
    report.add("trace_colouring", not colouring_problems, "; ".join(colouring_problems[:3]))
    report.add("geodesic_saturation", not saturation_problems, "; ".join(saturation_problems[:3]))

    fill_problems = []
    if trace.flood_fill is not None:
        for group in trace.flood_fill.groups:
            for w in group.vertices:
                if f[w] != group.tone:
                    fill_problems.append(f"vertex {w} has {f[w]}, flood tone {group.tone}")
            for a, b in group.edges:
                if f[a] != f[b]:
                    fill_problems.append(f"flood-filled edge {a}-{b} has tone {abs(f[a] - f[b])}")
    report.add("flood_fill_zero", not fill_problems, "; ".join(fill_problems[:3]))


def check_solution(g: Graph, fixed: Optional[IncompleteGreyscale], s: Solution) -> VerificationReport:
    report = VerificationReport()
    f = s.greyscale
    valid, reason = is_valid_greyscale(g, f)
    report.add("valid_greyscale", valid, reason)
    if len(f) != g.n:
        return report
    report.add("compatible", fixed is None or is_compatible(f, fixed),
               f"greyscale {_fmt(f.tones)} disagrees with prefixed tones")
    recomputed = gradation_vector(g, f)
    report.add("vector_recomputed", recomputed == s.vector,
               f"stored {_fmt(s.vector.components)}, recomputed {_fmt(recomputed.components)}")
    _check_trace(g, fixed, s, report)
    return report


def check_vector_shape(t: CcmTrace, v: GradationVector) -> VerificationReport:
    """
    Fails on an unsorted vector; flags, without failing, any nonzero tone
    that is not one of the trace maxima.
    """
    report = VerificationReport()
    components = v.components
    report.add("vector_sorted", all(a >= b for a, b in zip(components, components[1:])),
               f"vector {_fmt(components)} is not decreasing")
    maxima = set(t.maxima)
    stray = sorted({c for c in components if c != 0 and c not in maxima}, reverse=True)
    if stray:
        report.flag("vector_shape", f"tones {_fmt(stray)} are not among the maxima {_fmt(t.maxima)}")
    else:
        report.add("vector_shape", True)
    return report


def check_antipodal_extremes(g: Graph, f: Greyscale) -> bool:
    d = all_pairs_distances(g)
    diameter, _ = diameter_and_antipodal_pairs(g, d)
    zeros = [v for v in range(g.n) if f[v] == ZERO]
    ones = [v for v in range(g.n) if f[v] == ONE]
    return all(d.distance(u, v) == diameter for u in zeros for v in ones)


def check_diameter_prefix(g: Graph, v: GradationVector) -> bool:
    diameter, _ = diameter_and_antipodal_pairs(g, all_pairs_distances(g))
    if diameter == 0 or len(v) < diameter:
        return False
    return all(c == Fraction(1, diameter) for c in v.components[:diameter])


def check_solution_set(g: Graph, fixed: Optional[IncompleteGreyscale], solution_set: SolutionSet,
                       structural: bool = False) -> VerificationReport:
    """Per-solution certificates plus set-level properties; `structural` adds the unrestricted-problem checks."""
    report = VerificationReport()
    report.add("nonempty", bool(solution_set.solutions), "no solutions")
    for position, solution in enumerate(solution_set.solutions):
        prefix = f"solution[{position}]."
        report.extend(check_solution(g, fixed, solution), prefix)
        report.extend(check_vector_shape(solution.trace, solution.vector), prefix)
        if structural:
            report.add(prefix + "antipodal_extremes", check_antipodal_extremes(g, solution.greyscale),
                       f"extremes of {_fmt(solution.greyscale.tones)} are not antipodal")
            report.add(prefix + "diameter_prefix", check_diameter_prefix(g, solution.vector),
                       f"vector {_fmt(solution.vector.components)} does not start with the diameter block")
    report.add("common_vector", all(s.vector == solution_set.vector for s in solution_set.solutions),
               "solutions disagree on the minimum vector")
    tones = {s.greyscale.tones for s in solution_set.solutions}
    paired = [s for s in solution_set.solutions
              if complement(s.greyscale).tones in tones and complement(s.greyscale).tones != s.greyscale.tones]
    report.add("no_complement_pairs", not paired and len(tones) == len(solution_set.solutions),
               "duplicate or complementary greyscales in the set")
    return report


def check_relabelling_uniqueness(graph: Graph, fixed: IncompleteGreyscale, seed: int) -> VerificationReport:
    """Solve under a random vertex permutation and map back; the both-extremes optimum must not move."""
    report = VerificationReport()
    rng = random.Random(seed)
    permutation = list(range(graph.n))
    rng.shuffle(permutation)
    original = rmigg_both_extremes(graph, fixed).greyscale
    moved = rmigg_both_extremes(
        relabel(graph, permutation),
        IncompleteGreyscale.from_mapping({permutation[v]: tone for v, tone in fixed.items}),
    ).greyscale
    back = Greyscale(tuple(moved[permutation[v]] for v in range(graph.n)))
    report.add("relabelling_uniqueness", back == original,
               f"permutation {permutation}: {_fmt(original.tones)} became {_fmt(back.tones)}")
    return report


# Lemma suite

def _random_greyscale(n: int, rng: random.Random) -> Greyscale:
    tones = []
    for _ in range(n):
        denominator = rng.randint(1, 24)
        tones.append(Fraction(rng.randint(0, denominator), denominator))
    zero, one = rng.sample(range(n), 2)
    tones[zero], tones[one] = ZERO, ONE
    return Greyscale(tuple(tones))


class _LemmaTally:
    def __init__(self):
        self.problems: Dict[str, List[str]] = {}

    def fail(self, name: str, witness: str) -> None:
        self.problems.setdefault(name, []).append(witness)

    def record(self, report: VerificationReport, names: Sequence[str]) -> None:
        for name in names:
            found = self.problems.get(name, [])
            report.add(name, not found, f"{len(found)} violation(s); first: {found[0]}" if found else None)


_LEMMA_CHECKS = (
    "geodesic_interior_increase",
    "geodesic_lower_bound",
    "tight_geodesic_uniform",
    "maximum_pair_vertex_tones",
    "maximum_pair_edge_tones",
)


def _support_lemma(g: Graph, d: DistanceMatrix, report: VerificationReport) -> None:
    diameter, antipodal = diameter_and_antipodal_pairs(g, d)
    allowed = {Fraction(1, diameter), Fraction(1, 2 * diameter), ZERO}
    problems = []
    for u, v in antipodal:
        vector = gradation_vector(g, support_greyscale(g, d, u, v))
        stray = [c for c in vector if c not in allowed]
        if stray:
            problems.append(f"pair {u}-{v}: tones {_fmt(stray)}")
        if any(c != Fraction(1, diameter) for c in vector.components[:diameter]):
            problems.append(f"pair {u}-{v}: prefix {_fmt(vector.components[:diameter])}")
    report.add("support_greyscale_tones", not problems, "; ".join(problems[:3]))


def run_lemma_suite(g: Graph, trials: int, seed: int,
                    colour_increase: ColourIncrease = edge_colour_increase) -> VerificationReport:
    """
    Sample `trials` random greyscales and check the geodesic properties of
    the colour-increase mapping on every vertex pair and geodesic of `g`.

    `colour_increase` is injectable so that the suite can be shown to catch
    a faulty implementation.
    """
    report = VerificationReport()
    if g.n < 2 or not g.is_connected():
        report.skip("lemma_suite", "needs a connected graph with at least two vertices")
        return report

    d = all_pairs_distances(g)
    _support_lemma(g, d, report)

    pairs = list(combinations(range(g.n), 2))
    intervals = {pair: sorted(geodesic_interval(d, *pair)) for pair in pairs}
    geodesics = {pair: [tuple(path) for path in nx.all_shortest_paths(g.nx_graph, *pair)] for pair in pairs}
    rng = random.Random(seed)
    tally = _LemmaTally()

    for trial in range(trials):
        f = _random_greyscale(g.n, rng)
        increase = {pair: colour_increase(f, d, *pair) for pair in pairs}

        def rate(a: int, b: int) -> Fraction:
            return ZERO if a == b else increase[(a, b) if a < b else (b, a)]

        for (u, v) in pairs:
            low, high = sorted((f[u], f[v]))
            for w in intervals[(u, v)]:
                if w in (u, v):
                    continue
                uv, uw, wv = rate(u, v), rate(u, w), rate(w, v)
                if not (uv < max(uw, wv) or (uv == uw == wv and low <= f[w] <= high)):
                    tally.fail("geodesic_interior_increase",
                               f"trial {trial}, pair {u}-{v}, vertex {w}: F = {uv}, {uw}, {wv}")
            for path in geodesics[(u, v)]:
                tones = [abs(f[a] - f[b]) for a, b in zip(path, path[1:])]
                if rate(u, v) > max(tones):
                    tally.fail("geodesic_lower_bound", f"trial {trial}, path {path}: F = {rate(u, v)}")
                if rate(u, v) == max(tones) and any(t != rate(u, v) for t in tones):
                    tally.fail("tight_geodesic_uniform", f"trial {trial}, path {path}: tones {_fmt(tones)}")

        top = max(increase.values())
        for (u, v), value in increase.items():
            if value != top:
                continue
            low = u if f[u] <= f[v] else v
            for w in intervals[(u, v)]:
                if f[w] != f[low] + d.distance(low, w) * top:
                    tally.fail("maximum_pair_vertex_tones",
                               f"trial {trial}, pair {u}-{v}, vertex {w}: {f[w]}")
            for path in geodesics[(u, v)]:
                for a, b in zip(path, path[1:]):
                    if abs(f[a] - f[b]) != top:
                        tally.fail("maximum_pair_edge_tones",
                                   f"trial {trial}, pair {u}-{v}, edge {a}-{b}: {abs(f[a] - f[b])} != {top}")

    tally.record(report, _LEMMA_CHECKS)
    logger.info(f"Lemma suite: {trials} trial(s) on n={g.n}, m={g.m}; overall {report.overall}")
    return report


def verify_problem(g: Graph, fixed: Optional[IncompleteGreyscale], mode: str, restrict_antipodal: bool = True,
                   prune: bool = False, jobs: int = 1, grid_denominator: int = 840,
                   budget: int = 100_000_000, max_free: int = 4, trials: int = 100,
                   seed: int = 0) -> Tuple[SolutionSet, VerificationReport]:
    """Solve, then run every certificate, structural check, the lemma suite and the oracle comparison."""
    solution_set = solve(g, fixed, mode, restrict_antipodal=restrict_antipodal, prune=prune, jobs=jobs)
    report = check_solution_set(g, fixed, solution_set, structural=(mode == 'migg'))
    if mode == 'rmigg-both':
        report.extend(check_relabelling_uniqueness(g, fixed, seed))
    report.extend(run_lemma_suite(g, trials, seed))

    try:
        oracle = brute_force_min_gradation(g, fixed if mode != 'migg' else None, grid_denominator, budget, max_free)
    except (OracleBudgetExceeded, ToneError) as e:
        logger.warning(f"Oracle comparison skipped: {e}")
        report.skip("oracle", str(e))
        return solution_set, report

    on_grid = all(greyscale_on_grid(s.greyscale, grid_denominator) for s in solution_set.solutions)
    vector = solution_set.vector
    if on_grid:
        report.add("oracle", vector == oracle,
                   f"solver {_fmt(vector.components)}, oracle {_fmt(oracle.components)}")
    else:
        report.add("oracle", vector.components <= oracle.components,
                   f"oracle {_fmt(oracle.components)} beats solver {_fmt(vector.components)}")
    return solution_set, report
