from dataclasses import replace
from fractions import Fraction

import networkx as nx
import pytest

from app.graph import Graph, random_connected_graph
from app.greyscale import ONE, ZERO, GradationVector, Greyscale, IncompleteGreyscale, ToneError
from app.solver import migg, rmigg_both_extremes
from app.verify import (
    CheckStatus,
    OracleBudgetExceeded,
    VerificationReport,
    brute_force_min_gradation,
    check_antipodal_extremes,
    check_diameter_prefix,
    check_relabelling_uniqueness,
    check_solution,
    check_solution_set,
    check_vector_shape,
    greyscale_on_grid,
    run_lemma_suite,
    verify_problem,
)

F = Fraction
H = F(1, 2)
Q = F(1, 4)


def path(n):
    return Graph.from_networkx(nx.path_graph(n))


@pytest.fixture
def kite():
    return Graph.from_edges(4, [(0, 1), (1, 2), (0, 3), (3, 1)])


@pytest.fixture
def kite_fixed():
    return IncompleteGreyscale.from_mapping({0: ZERO, 2: ONE})


def test_report_statuses():
    report = VerificationReport()
    report.add("ok", True, "unused")
    report.flag("odd", "looks odd")
    report.skip("slow", "too slow")
    assert report.overall
    assert report.get("ok").witness is None
    report.add("broken", False, "witness")
    assert not report.overall
    assert [check.name for check in report.failures()] == ["broken"]
    assert report.get("missing") is None


def test_greyscale_on_grid():
    assert greyscale_on_grid((ZERO, Q, ONE), 4)
    assert not greyscale_on_grid((ZERO, F(1, 3), ONE), 4)


@pytest.mark.parametrize("graph, denominator, expected", [
    (path(3), 4, (H, H)),
    (Graph.from_networkx(nx.cycle_graph(4)), 4, (H, H, H, H)),
    (Graph.from_networkx(nx.complete_graph(4)), 12, (ONE, H, H, H, H, ZERO)),
    (Graph.from_networkx(nx.path_graph(5)), 8, (Q, Q, Q, Q)),
])
def test_oracle_on_small_graphs(graph, denominator, expected):
    assert brute_force_min_gradation(graph, grid_denominator=denominator) == GradationVector(expected)


def test_oracle_with_one_extreme():
    fixed = IncompleteGreyscale.from_mapping({0: ZERO})
    assert brute_force_min_gradation(path(3), fixed, grid_denominator=4).components == (H, H)


def test_oracle_with_both_extremes(kite, kite_fixed):
    assert brute_force_min_gradation(kite, kite_fixed, grid_denominator=8).components == (H, H, Q, Q)


def test_oracle_rejects_off_grid_prefixed_tone():
    fixed = IncompleteGreyscale.from_mapping({0: ZERO, 1: F(1, 3)})
    with pytest.raises(ToneError):
        brute_force_min_gradation(path(3), fixed, grid_denominator=4)


def test_oracle_budget():
    with pytest.raises(OracleBudgetExceeded):
        brute_force_min_gradation(path(8), grid_denominator=840, budget=1_000_000, max_free=4)


@pytest.mark.parametrize("seed", range(3))
def test_oracle_never_beats_migg(seed):
    g = random_connected_graph(5, 0.4, seed=seed)
    solved = migg(g)
    oracle = brute_force_min_gradation(g, grid_denominator=60)
    if all(greyscale_on_grid(s.greyscale, 60) for s in solved.solutions):
        assert oracle == solved.vector
    else:
        assert solved.vector.components <= oracle.components


def test_check_solution_accepts_solver_output(kite, kite_fixed):
    report = check_solution(kite, kite_fixed, rmigg_both_extremes(kite, kite_fixed))
    assert report.overall
    assert {check.name for check in report.checks} >= {
        "valid_greyscale", "compatible", "vector_recomputed", "trace_strict_decrease",
        "trace_maximum", "trace_colouring", "geodesic_saturation", "flood_fill_zero",
    }


def test_check_solution_accepts_flood_fill():
    star = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    fixed = IncompleteGreyscale.from_mapping({1: ZERO, 2: ONE})
    assert check_solution(star, fixed, rmigg_both_extremes(star, fixed)).overall


def test_check_solution_catches_a_wrong_vector(kite, kite_fixed):
    solution = rmigg_both_extremes(kite, kite_fixed)
    forged = replace(solution, vector=GradationVector((H, H, F(1, 3), F(1, 3))))
    report = check_solution(kite, kite_fixed, forged)
    assert report.get("vector_recomputed").status is CheckStatus.FAIL


def test_check_solution_catches_a_missing_extreme(kite, kite_fixed):
    solution = rmigg_both_extremes(kite, kite_fixed)
    forged = replace(solution, greyscale=Greyscale((ZERO, H, H, Q)))
    report = check_solution(kite, kite_fixed, forged)
    assert report.get("valid_greyscale").status is CheckStatus.FAIL
    assert report.get("valid_greyscale").witness == "tone 1 not attained"
    assert report.get("compatible").status is CheckStatus.FAIL


def test_check_solution_catches_a_moved_interior_tone(kite, kite_fixed):
    solution = rmigg_both_extremes(kite, kite_fixed)
    forged = replace(solution, greyscale=Greyscale((ZERO, H, ONE, F(1, 3))))
    report = check_solution(kite, kite_fixed, forged)
    assert report.get("trace_colouring").status is CheckStatus.FAIL


def test_vector_shape_flags_stray_tones(kite, kite_fixed):
    trace = rmigg_both_extremes(kite, kite_fixed).trace
    report = check_vector_shape(trace, GradationVector((H, F(3, 8), Q)))
    assert report.get("vector_shape").status is CheckStatus.FLAG
    assert report.overall


def test_vector_shape_fails_unsorted_vector(kite, kite_fixed):
    trace = rmigg_both_extremes(kite, kite_fixed).trace
    report = check_vector_shape(trace, GradationVector((Q, H)))
    assert report.get("vector_sorted").status is CheckStatus.FAIL


def test_antipodal_extremes():
    assert check_antipodal_extremes(path(3), Greyscale((ZERO, H, ONE)))
    assert not check_antipodal_extremes(path(3), Greyscale((ZERO, ONE, H)))


def test_diameter_prefix():
    assert check_diameter_prefix(path(4), GradationVector((F(1, 3),) * 3))
    assert not check_diameter_prefix(path(4), GradationVector((H, H, ZERO)))
    assert not check_diameter_prefix(path(3), GradationVector((ONE,)))


def test_check_solution_set_on_migg():
    c4 = Graph.from_networkx(nx.cycle_graph(4))
    report = check_solution_set(c4, None, migg(c4), structural=True)
    assert report.overall
    assert report.get("solution[1].antipodal_extremes").status is CheckStatus.PASS


def test_check_solution_set_catches_complement_pairs():
    solution_set = migg(path(3))
    solution = solution_set.solutions[0]
    mirrored = replace(solution, greyscale=Greyscale((ONE, H, ZERO)))
    doubled = replace(solution_set, solutions=(solution, mirrored))
    assert check_solution_set(path(3), None, doubled).get("no_complement_pairs").status is CheckStatus.FAIL


def test_relabelling_uniqueness(kite, kite_fixed):
    report = check_relabelling_uniqueness(kite, kite_fixed, seed=1)
    assert report.get("relabelling_uniqueness").status is CheckStatus.PASS


@pytest.mark.parametrize("graph", [
    Graph.from_networkx(nx.cycle_graph(5)),
    random_connected_graph(8, 0.3, seed=4),
])
def test_lemma_suite_passes(graph):
    report = run_lemma_suite(graph, trials=20, seed=0)
    assert report.overall
    assert report.get("support_greyscale_tones").status is CheckStatus.PASS


def test_lemma_suite_catches_an_off_by_one_colour_increase():
    def off_by_one(f, d, u, v):
        return ZERO if u == v else abs(f[u] - f[v]) / (d[u, v] + 1)

    report = run_lemma_suite(Graph.from_networkx(nx.cycle_graph(5)), trials=5, seed=0,
                             colour_increase=off_by_one)
    assert report.get("maximum_pair_edge_tones").status is CheckStatus.FAIL
    assert not report.overall


def test_lemma_suite_skips_disconnected_graphs():
    report = run_lemma_suite(Graph.from_edges(3, [(0, 1)]), trials=5, seed=0)
    assert report.get("lemma_suite").status is CheckStatus.SKIP


def test_verify_problem_migg():
    _, report = verify_problem(path(4), None, 'migg', trials=5)
    assert report.overall
    assert report.get("oracle").status is CheckStatus.PASS
    assert report.get("solution[0].diameter_prefix").status is CheckStatus.PASS


def test_verify_problem_both_extremes(kite, kite_fixed):
    _, report = verify_problem(kite, kite_fixed, 'rmigg-both', trials=5, grid_denominator=8)
    assert report.overall
    assert report.get("relabelling_uniqueness") is not None
    assert report.get("oracle").status is CheckStatus.PASS


def test_verify_problem_skips_oracle_over_budget():
    _, report = verify_problem(path(3), None, 'migg', trials=2, budget=1, max_free=0)
    assert report.get("oracle").status is CheckStatus.SKIP
    assert report.overall


if __name__ == '__main__':
    pytest.main()
