import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import complete_graph, path_graph, star_graph
from fuzzcent.centrality import Method, RankingResult, rank
from fuzzcent.diffusion import SirParams, SpreadEstimate
from fuzzcent.evaluation import (
    _top_count,
    bench_to_csv,
    curve_from_csv,
    curve_to_csv,
    default_p_grid,
    growth_exponent,
    imprecision,
    imprecision_grid,
    imprecision_to_csv,
    random_graph,
    robustness,
    robustness_value,
    runtime_bench,
    size_ladder,
    top_k,
)
from fuzzcent.graphcore import FuzzyGraph, fuzzify, lcc_size

PARAMS = SirParams(beta=0.1)


def ordered(order, method=Method.NFDC) -> RankingResult:
    """Ranking whose order is exactly ``order``."""
    n = len(order)
    scores = np.empty(n)
    scores[list(order)] = np.arange(n, 0, -1, dtype=float)
    result = RankingResult.from_scores(method, scores)
    assert result.order.tolist() == list(order)
    return result


def spreads_of(values) -> list[SpreadEstimate]:
    return [SpreadEstimate(i, float(x), 0.0, PARAMS) for i, x in enumerate(values)]


# -- robustness --------------------------------------------------------------

def test_robustness_k4():
    curve = robustness(complete_graph(4), ordered([0, 1, 2, 3]))
    assert curve.lcc_fractions.tolist() == pytest.approx([1, 2 / 3, 1 / 3, 0])
    assert curve.r_value == pytest.approx(0.5)


def test_robustness_path_centre_first():
    curve = robustness(path_graph(3), ordered([1, 0, 2]))
    assert curve.lcc_fractions.tolist() == pytest.approx([0.5, 0.5, 0.0])
    assert curve.r_value == pytest.approx(1 / 3)


def test_robustness_path_end_first():
    curve = robustness(path_graph(3), ordered([0, 1, 2]))
    assert curve.lcc_fractions.tolist() == pytest.approx([1.0, 0.5, 0.0])
    assert curve.r_value == pytest.approx(0.5)


def test_star_hub_first_is_best():
    g = star_graph(6)
    hub = robustness(g, ordered([0, 1, 2, 3, 4, 5, 6])).r_value
    leaf = robustness(g, ordered([1, 2, 3, 4, 5, 6, 0])).r_value
    assert hub < leaf
    # isolated leaves: six steps of 1/6, then 0
    assert hub == pytest.approx(1 / 7)


def test_robustness_value_is_mean():
    assert robustness_value([1.0, 0.5, 0.0]) == 0.5


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.data())
def test_union_find_matches_lcc_oracle(seed, data):
    g = random_graph(25, 2.5, seed=seed)
    order = data.draw(st.permutations(list(range(g.n))))
    curve = robustness(g, ordered(order))
    expected = [lcc_size(g, order[:i]) / (g.n - 1) for i in range(1, g.n + 1)]
    assert curve.lcc_fractions.tolist() == pytest.approx(expected, abs=0)
    assert curve.removal_order.tolist() == list(order)


def test_robustness_values_in_range(karate):
    for method in Method:
        curve = robustness(karate, rank(fuzzify(karate, 1), method))
        assert ((curve.lcc_fractions >= 0) & (curve.lcc_fractions <= 1)).all()
        assert (np.diff(curve.lcc_fractions) <= 0).all()
        assert 0 <= curve.r_value <= 1


def test_robustness_invariant_under_relabelling():
    g = random_graph(30, 3.0, seed=2)
    perm = np.random.default_rng(0).permutation(g.n)
    h = FuzzyGraph(g.n, [(int(perm[u]), int(perm[v]), w) for u, v, w in g.edges()])
    order = list(range(g.n))
    a = robustness(g, ordered(order))
    b = robustness(h, ordered([int(perm[v]) for v in order]))
    assert a.lcc_fractions.tolist() == b.lcc_fractions.tolist()


def test_robustness_errors():
    with pytest.raises(ValueError):
        robustness(FuzzyGraph(1, []), ordered([0]))
    bad = RankingResult(Method.FD, np.zeros(3), np.array([0, 0, 1]))
    with pytest.raises(ValueError):
        robustness(path_graph(3), bad)


def test_curve_csv_round_trip(karate):
    curve = robustness(karate, rank(karate, Method.FD))
    text = curve_to_csv(curve)
    lines = text.splitlines()
    assert lines[0] == "step,lcc_fraction"
    assert len(lines) == 35
    back = curve_from_csv(text)
    assert back.tolist() == curve.lcc_fractions.tolist()
    assert robustness_value(back.tolist()) == curve.r_value


# -- imprecision -------------------------------------------------------------

def test_top_count_rounding():
    assert _top_count(0.1, 30) == 3
    assert _top_count(0.07, 100) == 7
    assert _top_count(0.02, 34) == 1
    assert _top_count(0.2, 34) == 7
    assert _top_count(1.0, 5) == 5
    for bad in (0.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            _top_count(bad, 10)


def test_top_k_ties_by_index():
    assert top_k(spreads_of([0.2, 0.5, 0.5, 0.1]), 2) == [1, 2]


def test_imprecision_perfect_ranking():
    s = spreads_of([0.1, 0.9, 0.5, 0.4])
    pt = imprecision(ordered([1, 2, 3, 0]), s, 0.5)
    assert pt.e_value == 0.0


def test_imprecision_hand_case():
    s = spreads_of([0.1, 0.9, 0.5, 0.4])
    pt = imprecision(ordered([3, 1, 2, 0]), s, 0.25)  # k = 1 picks node 3
    assert pt.f_method == 0.4 and pt.f_eff == 0.9
    assert pt.e_value == pytest.approx(1 - 0.4 / 0.9)
    pt = imprecision(ordered([3, 1, 2, 0]), s, 0.5)  # k = 2: {3,1} vs {1,2}
    assert pt.e_value == pytest.approx(1 - 1.3 / 1.4)


def test_imprecision_equal_spreads_is_zero():
    s = spreads_of([0.3, 0.7, 0.7])
    assert imprecision(ordered([2, 0, 1]), s, 0.3).e_value == 0.0


def test_imprecision_full_set_is_zero():
    s = spreads_of([0.3, 0.1, 0.8, 0.2])
    assert imprecision(ordered([1, 3, 0, 2]), s, 1.0).e_value == pytest.approx(0.0, abs=1e-15)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=30), st.floats(0.01, 1.0), st.data())
def test_imprecision_bounds_and_set_order(values, p, data):
    s = spreads_of(values)
    order = data.draw(st.permutations(list(range(len(values)))))
    pt = imprecision(ordered(order), s, p)
    assert 0.0 <= pt.e_value < 1.0
    k = _top_count(p, len(values))
    # only the top-k set matters, not its internal order
    head = list(order[:k])[::-1] + list(order[k:])
    assert imprecision(ordered(head), s, p).e_value == pytest.approx(pt.e_value, abs=1e-15)


def test_imprecision_errors():
    with pytest.raises(ValueError):
        imprecision(ordered([0, 1]), [], 0.1)
    with pytest.raises(ValueError):
        imprecision(ordered([0, 1, 2]), spreads_of([0.1, 0.2]), 0.1)


def test_imprecision_grid_default():
    assert default_p_grid() == [0.02, 0.04, 0.06, 0.08, 0.1, 0.12, 0.14, 0.16, 0.18, 0.2]
    s = spreads_of(np.linspace(0.1, 0.9, 50))
    points = imprecision_grid(ordered(list(range(50))), s)
    assert [q.p for q in points] == default_p_grid()
    text = imprecision_to_csv(points)
    assert text.splitlines()[0] == "p,f_method,f_eff,e_value"
    assert len(text.splitlines()) == 11


# -- benchmark ---------------------------------------------------------------

def test_runtime_bench_records(karate):
    recs = runtime_bench(karate, ["nfdc", Method.FD], repetitions=3, network="karate")
    assert [r.method for r in recs] == [Method.NFDC, Method.FD]
    assert all(r.reps == 3 and r.network == "karate" and r.median_seconds > 0 for r in recs)
    text = bench_to_csv(recs)
    assert text.splitlines()[0] == "method,network,median_seconds,reps"
    assert text.splitlines()[1].startswith("NFDC,karate,")


def test_runtime_bench_needs_three_reps(karate):
    with pytest.raises(ValueError):
        runtime_bench(karate, [Method.FD], repetitions=2)


def test_random_graph_shape():
    g = random_graph(100, 6.0, seed=1)
    assert (g.n, g.m) == (100, 300)
    assert ((g.weight > 0) & (g.weight <= 1)).all()
    assert random_graph(100, 6.0, seed=1) == g
    with pytest.raises(ValueError):
        random_graph(4, 10.0)


def test_size_ladder_smoke():
    edges, recs = size_ladder([50, 100], [Method.FD], repetitions=3)
    assert edges == [150, 300]
    assert [r.network for r in recs] == ["random-n50", "random-n100"]


def test_growth_exponent_exact():
    sizes = [100, 200, 400, 800]
    assert growth_exponent(sizes, [s ** 1.5 * 1e-6 for s in sizes]) == pytest.approx(1.5)
    assert growth_exponent(sizes, [3e-4 * s for s in sizes]) == pytest.approx(1.0)
    assert math.isfinite(growth_exponent(sizes, [1, 1, 1, 1]))
