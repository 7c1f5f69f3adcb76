import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aspl3 import (
    DiameterMismatch,
    aspl_bound,
    aspl_equality,
    aspl_gap,
    bounds_report,
    brute_force_motifs,
    count_k_multiple,
    count_squares,
    count_triangles,
    distance_summary,
    moore_bound,
    motif_counts,
    random_regular,
    t_of_m,
)
from aspl3.bounds import CommonNeighborHistogram, t_of_m_by_subsets
from graphs import complete, cycle, k23, petersen, random_simple, small_regular_graphs, two_triangles


def test_triangles():
    assert count_triangles(complete(4)) == 4
    assert count_triangles(cycle(7)) == 0
    assert count_triangles(two_triangles()) == 2


def test_squares():
    assert count_squares(cycle(4)) == 1
    assert count_squares(complete(4)) == 3
    assert count_squares(cycle(7)) == 0


def test_k_multiple():
    assert count_k_multiple(complete(4), 2) == (6, 0)
    assert count_k_multiple(k23(), 2) == (0, 1)
    for k in (2, 3, 4):
        assert count_k_multiple(cycle(7), k) == (0, 0)


def test_k1_is_plain_motif():
    g = random_regular(16, 6, seed=2)
    assert count_k_multiple(g, 1) == (count_triangles(g), count_squares(g))


def test_closed_forms_match_brute_force(named_graph):
    fast = motif_counts(named_graph, ks=(1, 2, 3, 4))
    slow = brute_force_motifs(named_graph, ks=(1, 2, 3, 4))
    assert fast == slow
    assert slow.k_triangles[1] == slow.triangles and slow.k_squares[1] == slow.squares


@pytest.mark.parametrize("seed", range(5))
def test_closed_forms_match_brute_force_random(seed):
    rng = np.random.default_rng(seed)
    for _ in range(20):
        g = random_simple(int(rng.integers(4, 10)), float(rng.uniform(0.2, 0.9)), rng)
        assert motif_counts(g, ks=(2, 3, 4)) == brute_force_motifs(g, ks=(2, 3, 4))


def test_brute_force_cap():
    with pytest.raises(ValueError):
        brute_force_motifs(cycle(80))


def test_t_values_k4():
    assert [t_of_m(complete(4), m) for m in range(1, 6)] == [18, 18, 6, 0, 0]
    # alternating sum 18 - 18 + 6 = n1 + n2 = 6
    assert CommonNeighborHistogram.of(complete(4)).alternating_sum() == 6


def test_t_values_c7():
    assert t_of_m(cycle(7), 1) == 14
    assert all(t_of_m(cycle(7), m) == 0 for m in range(2, 6))


@pytest.mark.parametrize("g", small_regular_graphs(8, seed=4), ids=str)
def test_t1_regular(g):
    assert t_of_m(g, 1) == g.n * g.degree**2 // 2


def test_t_lemma_cases():
    g = random_regular(12, 6, seed=0)
    h = CommonNeighborHistogram.of(g)
    deg = g.degrees()
    assert h.t(1) == int((deg**2).sum()) // 2
    assert h.t(2) == 3 * h.triangles() + 2 * h.squares()
    for m in range(3, 7):
        assert h.t(m) == h.k_triangles(m - 1) + h.k_squares(m - 1)


def test_t_matches_subset_definition(named_graph):
    if named_graph.n > 10:
        pytest.skip("subset oracle limited to n <= 10")
    for m in range(1, 6):
        assert t_of_m(named_graph, m) == t_of_m_by_subsets(named_graph, m)


@pytest.mark.parametrize("seed", range(3))
def test_t_matches_subset_definition_random(seed):
    rng = np.random.default_rng(seed)
    for _ in range(5):
        g = random_simple(int(rng.integers(4, 9)), float(rng.uniform(0.3, 0.9)), rng)
        for m in range(1, 5):
            assert t_of_m(g, m) == t_of_m_by_subsets(g, m)


@pytest.mark.parametrize("g", small_regular_graphs(20, seed=9, n_range=(8, 120)), ids=str)
def test_alternating_sum_counts_close_pairs(g):
    s = distance_summary(g)
    assert CommonNeighborHistogram.of(g).alternating_sum() == s.n1 + s.n2


def test_equality_c7():
    assert aspl_equality(cycle(7)) == 2
    assert 3 - Fraction(2, 42) * (7 + 14) == 2


def test_equality_cubic_order_12():
    found = 0
    for seed in range(40):
        g = random_regular(12, 3, seed=seed)
        s = distance_summary(g)
        if s.diameter == 3:
            assert aspl_equality(g, summary=s) == s.aspl
            found += 1
    assert found >= 5


def test_equality_rejects_petersen():
    with pytest.raises(DiameterMismatch):
        aspl_equality(petersen())


def test_bound_t1_is_moore():
    g = random_regular(200, 8, seed=3)
    b = aspl_bound(g, 1)
    assert b.direction == "lower"
    assert b.value == moore_bound(200, 8) == 3 - Fraction(8 * 9, 199)


def test_bound_t2_closed_form():
    g = random_regular(150, 8, seed=6)
    n, d = g.n, g.degree
    tri, sq = count_triangles(g), count_squares(g)
    b = aspl_bound(g, 2)
    assert b.direction == "upper"
    assert b.value == 3 - Fraction(d * (d + 1), n - 1) + Fraction(6 * tri + 4 * sq, n * (n - 1))


def test_bounds_c7():
    for t in (1, 2, 3):
        assert aspl_bound(cycle(7), t).value == 2


@pytest.mark.parametrize(
    "n,d,expected",
    [(4096, 60, "2.1062"), (4096, 64, "1.9841"), (10000, 60, "2.6340"), (10000, 64, "2.5840")],
)
def test_moore_table(n, d, expected):
    assert f"{float(moore_bound(n, d)):.4f}" == expected


def test_moore_exact():
    assert moore_bound(13, 3) == 2


def test_gap_table_values():
    assert f"{aspl_gap(2.6901, 10000, 60) * 1e3:.4g}" == "21.31"
    assert f"{aspl_gap(2.3951, 4096, 60) * 1e2:.4g}" == "13.72"
    assert aspl_gap(moore_bound(500, 10), 500, 10) == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_bound_ordering(seed):
    rng = np.random.default_rng(seed)
    n = 2 * int(rng.integers(15, 60))
    d = int(rng.integers(4, 9))
    g = random_regular(n, d, seed=seed)
    s = distance_summary(g)
    if s.diameter != 3:
        return
    h = CommonNeighborHistogram.of(g)
    b1, b2, b3 = (aspl_bound(g, t, h).value for t in (1, 2, 3))
    assert b1 <= b3 <= s.aspl <= b2
    assert aspl_equality(g, h, s) == s.aspl


def test_report_json_fields():
    g = random_regular(100, 6, seed=1)
    rep = bounds_report(g, t_max=4)
    data = json.loads(json.dumps(rep.to_dict()))
    for key in ("n", "d", "t_values", "equality_aspl", "bounds", "moore", "aspl_gap", "diameter_verified"):
        assert key in data
    assert set(data["bounds"]) == {"1", "2", "3", "4"}
    assert data["bounds"]["2"]["direction"] == "upper"
    if data["diameter_verified"]:
        assert data["equality_aspl"] == pytest.approx(data["aspl"], rel=0, abs=1e-15)


def test_report_flags_petersen():
    data = bounds_report(petersen()).to_dict()
    assert data["diameter_verified"] is False
    assert data["equality_aspl"] is None
    assert "note" in data
