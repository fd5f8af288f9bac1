import numpy as np
import pytest

from bbsplit.graph import WeightedGraph, make_complete, make_cycle, make_line
from bbsplit.meeting import exact_meeting_times, hitting_times, max_meeting_time, mc_meeting_time, tau0_upper_proxy
from bbsplit.stream import replica_rng


def test_two_vertices():
    M = exact_meeting_times(make_line(2)).expected_meeting
    assert M[0, 1] == pytest.approx(1.0, abs=1e-12)


def test_diagonal_zero():
    for g in (make_line(4), make_cycle(5), make_complete(4)):
        assert np.all(np.diag(exact_meeting_times(g).expected_meeting) == 0)


def test_line_three_by_hand():
    # from (1,2) the pair meets at rate 1/2 or splits to (1,3) at rate 1/4
    M = exact_meeting_times(make_line(3)).expected_meeting
    assert M[0, 1] == pytest.approx(3.0) and M[0, 2] == pytest.approx(5.0) and M[1, 2] == pytest.approx(3.0)


def test_cycle_symmetry():
    M = exact_meeting_times(make_cycle(3)).expected_meeting
    off = M[~np.eye(3, dtype=bool)]
    np.testing.assert_allclose(off, off[0])
    M4 = exact_meeting_times(make_cycle(4)).expected_meeting
    assert M4[0, 1] == pytest.approx(6.0) and M4[0, 2] == pytest.approx(8.0)


def test_raw_rate_scaling():
    g = WeightedGraph(3, ((1, 2, 2.0), (2, 3, 2.0)))
    canon = exact_meeting_times(g).expected_meeting
    raw = exact_meeting_times(g, raw_rate=True).expected_meeting
    np.testing.assert_allclose(raw * g.total_weight, canon)


def test_max_meeting_time_cached():
    assert max_meeting_time(make_line(3)) == pytest.approx(5.0)


def test_mc_two_vertices():
    mean, se = mc_meeting_time(make_line(2), 1, 2, replica_rng(17), 100_000)
    assert abs(mean - 1.0) <= 3 * se


def test_mc_same_vertex():
    assert mc_meeting_time(make_line(3), 2, 2, replica_rng(1), 10) == (0.0, 0.0)


def test_mc_line_four_endpoints():
    g = make_line(4)
    exact = exact_meeting_times(g).expected_meeting[0, 3]
    mean, se = mc_meeting_time(g, 1, 4, replica_rng(2), 50_000)
    assert abs(mean - exact) <= 3 * se


def test_mc_weighted_graph():
    g = WeightedGraph(3, ((1, 2, 1.0), (2, 3, 3.0), (1, 3, 0.5)))
    exact = exact_meeting_times(g).expected_meeting[0, 2]
    mean, se = mc_meeting_time(g, 1, 3, replica_rng(3), 50_000)
    assert abs(mean - exact) <= 3 * se


def test_hitting_times_two_vertices():
    H = hitting_times(make_line(2))
    assert H[0, 1] == pytest.approx(2.0) and H[1, 0] == pytest.approx(2.0)
    assert tau0_upper_proxy(make_line(2)) == pytest.approx(1.0)


def test_tau0_cubic_on_lines():
    taus = [tau0_upper_proxy(make_line(n)) for n in (4, 8, 16)]
    assert taus == pytest.approx([15.0, 147.0, 1275.0])
    slope = np.polyfit(np.log([4, 8, 16]), np.log(taus), 1)[0]
    assert abs(slope - 3) <= 0.3


def test_tau0_complete_is_order_n():
    # order n in edge-rate time; canonical time adds a factor of n/2
    vals = [tau0_upper_proxy(make_complete(n), raw_rate=True) for n in (4, 8, 16)]
    ratios = [v / n for v, n in zip(vals, (4, 8, 16))]
    assert max(ratios) / min(ratios) < 2
